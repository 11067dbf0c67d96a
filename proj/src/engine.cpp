#include "frods/engine.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace frods {

namespace detail {

std::uint64_t binom(int n, int k) {
    constexpr int max_n = 132;
    static const auto table = [] {
        auto t = std::make_unique<std::array<std::array<std::uint64_t, max_n + 1>, max_n + 1>>();
        constexpr std::uint64_t inf = std::numeric_limits<std::uint64_t>::max();
        for (int i = 0; i <= max_n; ++i) {
            (*t)[i][0] = 1;
            for (int j = 1; j <= max_n; ++j) {
                const std::uint64_t a = (*t)[i ? i - 1 : 0][j - 1];
                const std::uint64_t b = i ? (*t)[i - 1][j] : 0;
                (*t)[i][j] = (i == 0) ? 0 : (a > inf - b ? inf : a + b);
            }
        }
        return t;
    }();
    if (k < 0 || n < 0 || k > n) return 0;
    if (n > max_n) return std::numeric_limits<std::uint64_t>::max();
    return (*table)[n][k];
}

} // namespace detail

namespace {

using detail::binom;

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    return a > kSaturated - b ? kSaturated : a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > kSaturated / b) return kSaturated;
    return a * b;
}

// Colex rank of the ones of (minus, plus) among combinations of the combined
// slot list, optionally with one combined slot removed from the list.
std::uint64_t colex_rank(std::uint64_t minus, std::uint64_t plus, int sm, int skip) {
    std::uint64_t r = 0;
    int i = 0;
    auto walk = [&](std::uint64_t word, int base) {
        while (word) {
            int pos = base + std::countr_zero(word);
            word &= word - 1;
            if (skip >= 0 && pos > skip) --pos;
            ++i;
            r += binom(pos, i);
        }
    };
    walk(minus, 0);
    walk(plus, sm);
    return r;
}

// Visit all c-combinations of positions [0, slots) in colex (ascending mask)
// order.
template <class F>
void for_each_combination(int slots, int c, F&& emit) {
    if (c > slots) return;
    std::vector<int> pos(static_cast<std::size_t>(c));
    for (int i = 0; i < c; ++i) pos[static_cast<std::size_t>(i)] = i;
    while (true) {
        emit(pos);
        int i = 0;
        while (i < c) {
            const int limit = (i + 1 < c) ? pos[static_cast<std::size_t>(i + 1)] : slots;
            if (pos[static_cast<std::size_t>(i)] + 1 < limit) break;
            ++i;
        }
        if (i == c) break;
        ++pos[static_cast<std::size_t>(i)];
        for (int j = 0; j < i; ++j) pos[static_cast<std::size_t>(j)] = j;
    }
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& body) {
    if (threads <= 1 || n < 2048) {
        body(0, n);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] { body(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

// out += scale * a*b, all dim x dim row-major.
void acc_mul(cd* out, const cd* a, const cd* b, cd scale, int dim) {
    for (int i = 0; i < dim; ++i) {
        const cd* arow = a + static_cast<std::size_t>(i) * dim;
        cd* orow = out + static_cast<std::size_t>(i) * dim;
        for (int l = 0; l < dim; ++l) {
            const cd f = scale * arow[l];
            const cd* brow = b + static_cast<std::size_t>(l) * dim;
            for (int j = 0; j < dim; ++j) orow[j] += f * brow[j];
        }
    }
}

DiagramKey shift_minus(DiagramKey k) {
    k.minus <<= 1;
    if (k.two_side == 0) ++k.two_pos;
    return k;
}

DiagramKey shift_plus(DiagramKey k) {
    k.plus <<= 1;
    if (k.two_side == 1) ++k.two_pos;
    return k;
}

int slot_value(const DiagramKey& k, int side, int w) {
    if (k.two_side == side && k.two_pos == w) return 2;
    const std::uint64_t word = side == 0 ? k.minus : k.plus;
    return (word >> w) & 1u ? 1 : 0;
}

void set_one(DiagramKey& k, int side, int w) {
    if (side == 0) k.minus |= std::uint64_t(1) << w;
    else k.plus |= std::uint64_t(1) << w;
}

void clear_one(DiagramKey& k, int side, int w) {
    if (side == 0) k.minus &= ~(std::uint64_t(1) << w);
    else k.plus &= ~(std::uint64_t(1) << w);
}

} // namespace

int DiagramKey::circles() const {
    return std::popcount(minus) + std::popcount(plus) + (has_two() ? 2 : 0);
}

// ----------------------------- KeySpace -----------------------------

KeySpace::KeySpace(int slots_minus, int slots_plus, int max_circles, bool with_two)
    : sm_(slots_minus), sp_(slots_plus), slots_(slots_minus + slots_plus) {
    if (sm_ < 0 || sp_ < 0 || sm_ > 62 || sp_ > 62)
        throw std::invalid_argument("KeySpace: slot counts must be in [0, 62]");
    cap_ = std::max(0, max_circles);
    cap_ones_ = std::min(cap_, slots_);
    with_two_ = with_two && cap_ >= 2 && slots_ >= 1;
    cap_sub_ = with_two_ ? std::min(cap_ - 2, slots_ - 1) : 0;

    ones_offset_.assign(static_cast<std::size_t>(cap_ones_) + 2, 0);
    for (int c = 0; c <= cap_ones_; ++c)
        ones_offset_[static_cast<std::size_t>(c) + 1] =
            sat_add(ones_offset_[static_cast<std::size_t>(c)], binom(slots_, c));
    ones_size_ = ones_offset_[static_cast<std::size_t>(cap_ones_) + 1];

    sub_size_ = 0;
    if (with_two_) {
        sub_offset_.assign(static_cast<std::size_t>(cap_sub_) + 2, 0);
        for (int c = 0; c <= cap_sub_; ++c)
            sub_offset_[static_cast<std::size_t>(c) + 1] =
                sat_add(sub_offset_[static_cast<std::size_t>(c)], binom(slots_ - 1, c));
        sub_size_ = sub_offset_[static_cast<std::size_t>(cap_sub_) + 1];
    }
    size_ = sat_add(ones_size_, sat_mul(static_cast<std::uint64_t>(with_two_ ? slots_ : 0), sub_size_));
    if (size_ == kSaturated) throw std::length_error("KeySpace: key space size overflows");
    enumerate();
}

void KeySpace::enumerate() {
    keys_.reserve(static_cast<std::size_t>(size_));
    auto key_from_positions = [&](const std::vector<int>& pos, int two_slot) {
        DiagramKey k;
        for (int p : pos) {
            int actual = p;
            if (two_slot >= 0 && actual >= two_slot) ++actual; // re-insert the removed slot
            if (actual < sm_) k.minus |= std::uint64_t(1) << actual;
            else k.plus |= std::uint64_t(1) << (actual - sm_);
        }
        if (two_slot >= 0) {
            k.two_side = two_slot < sm_ ? 0 : 1;
            k.two_pos = static_cast<std::int8_t>(two_slot < sm_ ? two_slot : two_slot - sm_);
        }
        return k;
    };
    for (int c = 0; c <= cap_ones_; ++c)
        for_each_combination(slots_, c,
                             [&](const std::vector<int>& pos) { keys_.push_back(key_from_positions(pos, -1)); });
    if (with_two_) {
        for (int t = 0; t < slots_; ++t)
            for (int c = 0; c <= cap_sub_; ++c)
                for_each_combination(slots_ - 1, c, [&](const std::vector<int>& pos) {
                    keys_.push_back(key_from_positions(pos, t));
                });
    }
}

std::size_t KeySpace::rank(const DiagramKey& key) const {
    const int ones = std::popcount(key.minus) + std::popcount(key.plus);
    if (!key.has_two()) {
        return static_cast<std::size_t>(ones_offset_[static_cast<std::size_t>(ones)] +
                                        colex_rank(key.minus, key.plus, sm_, -1));
    }
    const int t = key.two_side == 0 ? key.two_pos : sm_ + key.two_pos;
    return static_cast<std::size_t>(ones_size_ + static_cast<std::uint64_t>(t) * sub_size_ +
                                    sub_offset_[static_cast<std::size_t>(ones)] +
                                    colex_rank(key.minus, key.plus, sm_, t));
}

// ----------------------------- extensions -----------------------------

namespace detail {

namespace {

// Arc offsets are window-relative. Left extension: the new minus segment
// pairs with source slot w at offset w+1 on either branch. Right extension:
// the new plus segment pairs with intermediate minus slot w at offset -w and
// plus slot w at offset -(w+1).
cd left_arc(const ExtensionContext& ctx, int /*side*/, int w) { return ctx.table->value(w + 1); }

cd right_arc(const ExtensionContext& ctx, int side, int w) {
    return ctx.table->value(side == 0 ? -w : -(w + 1));
}

// Destination key of a left extension: minus slots shift by one.
// Destination of a right extension: plus slots shift by one, and keys that do
// not fit the (possibly narrower) destination window are skipped.
bool fits_destination(const DiagramKey& shifted, int dst_sm, int dst_sp) {
    if (dst_sm < 64 && (shifted.minus >> dst_sm) != 0) return false;
    if (dst_sp < 64 && (shifted.plus >> dst_sp) != 0) return false;
    if (shifted.two_side == 0 && shifted.two_pos >= dst_sm) return false;
    if (shifted.two_side == 1 && shifted.two_pos >= dst_sp) return false;
    return true;
}

} // namespace

void left_extension_first(const ExtensionContext& ctx, const KeySpace& src_sp, const cd* src,
                          const KeySpace& dst_sp, cd* dst) {
    const int dim = ctx.dim;
    const std::size_t mm = static_cast<std::size_t>(dim) * dim;
    const auto& keys = src_sp.keys();
    const int sm = src_sp.slots_minus();
    const int sp = src_sp.slots_plus();
    const ComplexMatrix& p0 = ctx.props->p0;
    const ComplexMatrix& p1 = ctx.props->p1;

    parallel_for(keys.size(), ctx.threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            const DiagramKey& base = keys[idx];
            const cd* s = src + idx * mm;
            const int c = base.circles();
            const DiagramKey shifted = shift_minus(base);

            if (c + 1 <= ctx.cap) {
                DiagramKey t1 = shifted;
                t1.minus |= 1;
                acc_mul(dst + dst_sp.rank(t1) * mm, p1.data(), s, 1.0, dim);
            }

            cd* d0 = dst + dst_sp.rank(shifted) * mm;
            acc_mul(d0, p0.data(), s, 1.0, dim);
            if (c < ctx.cap) {
                for (int side = 0; side < 2; ++side) {
                    const int slots = side == 0 ? sm : sp;
                    for (int w = slots - 1; w >= 0; --w) { // ascending lattice index
                        if (slot_value(base, side, w) != 0) continue;
                        DiagramKey arc_src = base;
                        set_one(arc_src, side, w);
                        acc_mul(d0, p1.data(), src + src_sp.rank(arc_src) * mm,
                                left_arc(ctx, side, w), dim);
                    }
                }
            }
        }
    });
}

void right_extension_first(const ExtensionContext& ctx, const KeySpace& src_sp, const cd* src,
                           const KeySpace& dst_sp, cd* dst) {
    const int dim = ctx.dim;
    const std::size_t mm = static_cast<std::size_t>(dim) * dim;
    const auto& keys = src_sp.keys();
    const int sm = src_sp.slots_minus();
    const int sp = src_sp.slots_plus();
    const ComplexMatrix& p0d = ctx.props->p0d;
    const ComplexMatrix& p1d = ctx.props->p1d;

    parallel_for(keys.size(), ctx.threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            const DiagramKey& base = keys[idx];
            const cd* s = src + idx * mm;
            const int c = base.circles();
            const DiagramKey shifted = shift_plus(base);
            if (!fits_destination(shifted, dst_sp.slots_minus(), dst_sp.slots_plus())) continue;

            if (c + 1 <= ctx.cap) {
                DiagramKey t1 = shifted;
                t1.plus |= 1;
                acc_mul(dst + dst_sp.rank(t1) * mm, s, p1d.data(), 1.0, dim);
            }

            cd* d0 = dst + dst_sp.rank(shifted) * mm;
            acc_mul(d0, s, p0d.data(), 1.0, dim);
            if (c < ctx.cap) {
                for (int side = 0; side < 2; ++side) {
                    const int slots = side == 0 ? sm : sp;
                    for (int w = slots - 1; w >= 0; --w) {
                        if (slot_value(base, side, w) != 0) continue;
                        DiagramKey arc_src = base;
                        set_one(arc_src, side, w);
                        acc_mul(d0, src + src_sp.rank(arc_src) * mm, p1d.data(),
                                right_arc(ctx, side, w), dim);
                    }
                }
            }
        }
    });
}

void left_extension_second(const ExtensionContext& ctx, const KeySpace& src_sp, const cd* src,
                           const KeySpace& dst_sp, cd* dst) {
    const int dim = ctx.dim;
    const std::size_t mm = static_cast<std::size_t>(dim) * dim;
    const int sm = src_sp.slots_minus();
    const int sp = src_sp.slots_plus();
    const ComplexMatrix& p0 = ctx.props->p0;
    const ComplexMatrix& p1 = ctx.props->p1;
    const ComplexMatrix& g1 = ctx.props->g1;
    const ComplexMatrix& g2 = ctx.props->g2;
    const cd b_self = ctx.table->value(0);

    // Half-step store: L(b, pattern) for the forming double insertion, one
    // coupling applied and one arc pending. Patterns never carry a two.
    const KeySpace half_sp(sm, sp, std::min(ctx.cap - 1, sm + sp), false);
    std::vector<cd> l0(half_sp.size() * mm), l1(half_sp.size() * mm);

    const auto& half_keys = half_sp.keys();
    parallel_for(half_keys.size(), ctx.threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            const DiagramKey& base = half_keys[idx];
            acc_mul(l1.data() + idx * mm, g1.data(), src + src_sp.rank(base) * mm, 1.0, dim);
            cd* d = l0.data() + idx * mm;
            for (int side = 0; side < 2; ++side) {
                const int slots = side == 0 ? sm : sp;
                for (int w = slots - 1; w >= 0; --w) {
                    if (slot_value(base, side, w) != 0) continue;
                    DiagramKey arc_src = base;
                    set_one(arc_src, side, w);
                    acc_mul(d, g1.data(), src + src_sp.rank(arc_src) * mm, left_arc(ctx, side, w),
                            dim);
                }
            }
        }
    });

    const auto& keys = src_sp.keys();
    parallel_for(keys.size(), ctx.threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            const DiagramKey& base = keys[idx];
            const cd* s = src + idx * mm;
            const int c = base.circles();
            const bool two = base.has_two();
            const DiagramKey shifted = shift_minus(base);

            cd* d0 = dst + dst_sp.rank(shifted) * mm;
            acc_mul(d0, p0.data(), s, 1.0, dim);
            if (c < ctx.cap) {
                for (int side = 0; side < 2; ++side) {
                    const int slots = side == 0 ? sm : sp;
                    for (int w = slots - 1; w >= 0; --w) {
                        const int v = slot_value(base, side, w);
                        if (v == 2) continue;
                        const cd arc = left_arc(ctx, side, w);
                        if (c + 1 <= ctx.cap && (v == 0 || !two)) {
                            DiagramKey arc_src = base; // v -> v+1
                            if (v == 0) {
                                set_one(arc_src, side, w);
                            } else {
                                clear_one(arc_src, side, w);
                                arc_src.two_side = static_cast<std::int8_t>(side);
                                arc_src.two_pos = static_cast<std::int8_t>(w);
                            }
                            acc_mul(d0, p1.data(), src + src_sp.rank(arc_src) * mm, arc, dim);
                        }
                        if (v == 0 && !two && c + 1 <= ctx.cap - 1) {
                            DiagramKey half = base;
                            set_one(half, side, w);
                            acc_mul(d0, g2.data(), l0.data() + half_sp.rank(half) * mm, arc, dim);
                        }
                    }
                }
                if (!two) acc_mul(d0, g2.data(), l1.data() + half_sp.rank(base) * mm, b_self, dim);
            }

            if (c + 1 <= ctx.cap) {
                DiagramKey t1 = shifted;
                t1.minus |= 1;
                cd* d1 = dst + dst_sp.rank(t1) * mm;
                acc_mul(d1, p1.data(), s, 1.0, dim);
                if (c + 1 < ctx.cap) {
                    if (!two) acc_mul(d1, g2.data(), l0.data() + half_sp.rank(base) * mm, 1.0, dim);
                    for (int side = 0; side < 2; ++side) {
                        const int slots = side == 0 ? sm : sp;
                        for (int w = slots - 1; w >= 0; --w) {
                            if (slot_value(base, side, w) != 0 || two) continue;
                            DiagramKey half = base;
                            set_one(half, side, w);
                            acc_mul(d1, g2.data(), l1.data() + half_sp.rank(half) * mm,
                                    left_arc(ctx, side, w), dim);
                        }
                    }
                }
            }

            if (!two && c + 2 <= ctx.cap) {
                DiagramKey t2 = shifted;
                t2.two_side = 0;
                t2.two_pos = 0;
                acc_mul(dst + dst_sp.rank(t2) * mm, g2.data(),
                        l1.data() + half_sp.rank(base) * mm, 2.0, dim);
            }
        }
    });
}

void right_extension_second(const ExtensionContext& ctx, const KeySpace& src_sp, const cd* src,
                            const KeySpace& dst_sp, cd* dst) {
    const int dim = ctx.dim;
    const std::size_t mm = static_cast<std::size_t>(dim) * dim;
    const int sm = src_sp.slots_minus();
    const int sp = src_sp.slots_plus();
    const ComplexMatrix& p0d = ctx.props->p0d;
    const ComplexMatrix& p1d = ctx.props->p1d;
    const ComplexMatrix& g1d = ctx.props->g1d;
    const ComplexMatrix& g2d = ctx.props->g2d;
    const cd b_self = ctx.table->value(0);

    const KeySpace half_sp(sm, sp, std::min(ctx.cap - 1, sm + sp), false);
    std::vector<cd> r0(half_sp.size() * mm), r1(half_sp.size() * mm);

    const auto& half_keys = half_sp.keys();
    parallel_for(half_keys.size(), ctx.threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            const DiagramKey& base = half_keys[idx];
            acc_mul(r1.data() + idx * mm, src + src_sp.rank(base) * mm, g1d.data(), 1.0, dim);
            cd* d = r0.data() + idx * mm;
            for (int side = 0; side < 2; ++side) {
                const int slots = side == 0 ? sm : sp;
                for (int w = slots - 1; w >= 0; --w) {
                    if (slot_value(base, side, w) != 0) continue;
                    DiagramKey arc_src = base;
                    set_one(arc_src, side, w);
                    acc_mul(d, src + src_sp.rank(arc_src) * mm, g1d.data(),
                            right_arc(ctx, side, w), dim);
                }
            }
        }
    });

    const auto& keys = src_sp.keys();
    parallel_for(keys.size(), ctx.threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            const DiagramKey& base = keys[idx];
            const cd* s = src + idx * mm;
            const int c = base.circles();
            const bool two = base.has_two();
            const DiagramKey shifted = shift_plus(base);
            if (!fits_destination(shifted, dst_sp.slots_minus(), dst_sp.slots_plus())) continue;

            cd* d0 = dst + dst_sp.rank(shifted) * mm;
            acc_mul(d0, s, p0d.data(), 1.0, dim);
            if (c < ctx.cap) {
                for (int side = 0; side < 2; ++side) {
                    const int slots = side == 0 ? sm : sp;
                    for (int w = slots - 1; w >= 0; --w) {
                        const int v = slot_value(base, side, w);
                        if (v == 2) continue;
                        const cd arc = right_arc(ctx, side, w);
                        if (c + 1 <= ctx.cap && (v == 0 || !two)) {
                            DiagramKey arc_src = base;
                            if (v == 0) {
                                set_one(arc_src, side, w);
                            } else {
                                clear_one(arc_src, side, w);
                                arc_src.two_side = static_cast<std::int8_t>(side);
                                arc_src.two_pos = static_cast<std::int8_t>(w);
                            }
                            acc_mul(d0, src + src_sp.rank(arc_src) * mm, p1d.data(), arc, dim);
                        }
                        if (v == 0 && !two && c + 1 <= ctx.cap - 1) {
                            DiagramKey half = base;
                            set_one(half, side, w);
                            acc_mul(d0, r0.data() + half_sp.rank(half) * mm, g2d.data(), arc, dim);
                        }
                    }
                }
                if (!two) acc_mul(d0, r1.data() + half_sp.rank(base) * mm, g2d.data(), b_self, dim);
            }

            if (c + 1 <= ctx.cap) {
                DiagramKey t1 = shifted;
                t1.plus |= 1;
                cd* d1 = dst + dst_sp.rank(t1) * mm;
                acc_mul(d1, s, p1d.data(), 1.0, dim);
                if (c + 1 < ctx.cap) {
                    if (!two) acc_mul(d1, r0.data() + half_sp.rank(base) * mm, g2d.data(), 1.0, dim);
                    for (int side = 0; side < 2; ++side) {
                        const int slots = side == 0 ? sm : sp;
                        for (int w = slots - 1; w >= 0; --w) {
                            if (slot_value(base, side, w) != 0 || two) continue;
                            DiagramKey half = base;
                            set_one(half, side, w);
                            acc_mul(d1, r1.data() + half_sp.rank(half) * mm, g2d.data(),
                                    right_arc(ctx, side, w), dim);
                        }
                    }
                }
            }

            if (!two && c + 2 <= ctx.cap) {
                DiagramKey t2 = shifted;
                t2.two_side = 1;
                t2.two_pos = 0;
                acc_mul(dst + dst_sp.rank(t2) * mm,
                        r1.data() + half_sp.rank(base) * mm, g2d.data(), 2.0, dim);
            }
        }
    });
}

ComplexMatrix store_value(const KeySpace& space, const std::vector<cd>& data, int dim,
                          const DiagramKey& key) {
    ComplexMatrix out(dim);
    const std::size_t mm = static_cast<std::size_t>(dim) * dim;
    const cd* p = data.data() + space.rank(key) * mm;
    std::copy(p, p + mm, out.data());
    return out;
}

} // namespace detail

// ----------------------------- Engine -----------------------------

namespace {

constexpr int kNoCap = 1 << 20; // effectively unbounded circle count

} // namespace

Engine::Engine(SystemModel model, PropagatorSet props, BathTable table, EngineOptions opt)
    : model_(std::move(model)), props_(std::move(props)), table_(std::move(table)),
      opt_(opt) {
    model_.validate();
    if (opt_.order != 1 && opt_.order != 2)
        throw std::invalid_argument("engine: order must be 1 or 2");
    if (opt_.k_max < 0) throw std::invalid_argument("engine: k_max must be >= 0");
    if (opt_.d_max < 0) throw std::invalid_argument("engine: d_max must be >= 0");
    if (opt_.k_max > 0 && opt_.d_max > 2 * opt_.k_max + 1)
        throw std::invalid_argument("engine: d_max must be <= 2*k_max + 1 when windowing is on");
    if (opt_.threads < 1) opt_.threads = 1;
    if (std::abs(props_.dt - table_.dt()) > 1e-15)
        throw std::invalid_argument("engine: propagator and bath table time steps differ");
    mm_ = model_.dim * model_.dim;
    space_ = get_space(0, 0, opt_.d_max > 0 ? opt_.d_max : kNoCap, opt_.order == 2);
    data_.assign(mm_, 0.0);
    std::copy(model_.rho0.data(), model_.rho0.data() + mm_, data_.data());
}

int Engine::live_slots(int n) const {
    return opt_.k_max > 0 ? std::min(n, opt_.k_max) : n;
}

std::shared_ptr<const KeySpace> Engine::get_space(int sm, int sp, int cap, bool with_two) {
    const auto key = std::make_tuple(sm, sp, cap, with_two);
    auto it = space_cache_.find(key);
    if (it != space_cache_.end()) return it->second;
    auto space = std::make_shared<const KeySpace>(sm, sp, cap, with_two);
    space_cache_.emplace(key, space);
    return space;
}

void Engine::check_store_fits(const KeySpace& space) const {
    const std::uint64_t bytes = sat_mul(space.size(), static_cast<std::uint64_t>(mm_) * sizeof(cd));
    if (bytes > opt_.mem_limit_bytes) {
        std::ostringstream msg;
        msg << "engine: step " << (step_ + 1) << " needs " << space.size() << " diagrams (~"
            << bytes / (1024.0 * 1024.0 * 1024.0)
            << " GiB); enable k_max/d_max truncation or reduce n_steps";
        throw std::runtime_error(msg.str());
    }
}

void Engine::advance() {
    const auto t0 = std::chrono::steady_clock::now();
    const int k = step_;
    const int cap = opt_.d_max > 0 ? opt_.d_max : kNoCap;
    const bool second = opt_.order == 2;
    const int m_src = live_slots(k);
    const int m_fin = live_slots(k + 1);

    auto s_int = get_space(m_src + 1, m_src, cap, second);
    auto s_fin = get_space(m_fin, m_fin, cap, second);
    check_store_fits(*s_int);
    check_store_fits(*s_fin);

    detail::ExtensionContext ctx{&props_, &table_, model_.dim, cap, opt_.threads};

    std::vector<cd> inter(s_int->size() * mm_, 0.0);
    if (second) detail::left_extension_second(ctx, *space_, data_.data(), *s_int, inter.data());
    else detail::left_extension_first(ctx, *space_, data_.data(), *s_int, inter.data());

    std::vector<cd> fin(s_fin->size() * mm_, 0.0);
    if (second) detail::right_extension_second(ctx, *s_int, inter.data(), *s_fin, fin.data());
    else detail::right_extension_first(ctx, *s_int, inter.data(), *s_fin, fin.data());

    space_ = s_fin;
    data_ = std::move(fin);
    ++step_;

    const auto t1 = std::chrono::steady_clock::now();
    stat_.step = step_;
    stat_.keys = space_->size();
    stat_.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
}

ComplexMatrix Engine::rho() const {
    ComplexMatrix out(model_.dim);
    std::copy(data_.data(), data_.data() + mm_, out.data()); // all-zeros key has rank 0
    return out;
}

RunOutput run(const SystemModel& model, const PropagatorSet& props, const BathTable& table,
              int n_steps, const EngineOptions& opt,
              const std::function<void(const StepStat&)>& on_step) {
    if (n_steps < 0) throw std::invalid_argument("run: n_steps must be >= 0");
    if (opt.k_max == 0 && table.max_offset() < std::max(0, n_steps - 1))
        throw std::invalid_argument("run: bath table does not cover the requested horizon");
    Engine engine(model, props, table, opt);
    RunOutput out;
    out.rhos.reserve(static_cast<std::size_t>(n_steps) + 1);
    out.stats.reserve(static_cast<std::size_t>(n_steps));
    out.rhos.push_back(engine.rho());
    for (int k = 0; k < n_steps; ++k) {
        engine.advance();
        out.rhos.push_back(engine.rho());
        out.stats.push_back(engine.last_stat());
        if (on_step) on_step(engine.last_stat());
    }
    return out;
}

std::uint64_t diagram_count(int d_max, int k_max) {
    if (k_max < 1) throw std::invalid_argument("diagram_count: k_max must be >= 1");
    if (d_max < 0) throw std::invalid_argument("diagram_count: d_max must be >= 0");
    const int s = 2 * k_max;
    std::uint64_t n = diagram_count_first_order(d_max, k_max);
    for (int c = 2; c <= d_max; ++c)
        n = sat_add(n, sat_mul(static_cast<std::uint64_t>(s), binom(s - 1, c - 2)));
    return n;
}

std::uint64_t diagram_count_first_order(int d_max, int k_max) {
    if (k_max < 1) throw std::invalid_argument("diagram_count: k_max must be >= 1");
    if (d_max < 0) throw std::invalid_argument("diagram_count: d_max must be >= 0");
    const int s = 2 * k_max;
    std::uint64_t n = 0;
    for (int c = 0; c <= std::min(s, d_max); ++c) n = sat_add(n, binom(s, c));
    return n;
}

} // namespace frods
