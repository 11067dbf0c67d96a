// Iterative bold-diagram engine. A diagram key records which window slots
// carry an unpaired coupling insertion (ones + at most one double insertion);
// extensions grow the window one segment per side per time step, closing arcs
// against the bath table. Slots are kept newest-first so the windowed-phase
// kernel is identical at every step; truncation by memory length (k_max) and
// by circle count (d_max) shows up only as smaller key spaces.

#pragma once

#include "frods/bath.hpp"
#include "frods/matrix.hpp"
#include "frods/system.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <vector>

namespace frods {

struct DiagramKey {
    std::uint64_t minus = 0; // bit w = minus-side slot w, w = 0 newest
    std::uint64_t plus = 0;
    std::int8_t two_side = -1; // -1 none, 0 minus, 1 plus
    std::int8_t two_pos = 0;

    bool has_two() const { return two_side >= 0; }
    int circles() const; // ones + 2 per double insertion
    bool operator==(const DiagramKey&) const = default;
};

// Canonical enumeration + perfect ranking of all keys of one geometry.
// Keys are ordered ones-first by circle count, then the double-insertion
// banks by slot; rank(keys()[i]) == i.
class KeySpace {
public:
    KeySpace(int slots_minus, int slots_plus, int max_circles, bool with_two);

    int slots_minus() const { return sm_; }
    int slots_plus() const { return sp_; }
    int max_circles() const { return cap_; }
    bool with_two() const { return with_two_; }

    std::size_t size() const { return static_cast<std::size_t>(size_); }
    std::size_t rank(const DiagramKey& key) const;
    const std::vector<DiagramKey>& keys() const { return keys_; }

private:
    void enumerate();

    int sm_ = 0, sp_ = 0, slots_ = 0;
    int cap_ = 0;      // circle cap effective for this space
    int cap_ones_ = 0; // min(cap, slots)
    bool with_two_ = false;
    int cap_sub_ = 0; // ones cap inside a double-insertion bank
    std::vector<std::uint64_t> ones_offset_; // class offsets by ones count
    std::vector<std::uint64_t> sub_offset_;
    std::uint64_t ones_size_ = 0, sub_size_ = 0, size_ = 0;
    std::vector<DiagramKey> keys_;
};

struct StepStat {
    int step = 0;        // 1-based completed step index
    std::size_t keys = 0; // final store size after the step
    double ms = 0.0;
};

struct EngineOptions {
    int order = 2;
    int k_max = 0; // 0 disables memory-length windowing
    int d_max = 0; // 0 disables circle-count pruning
    int threads = 1;
    std::size_t mem_limit_bytes = std::size_t(6) << 30;
};

class Engine {
public:
    Engine(SystemModel model, PropagatorSet props, BathTable table, EngineOptions opt);

    void advance(); // one full time step (left then right extension)
    int steps_done() const { return step_; }
    ComplexMatrix rho() const; // the all-zeros diagram of the current store
    std::size_t store_size() const { return space_->size(); }
    const StepStat& last_stat() const { return stat_; }

private:
    int live_slots(int n) const;
    std::shared_ptr<const KeySpace> get_space(int sm, int sp, int cap, bool with_two);
    void check_store_fits(const KeySpace& space) const;

    SystemModel model_;
    PropagatorSet props_;
    BathTable table_;
    EngineOptions opt_;
    int mm_ = 0; // matrix element count M*M
    int step_ = 0;
    std::shared_ptr<const KeySpace> space_;
    std::vector<cd> data_;
    StepStat stat_;
    std::map<std::tuple<int, int, int, bool>, std::shared_ptr<const KeySpace>> space_cache_;
};

struct RunOutput {
    std::vector<ComplexMatrix> rhos; // n_steps + 1 entries, rhos[0] = rho0
    std::vector<StepStat> stats;     // n_steps entries
};

RunOutput run(const SystemModel& model, const PropagatorSet& props, const BathTable& table,
              int n_steps, const EngineOptions& opt,
              const std::function<void(const StepStat&)>& on_step = {});

// Key-space size of the windowed second-order store:
//   sum_{c<=min(2K,D)} C(2K,c) + sum_{c=2..D} 2K C(2K-1, c-2).
std::uint64_t diagram_count(int d_max, int k_max);
std::uint64_t diagram_count_first_order(int d_max, int k_max);

namespace detail {

struct ExtensionContext {
    const PropagatorSet* props = nullptr;
    const BathTable* table = nullptr;
    int dim = 0;
    int cap = 0; // circle cap; pass a large value when pruning is off
    int threads = 1;
};

// One half step each. Source/destination geometries must be consistent:
// the left extension adds a minus slot (destination keeps all source slots),
// the right extension adds a plus slot and drops whatever the destination
// geometry cannot represent.
void left_extension_first(const ExtensionContext& ctx, const KeySpace& src_sp, const cd* src,
                          const KeySpace& dst_sp, cd* dst);
void right_extension_first(const ExtensionContext& ctx, const KeySpace& src_sp, const cd* src,
                           const KeySpace& dst_sp, cd* dst);
void left_extension_second(const ExtensionContext& ctx, const KeySpace& src_sp, const cd* src,
                           const KeySpace& dst_sp, cd* dst);
void right_extension_second(const ExtensionContext& ctx, const KeySpace& src_sp, const cd* src,
                            const KeySpace& dst_sp, cd* dst);

ComplexMatrix store_value(const KeySpace& space, const std::vector<cd>& data, int dim,
                          const DiagramKey& key);

std::uint64_t binom(int n, int k); // saturating at uint64 max

} // namespace detail

} // namespace frods
