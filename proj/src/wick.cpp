#include "frods/wick.hpp"

#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace frods {

namespace {

// Lattice point: branch -1/+1, step index k >= 1, midpoint time +-(k-1/2)dt.
struct LatticePoint {
    int branch;
    int k;
};

template <class Item, class PairValue>
cd sum_pairings(const std::vector<Item>& items, const PairValue& pair_value) {
    const std::size_t n = items.size();
    std::vector<char> used(n, 0);
    // Pair the first unpaired element with each later element, recursively.
    std::function<cd()> rec = [&]() -> cd {
        std::size_t first = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!used[i]) {
                first = i;
                break;
            }
        }
        if (first == n) return cd(1.0);
        used[first] = 1;
        cd total = 0.0;
        for (std::size_t j = first + 1; j < n; ++j) {
            if (used[j]) continue;
            used[j] = 1;
            total += pair_value(items[first], items[j]) * rec();
            used[j] = 0;
        }
        used[first] = 0;
        return total;
    };
    return rec();
}

void check_cap(std::size_t points, int max_points, const char* who) {
    if (points > static_cast<std::size_t>(max_points)) {
        std::ostringstream msg;
        msg << who << ": " << points << " insertion points exceed the pairing cap " << max_points
            << "; this enumeration is for desk-scale cross-checks only";
        throw std::invalid_argument(msg.str());
    }
}

} // namespace

cd influence(const TimeList& times, const CorrelationFn& b, int max_points) {
    const std::size_t total = times.left.size() + times.right.size();
    if (total == 0) return cd(1.0);
    if (total % 2 != 0) return cd(0.0);
    check_cap(total, max_points, "influence");

    std::vector<double> pts;
    pts.reserve(total);
    pts.insert(pts.end(), times.left.begin(), times.left.end());
    pts.insert(pts.end(), times.right.begin(), times.right.end());
    return sum_pairings(pts, [&](double t1, double t2) { return b(t1, t2); });
}

cd influence_lattice(const std::vector<int>& j_minus, const std::vector<int>& j_plus,
                     const BathTable& table, int max_points) {
    std::size_t total = 0;
    std::vector<LatticePoint> pts;
    // Ascending time order: minus branch outermost-first, then plus branch.
    const int nl = static_cast<int>(j_minus.size());
    for (int i = 0; i < nl; ++i) {
        const int v = j_minus[i];
        if (v < 0 || v > 2) throw std::invalid_argument("influence_lattice: indices must be 0..2");
        const int k = nl - i;
        for (int c = 0; c < v; ++c) pts.push_back({-1, k});
        total += static_cast<std::size_t>(v);
    }
    for (std::size_t i = 0; i < j_plus.size(); ++i) {
        const int v = j_plus[i];
        if (v < 0 || v > 2) throw std::invalid_argument("influence_lattice: indices must be 0..2");
        for (int c = 0; c < v; ++c) pts.push_back({+1, static_cast<int>(i) + 1});
        total += static_cast<std::size_t>(v);
    }
    if (total == 0) return cd(1.0);
    if (total % 2 != 0) return cd(0.0);
    check_cap(total, max_points, "influence_lattice");

    return sum_pairings(pts, [&](const LatticePoint& a, const LatticePoint& b2) {
        // (a, b2) is already (earlier, later); arc value depends on |r| - |r'|.
        ArcCase c;
        if (a.branch < 0 && b2.branch < 0) c = ArcCase::MinusMinus;
        else if (a.branch < 0) c = ArcCase::MinusPlus;
        else c = ArcCase::PlusPlus;
        return table.arc(c, a.k, b2.k);
    });
}

std::uint64_t pairing_count(int points) {
    if (points % 2 != 0) return 0;
    std::uint64_t n = 1;
    for (int k = points - 1; k > 1; k -= 2) n *= static_cast<std::uint64_t>(k);
    return n;
}

} // namespace frods
