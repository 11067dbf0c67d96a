// Brute-force evaluation of the bath influence functional by full pairing
// enumeration. Ground truth for the direct-sum reference densities and for
// the coefficient bookkeeping of the iterative engine. Deliberately not fast.

#pragma once

#include "frods/bath.hpp"
#include "frods/matrix.hpp"

#include <functional>
#include <vector>

namespace frods {

struct TimeList {
    std::vector<double> left;  // sorted ascending, all <= 0 (-t_m <= ... <= -t_1)
    std::vector<double> right; // sorted ascending, all >= 0 (t_1' <= ... <= t_m')
};

// Called with the pair ordered (earlier, later).
using CorrelationFn = std::function<cd(double, double)>;

// 1 for the empty list, 0 for odd counts, else the sum over all perfect
// pairings of products of b over pairs. Repeated time points are distinct
// enumeration slots. Refuses more than max_points points.
cd influence(const TimeList& times, const CorrelationFn& b, int max_points = 12);

// Lattice form: index value v at position k contributes v copies of the
// midpoint +-(k-1/2)dt. j_minus is given outermost-first (j_n-, ..., j_1-),
// j_plus innermost-first (j_1+, ..., j_n+), matching reading order.
cd influence_lattice(const std::vector<int>& j_minus, const std::vector<int>& j_plus,
                     const BathTable& table, int max_points = 12);

// Number of perfect pairings of 2q points, (2q-1)!!.
std::uint64_t pairing_count(int points);

} // namespace frods
