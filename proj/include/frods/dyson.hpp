// Reference implementations of the discrete Dyson series: closed-system U_n
// (orders 1 and 2, with the single-double-insertion pruning) and the
// open-system direct sums over index tuples. These are the oracles the
// iterative engine is validated against; no performance work here.

#pragma once

#include "frods/bath.hpp"
#include "frods/matrix.hpp"
#include "frods/system.hpp"

namespace frods {

struct ClosedSystem {
    ComplexMatrix h0;
    ComplexMatrix w;
    double dt = 0.0;
    int order = 1; // 1 or 2
};

// Discrete propagator after n steps. The nested index sum factorizes into
// per-step products, so this evaluates in O(n) matrix multiplications; the
// tuple-by-tuple enumeration lives in the test oracles.
ComplexMatrix closed_un(const ClosedSystem& sys, int n, bool pruned = false);

// Full sum over {0,1}^(2n) of propagator strings times lattice influence
// functionals. Refuses n beyond the cap.
ComplexMatrix direct_rho_first(const SystemModel& model, const PropagatorSet& props,
                               const BathTable& table, int n, int cap = 4);

// Sum over {0,1,2}^(2n) (at most one index equal to 2 when pruned).
ComplexMatrix direct_rho_second(const SystemModel& model, const PropagatorSet& props,
                                const BathTable& table, int n, bool pruned, int cap = 3);

} // namespace frods
