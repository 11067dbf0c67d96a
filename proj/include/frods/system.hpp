// Model Hamiltonians, coupling operators and the per-step propagator
// operators P0/P1/P2 plus the half-step factors G1/G2 with P2 = G2*G1.

#pragma once

#include "frods/matrix.hpp"

namespace frods {

enum class ModelKind { SpinBoson, Multilevel, Custom };

struct SystemModel {
    ModelKind kind = ModelKind::Custom;
    ComplexMatrix h_s;
    ComplexMatrix w_s;
    ComplexMatrix rho0;
    int dim = 0;

    void validate() const; // Hermiticity, unit trace, positive semidefiniteness
};

// H_s = epsilon*sigma_z + delta*sigma_x, W_s = sigma_z, rho0 = |0><0|.
SystemModel spin_boson(double epsilon, double delta);

// H_s with omega on the super/sub diagonal; W_s = diag(-1, -1+1/J, ...),
// J = (m-1)/2; rho0 = first basis state.
SystemModel multilevel(int m, double omega);

SystemModel custom_model(ComplexMatrix h_s, ComplexMatrix w_s, ComplexMatrix rho0);

struct PropagatorSet {
    double dt = 0.0;
    ComplexMatrix p0, p1, p2, g1, g2;
    ComplexMatrix p0d, p1d, p2d, g1d, g2d;
};

// p0 = exp(-i H dt); p1 = -i dt E W E; p2 = -(dt^2/2) E W^2 E with
// E = exp(-i H dt/2); g1 = (i/2) dt W E; g2 = i dt E W.
PropagatorSet build_propagators(const SystemModel& model, double dt);

} // namespace frods
