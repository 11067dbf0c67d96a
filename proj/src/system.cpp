#include "frods/system.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace frods {

void SystemModel::validate() const {
    std::ostringstream msg;
    if (dim < 1) msg << "model.dim: must be >= 1; ";
    if (h_s.dim() != dim || w_s.dim() != dim || rho0.dim() != dim)
        msg << "model: h_s/w_s/rho0 dimensions must all equal dim; ";
    if (herm_defect(h_s) > 1e-12) msg << "model.h_s: not Hermitian within 1e-12; ";
    if (herm_defect(w_s) > 1e-12) msg << "model.w_s: not Hermitian within 1e-12; ";
    if (herm_defect(rho0) > 1e-12) msg << "model.rho0: not Hermitian within 1e-12; ";
    if (std::abs(trace(rho0) - cd(1.0)) > 1e-12) msg << "model.rho0: trace must be 1 within 1e-12; ";
    if (msg.str().empty()) {
        Eigen::MatrixXcd r(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) r(i, j) = rho0(i, j);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
        if (es.eigenvalues().minCoeff() < -1e-10)
            msg << "model.rho0: not positive semidefinite (eigenvalue "
                << es.eigenvalues().minCoeff() << "); ";
    }
    const std::string s = msg.str();
    if (!s.empty()) throw std::invalid_argument(s);
}

SystemModel spin_boson(double epsilon, double delta) {
    SystemModel m;
    m.kind = ModelKind::SpinBoson;
    m.dim = 2;
    m.h_s = ComplexMatrix(2);
    m.h_s(0, 0) = epsilon;
    m.h_s(0, 1) = delta;
    m.h_s(1, 0) = delta;
    m.h_s(1, 1) = -epsilon;
    m.w_s = ComplexMatrix(2);
    m.w_s(0, 0) = 1.0;
    m.w_s(1, 1) = -1.0;
    m.rho0 = ComplexMatrix(2);
    m.rho0(0, 0) = 1.0;
    return m;
}

SystemModel multilevel(int m, double omega) {
    if (m < 2) throw std::invalid_argument("multilevel: m must be >= 2");
    SystemModel model;
    model.kind = ModelKind::Multilevel;
    model.dim = m;
    model.h_s = ComplexMatrix(m);
    for (int i = 0; i + 1 < m; ++i) {
        model.h_s(i, i + 1) = omega;
        model.h_s(i + 1, i) = omega;
    }
    const double J = (m - 1) / 2.0;
    model.w_s = ComplexMatrix(m);
    for (int i = 0; i < m; ++i) model.w_s(i, i) = -1.0 + i / J;
    model.rho0 = ComplexMatrix(m);
    model.rho0(0, 0) = 1.0;
    return model;
}

SystemModel custom_model(ComplexMatrix h_s, ComplexMatrix w_s, ComplexMatrix rho0) {
    SystemModel m;
    m.kind = ModelKind::Custom;
    m.dim = h_s.dim();
    m.h_s = std::move(h_s);
    m.w_s = std::move(w_s);
    m.rho0 = std::move(rho0);
    m.validate();
    return m;
}

PropagatorSet build_propagators(const SystemModel& model, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("build_propagators: dt must be > 0");
    const cd i_unit(0.0, 1.0);
    PropagatorSet p;
    p.dt = dt;
    const ComplexMatrix half = herm_exp(model.h_s, -i_unit * (0.5 * dt));
    p.p0 = herm_exp(model.h_s, -i_unit * dt);
    p.p1 = (-i_unit * dt) * matmul(matmul(half, model.w_s), half);
    p.p2 = cd(-0.5 * dt * dt) * matmul(matmul(half, matmul(model.w_s, model.w_s)), half);
    p.g1 = (i_unit * (0.5 * dt)) * matmul(model.w_s, half);
    p.g2 = (i_unit * dt) * matmul(half, model.w_s);
    p.p0d = adjoint(p.p0);
    p.p1d = adjoint(p.p1);
    p.p2d = adjoint(p.p2);
    p.g1d = adjoint(p.g1);
    p.g2d = adjoint(p.g2);
    return p;
}

} // namespace frods
