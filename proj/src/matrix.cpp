#include "frods/matrix.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace frods {

namespace {

using EigenRowMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
    if (a.dim() != b.dim()) {
        std::ostringstream msg;
        msg << op << ": matrix dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
        throw std::invalid_argument(msg.str());
    }
}

Eigen::Map<const EigenRowMat> as_eigen(const ComplexMatrix& m) {
    return {m.data(), m.dim(), m.dim()};
}

Eigen::Map<EigenRowMat> as_eigen(ComplexMatrix& m) {
    return {m.data(), m.dim(), m.dim()};
}

} // namespace

ComplexMatrix ComplexMatrix::identity(int dim) {
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
    require_same_dim(*this, o, "operator+=");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
    require_same_dim(*this, o, "operator-=");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cd s) {
    for (auto& v : a_) v *= s;
    return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cd s, ComplexMatrix a) { return a *= s; }
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) { return matmul(a, b); }

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "matmul");
    ComplexMatrix out(a.dim());
    as_eigen(out).noalias() = as_eigen(a) * as_eigen(b);
    return out;
}

ComplexMatrix adjoint(const ComplexMatrix& a) {
    ComplexMatrix out(a.dim());
    for (int r = 0; r < a.dim(); ++r)
        for (int c = 0; c < a.dim(); ++c) out(r, c) = std::conj(a(c, r));
    return out;
}

ComplexMatrix herm_exp(const ComplexMatrix& h, cd scale) {
    constexpr double herm_tol = 1e-12;
    double worst = 0.0;
    int wr = 0, wc = 0;
    for (int r = 0; r < h.dim(); ++r) {
        for (int c = 0; c < h.dim(); ++c) {
            const double d = std::abs(h(r, c) - std::conj(h(c, r)));
            if (d > worst) {
                worst = d;
                wr = r;
                wc = c;
            }
        }
    }
    if (worst > herm_tol) {
        std::ostringstream msg;
        msg << "herm_exp: input not Hermitian, max asymmetry " << worst << " at (" << wr << ","
            << wc << ")";
        throw std::invalid_argument(msg.str());
    }

    Eigen::MatrixXcd hc(h.dim(), h.dim());
    for (int r = 0; r < h.dim(); ++r)
        for (int c = 0; c < h.dim(); ++c) hc(r, c) = h(r, c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hc);
    if (es.info() != Eigen::Success) throw std::runtime_error("herm_exp: eigendecomposition failed");

    Eigen::VectorXcd phases(h.dim());
    for (int i = 0; i < h.dim(); ++i) phases(i) = std::exp(scale * es.eigenvalues()(i));
    Eigen::MatrixXcd res = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

    ComplexMatrix out(h.dim());
    for (int r = 0; r < h.dim(); ++r)
        for (int c = 0; c < h.dim(); ++c) out(r, c) = res(r, c);
    return out;
}

double frob_norm(const ComplexMatrix& a) {
    double s = 0.0;
    const std::size_t n = static_cast<std::size_t>(a.dim()) * a.dim();
    for (std::size_t i = 0; i < n; ++i) s += std::norm(a.data()[i]);
    return std::sqrt(s);
}

double op_norm_estimate(const ComplexMatrix& a) {
    if (a.dim() == 0) return 0.0;
    const Eigen::MatrixXcd m = as_eigen(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.adjoint() * m);
    const double top = es.eigenvalues().maxCoeff();
    return top > 0.0 ? std::sqrt(top) : 0.0;
}

cd trace(const ComplexMatrix& a) {
    cd t = 0.0;
    for (int i = 0; i < a.dim(); ++i) t += a(i, i);
    return t;
}

double herm_defect(const ComplexMatrix& a) {
    double worst = 0.0;
    for (int r = 0; r < a.dim(); ++r)
        for (int c = 0; c < a.dim(); ++c)
            worst = std::max(worst, std::abs(a(r, c) - std::conj(a(c, r))));
    return worst;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "max_abs_diff");
    double worst = 0.0;
    const std::size_t n = static_cast<std::size_t>(a.dim()) * a.dim();
    for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    return worst;
}

double rel_frob_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    const double ref = frob_norm(b);
    const double diff = frob_norm(a - b);
    return ref > 0.0 ? diff / ref : diff;
}

} // namespace frods
