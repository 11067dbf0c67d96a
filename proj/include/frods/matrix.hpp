// Dense complex matrix kernel: arithmetic, adjoints, norms, and Hermitian
// matrix exponentials. Everything downstream (propagators, diagram values,
// density matrices) is carried by ComplexMatrix.

#pragma once

#include <complex>
#include <vector>

namespace frods {

using cd = std::complex<double>;

class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim) {}

    static ComplexMatrix identity(int dim);

    int dim() const { return dim_; }

    cd& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * dim_ + c]; }
    const cd& operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * dim_ + c]; }

    cd* data() { return a_.data(); }
    const cd* data() const { return a_.data(); }

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator-=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(cd s);

private:
    int dim_ = 0;
    std::vector<cd> a_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(cd s, ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

// Exact complex matrix product; dimension mismatch throws.
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

// Conjugate transpose.
ComplexMatrix adjoint(const ComplexMatrix& a);

// exp(scale*h) for Hermitian h via eigendecomposition h = V D V^dag.
// Rejects inputs whose max asymmetry |h_kl - conj(h_lk)| exceeds 1e-12.
ComplexMatrix herm_exp(const ComplexMatrix& h, cd scale);

double frob_norm(const ComplexMatrix& a);

// Largest singular value, via the eigenvalues of a^dag a.
double op_norm_estimate(const ComplexMatrix& a);

cd trace(const ComplexMatrix& a);

// max_{k,l} |a_kl - conj(a_lk)|
double herm_defect(const ComplexMatrix& a);

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

// frob(a-b) / frob(b), with an absolute fallback when b is zero.
double rel_frob_diff(const ComplexMatrix& a, const ComplexMatrix& b);

} // namespace frods
