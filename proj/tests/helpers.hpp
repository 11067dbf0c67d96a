// Shared test utilities: seeded random matrices, models and bath tables.

#pragma once

#include "frods/bath.hpp"
#include "frods/matrix.hpp"
#include "frods/system.hpp"

#include <random>
#include <vector>

namespace frods::testing {

inline ComplexMatrix random_matrix(std::mt19937_64& rng, int dim, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexMatrix m(dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) m(r, c) = scale * cd(u(rng), u(rng));
    return m;
}

// Random Hermitian matrix with operator norm about `norm`.
inline ComplexMatrix random_hermitian(std::mt19937_64& rng, int dim, double norm = 1.0) {
    ComplexMatrix a = random_matrix(rng, dim);
    ComplexMatrix h = a + adjoint(a);
    const double n = op_norm_estimate(h);
    if (n > 0.0) h *= cd(norm / n);
    for (int i = 0; i < dim; ++i) h(i, i) = cd(h(i, i).real(), 0.0); // exact diagonal realness
    return h;
}

// Random density matrix: X X^dag normalized to unit trace.
inline ComplexMatrix random_density(std::mt19937_64& rng, int dim) {
    const ComplexMatrix x = random_matrix(rng, dim);
    ComplexMatrix rho = matmul(x, adjoint(x));
    rho *= cd(1.0) / trace(rho);
    // enforce exact Hermiticity against rounding in the product
    ComplexMatrix sym = cd(0.5) * (rho + adjoint(rho));
    return sym;
}

inline SystemModel random_model(std::mt19937_64& rng, int dim) {
    return custom_model(random_hermitian(rng, dim), random_hermitian(rng, dim),
                        random_density(rng, dim));
}

// Synthetic Hermitian-symmetric bath table, entries of magnitude ~ scale.
inline BathTable random_table(std::mt19937_64& rng, double dt, int max_offset,
                              double scale = 0.3, int k_max = 0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cd> values(static_cast<std::size_t>(max_offset) + 1);
    values[0] = cd(scale * u(rng), 0.0); // equal-time value is real
    for (int d = 1; d <= max_offset; ++d)
        values[static_cast<std::size_t>(d)] = scale * cd(u(rng), u(rng));
    return BathTable::from_values(dt, k_max, values);
}

} // namespace frods::testing
