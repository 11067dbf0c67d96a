#include "frods/dyson.hpp"

#include "frods/wick.hpp"

#include <array>
#include <sstream>
#include <stdexcept>

namespace frods {

namespace {

struct StepFactors {
    ComplexMatrix f0, f1, f2; // E (-i dt W)^j / j! E for j = 0, 1, 2
};

StepFactors step_factors(const ClosedSystem& sys) {
    const cd i_unit(0.0, 1.0);
    const ComplexMatrix half = herm_exp(sys.h0, -i_unit * (0.5 * sys.dt));
    StepFactors f;
    f.f0 = matmul(half, half);
    f.f1 = (-i_unit * sys.dt) * matmul(matmul(half, sys.w), half);
    f.f2 = cd(-0.5 * sys.dt * sys.dt) * matmul(matmul(half, matmul(sys.w, sys.w)), half);
    return f;
}

void check_oracle_cap(int n, int cap, const char* who) {
    if (n < 0 || n > cap) {
        std::ostringstream msg;
        msg << who << ": n = " << n << " exceeds the oracle cap " << cap;
        throw std::invalid_argument(msg.str());
    }
}

const ComplexMatrix& pick(const PropagatorSet& p, int j, bool daggered) {
    switch (j) {
        case 0: return daggered ? p.p0d : p.p0;
        case 1: return daggered ? p.p1d : p.p1;
        default: return daggered ? p.p2d : p.p2;
    }
}

ComplexMatrix tuple_product(const SystemModel& model, const PropagatorSet& props,
                            const std::vector<int>& j, int n) {
    ComplexMatrix acc = model.rho0;
    for (int k = 0; k < n; ++k) acc = matmul(pick(props, j[k], false), acc);
    for (int k = 0; k < n; ++k) acc = matmul(acc, pick(props, j[n + k], true));
    return acc;
}

cd tuple_influence(const std::vector<int>& j, int n, const BathTable& table) {
    std::vector<int> j_minus(n), j_plus(n);
    for (int k = 0; k < n; ++k) {
        j_minus[k] = j[n - 1 - k]; // outermost-first
        j_plus[k] = j[n + k];      // innermost-first
    }
    return influence_lattice(j_minus, j_plus, table, 4 * n);
}

} // namespace

ComplexMatrix closed_un(const ClosedSystem& sys, int n, bool pruned) {
    if (n < 0) throw std::invalid_argument("closed_un: n must be >= 0");
    if (sys.order != 1 && sys.order != 2) throw std::invalid_argument("closed_un: order must be 1 or 2");
    const StepFactors f = step_factors(sys);
    const int dim = sys.h0.dim();

    if (sys.order == 1 || pruned) {
        // Order 1: (f0+f1)^n. Pruned order 2 adds the single-f2 strings:
        //   B_n = (f0+f1) B_{n-1} + f2 (f0+f1)^{n-1}.
        const ComplexMatrix base = f.f0 + f.f1;
        ComplexMatrix s = ComplexMatrix::identity(dim); // base^k
        ComplexMatrix b(dim);
        for (int k = 1; k <= n; ++k) {
            if (sys.order == 2) b = matmul(base, b) + matmul(f.f2, s);
            s = matmul(base, s);
        }
        return sys.order == 2 ? s + b : s;
    }

    const ComplexMatrix base = f.f0 + f.f1 + f.f2;
    ComplexMatrix s = ComplexMatrix::identity(dim);
    for (int k = 0; k < n; ++k) s = matmul(base, s);
    return s;
}

ComplexMatrix direct_rho_first(const SystemModel& model, const PropagatorSet& props,
                               const BathTable& table, int n, int cap) {
    check_oracle_cap(n, cap, "direct_rho_first");
    ComplexMatrix sum(model.dim);
    std::vector<int> j(static_cast<std::size_t>(2 * n), 0);
    // Count in base 2 over (j_1-,...,j_n-, j_1+,...,j_n+).
    while (true) {
        int total = 0;
        for (int v : j) total += v;
        if (total % 2 == 0) {
            const cd lb = tuple_influence(j, n, table);
            if (lb != cd(0.0)) sum += lb * tuple_product(model, props, j, n);
        }
        int pos = 0;
        while (pos < 2 * n && j[pos] == 1) j[pos++] = 0;
        if (pos == 2 * n) break;
        j[pos] = 1;
    }
    return sum;
}

ComplexMatrix direct_rho_second(const SystemModel& model, const PropagatorSet& props,
                                const BathTable& table, int n, bool pruned, int cap) {
    check_oracle_cap(n, cap, "direct_rho_second");
    ComplexMatrix sum(model.dim);
    std::vector<int> j(static_cast<std::size_t>(2 * n), 0);
    while (true) {
        int total = 0;
        int twos = 0;
        for (int v : j) {
            total += v;
            twos += (v == 2);
        }
        if (total % 2 == 0 && (!pruned || twos <= 1)) {
            const cd lb = tuple_influence(j, n, table);
            if (lb != cd(0.0)) sum += lb * tuple_product(model, props, j, n);
        }
        int pos = 0;
        while (pos < 2 * n && j[pos] == 2) j[pos++] = 0;
        if (pos == 2 * n) break;
        ++j[pos];
    }
    return sum;
}

} // namespace frods
