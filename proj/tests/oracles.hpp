// Test-only reference implementations, kept independent of the library code
// paths they are used to check.

#pragma once

#include "frods/bath.hpp"
#include "frods/dyson.hpp"
#include "frods/matrix.hpp"
#include "frods/system.hpp"
#include "frods/wick.hpp"

#include <stdexcept>
#include <vector>

namespace frods::testing {

// Tuple-by-tuple enumeration of the closed-system discrete series, counting
// in base 2 or 3, with the desk-scale cap.
inline ComplexMatrix closed_un_enumerated(const ClosedSystem& sys, int n, bool pruned,
                                          int cap = 14) {
    if (n < 0 || n > cap) throw std::invalid_argument("closed_un_enumerated: n beyond cap");
    const cd i_unit(0.0, 1.0);
    const ComplexMatrix half = herm_exp(sys.h0, -i_unit * (0.5 * sys.dt));
    const ComplexMatrix f0 = matmul(half, half);
    const ComplexMatrix f1 = (-i_unit * sys.dt) * matmul(matmul(half, sys.w), half);
    const ComplexMatrix f2 =
        cd(-0.5 * sys.dt * sys.dt) * matmul(matmul(half, matmul(sys.w, sys.w)), half);
    const int base = sys.order == 1 ? 2 : 3;

    ComplexMatrix sum(sys.h0.dim());
    std::vector<int> j(static_cast<std::size_t>(n), 0);
    while (true) {
        int twos = 0;
        for (int v : j) twos += (v == 2);
        if (!pruned || twos <= 1) {
            ComplexMatrix acc = ComplexMatrix::identity(sys.h0.dim());
            for (int k = 0; k < n; ++k) {
                const ComplexMatrix& f = j[static_cast<std::size_t>(k)] == 0   ? f0
                                         : j[static_cast<std::size_t>(k)] == 1 ? f1
                                                                               : f2;
                acc = matmul(f, acc); // factor j_k applied after j_{k-1}
            }
            sum += acc;
        }
        std::size_t pos = 0;
        while (pos < j.size() && j[pos] == base - 1) j[pos++] = 0;
        if (pos == j.size()) break;
        ++j[pos];
    }
    return sum;
}

// Lattice point on one branch of the midpoint lattice.
struct Point {
    int branch; // -1 or +1
    int k;      // step index >= 1
};

inline double point_time(const Point& p, double dt) {
    return p.branch * (p.k - 0.5) * dt;
}

// Table value of an arc between two lattice points, (earlier, later) order.
inline cd pair_value(const BathTable& table, Point a, Point b) {
    if (point_time(b, table.dt()) < point_time(a, table.dt())) std::swap(a, b);
    return table.value(a.k - b.k);
}

// Influence of a set of lattice points evaluated through the raw pairing
// routine over real times, with arc values read back from the table.
inline cd influence_points(const std::vector<Point>& pts, const BathTable& table) {
    TimeList times;
    for (const Point& p : pts) {
        if (p.branch < 0) times.left.push_back(point_time(p, table.dt()));
        else times.right.push_back(point_time(p, table.dt()));
    }
    std::sort(times.left.begin(), times.left.end());
    std::sort(times.right.begin(), times.right.end());
    const double dt = table.dt();
    return influence(times, [&](double t1, double t2) {
        const int d = static_cast<int>(std::lround((std::abs(t1) - std::abs(t2)) / dt));
        return table.value(d);
    });
}

// Combined-coefficient evaluation for a tuple with exactly one double
// insertion: the double either closes on itself, or connects to two distinct
// single insertions with an explicit factor 2.
inline cd influence_combined_single_double(const std::vector<int>& j_minus,
                                           const std::vector<int>& j_plus,
                                           const BathTable& table) {
    std::vector<Point> ones;
    Point two{0, 0};
    int twos = 0;
    const int nl = static_cast<int>(j_minus.size());
    for (int i = 0; i < nl; ++i) {
        const Point p{-1, nl - i};
        if (j_minus[static_cast<std::size_t>(i)] == 1) ones.push_back(p);
        if (j_minus[static_cast<std::size_t>(i)] == 2) {
            two = p;
            ++twos;
        }
    }
    for (std::size_t i = 0; i < j_plus.size(); ++i) {
        const Point p{+1, static_cast<int>(i) + 1};
        if (j_plus[i] == 1) ones.push_back(p);
        if (j_plus[i] == 2) {
            two = p;
            ++twos;
        }
    }
    if (twos != 1)
        throw std::invalid_argument("influence_combined_single_double: need exactly one 2");

    cd total = table.value(0) * influence_points(ones, table); // self-closed double
    for (std::size_t a = 0; a < ones.size(); ++a) {
        for (std::size_t b = a + 1; b < ones.size(); ++b) {
            std::vector<Point> rest;
            for (std::size_t i = 0; i < ones.size(); ++i)
                if (i != a && i != b) rest.push_back(ones[i]);
            total += 2.0 * pair_value(table, two, ones[a]) * pair_value(table, two, ones[b]) *
                     influence_points(rest, table);
        }
    }
    return total;
}

// Hand-transcribed one-step densities.
inline ComplexMatrix rho1_first_order(const SystemModel& m, const PropagatorSet& p,
                                      const BathTable& t) {
    return matmul(matmul(p.p0, m.rho0), p.p0d) + t.value(0) * matmul(matmul(p.p1, m.rho0), p.p1d);
}

inline ComplexMatrix rho1_second_order_pruned(const SystemModel& m, const PropagatorSet& p,
                                              const BathTable& t) {
    const cd b0 = t.value(0);
    return matmul(matmul(p.p0, m.rho0), p.p0d) + b0 * matmul(matmul(p.p1, m.rho0), p.p1d) +
           b0 * matmul(matmul(p.p2, m.rho0), p.p0d) + b0 * matmul(matmul(p.p0, m.rho0), p.p2d);
}

// Hand-transcribed ten-term two-step density of the first-order expansion.
inline ComplexMatrix rho2_first_order(const SystemModel& m, const PropagatorSet& p,
                                      const BathTable& t) {
    const ComplexMatrix& r = m.rho0;
    auto term = [&](const ComplexMatrix& l2, const ComplexMatrix& l1, const ComplexMatrix& r1,
                    const ComplexMatrix& r2, cd w) {
        return w * matmul(matmul(matmul(l2, l1), r), matmul(r1, r2));
    };
    const cd b_1p2p = t.value(-1), b_1m2p = t.value(-1), b_2m2p = t.value(0);
    const cd b_1m1p = t.value(0), b_2m1p = t.value(1), b_2m1m = t.value(1);
    ComplexMatrix sum = term(p.p0, p.p0, p.p0d, p.p0d, 1.0);
    sum += term(p.p0, p.p0, p.p1d, p.p1d, b_1p2p);
    sum += term(p.p0, p.p1, p.p0d, p.p1d, b_1m2p);
    sum += term(p.p1, p.p0, p.p0d, p.p1d, b_2m2p);
    sum += term(p.p0, p.p1, p.p1d, p.p0d, b_1m1p);
    sum += term(p.p1, p.p0, p.p1d, p.p0d, b_2m1p);
    sum += term(p.p1, p.p1, p.p0d, p.p0d, b_2m1m);
    sum += term(p.p1, p.p1, p.p1d, p.p1d, b_1p2p * b_2m1m);
    sum += term(p.p1, p.p1, p.p1d, p.p1d, b_1m2p * b_2m1p);
    sum += term(p.p1, p.p1, p.p1d, p.p1d, b_2m2p * b_1m1p);
    return sum;
}

} // namespace frods::testing
