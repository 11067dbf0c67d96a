#include "doctest.h"

#include "frods/wick.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace frods;
using frods::testing::random_table;

namespace {

// Smooth deterministic correlation stand-in for raw-time tests.
cd smooth_b(double t1, double t2) {
    return std::exp(cd(0.0, t1 - 2.0 * t2)) + cd(0.0, 0.3) * t1 * t2;
}

} // namespace

TEST_CASE("influence of empty and odd lists") {
    CHECK(influence({}, smooth_b) == cd(1.0));
    TimeList odd;
    odd.left = {-0.3};
    odd.right = {0.1, 0.4};
    CHECK(influence(odd, smooth_b) == cd(0.0));
}

TEST_CASE("influence reproduces the three-pairing expansion") {
    TimeList tl;
    tl.left = {-0.7};
    tl.right = {0.2, 0.5, 0.9};
    const cd want = smooth_b(-0.7, 0.2) * smooth_b(0.5, 0.9) +
                    smooth_b(-0.7, 0.5) * smooth_b(0.2, 0.9) +
                    smooth_b(-0.7, 0.9) * smooth_b(0.2, 0.5);
    CHECK(std::abs(influence(tl, smooth_b) - want) < 1e-14);
}

TEST_CASE("pairing count equals the double factorial") {
    CHECK(pairing_count(2) == 1);
    CHECK(pairing_count(4) == 3);
    CHECK(pairing_count(6) == 15);
    CHECK(pairing_count(12) == 10395);
    // with b == 1 the influence value counts the pairings it visits
    for (int q = 1; q <= 5; ++q) {
        TimeList tl;
        for (int i = 0; i < q; ++i) tl.left.push_back(-1.0 - i);
        for (int i = 0; i < q; ++i) tl.right.push_back(1.0 + i);
        const cd visits = influence(tl, [](double, double) { return cd(1.0); });
        CHECK(visits.real() == doctest::Approx(static_cast<double>(pairing_count(2 * q))));
    }
}

TEST_CASE("influence refuses oversized lists") {
    TimeList tl;
    for (int i = 0; i < 7; ++i) {
        tl.left.push_back(-1.0 - i);
        tl.right.push_back(1.0 + i);
    }
    CHECK_THROWS_AS(influence(tl, smooth_b), std::invalid_argument);
}

TEST_CASE("lattice single-arc and odd cases") {
    std::mt19937_64 rng(31);
    const BathTable t = random_table(rng, 0.1, 6);
    CHECK(influence_lattice({1, 0}, {1, 0}, t) == t.value(1)); // pair (2-, 1+)
    CHECK(influence_lattice({1, 1, 1}, {1, 0, 1}, t) == cd(0.0));
    CHECK(influence_lattice({0, 2}, {1, 0}, t) == cd(0.0));
    CHECK(influence_lattice({}, {}, t) == cd(1.0));
}

TEST_CASE("lattice three-pairing example") {
    std::mt19937_64 rng(32);
    const BathTable t = random_table(rng, 0.1, 6);
    // indices (1,0,1; 0,1,1): arcs (3-,1-)(2+,3+) + (1-,2+)(3-,3+) + (1-,3+)(3-,2+)
    const cd want = t.value(2) * t.value(-1) + t.value(-1) * t.value(0) +
                    t.value(-2) * t.value(1);
    CHECK(std::abs(influence_lattice({1, 0, 1}, {0, 1, 1}, t) - want) < 1e-15);
}

TEST_CASE("double insertion combines with a factor two") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 5; ++trial) {
        const BathTable t = random_table(rng, 0.1, 6);
        // (1,1; 0,2) -> B_{2-,1-} B_{2+,2+} + 2 B_{1-,2+} B_{2-,2+}
        const cd want = t.value(1) * t.value(0) + 2.0 * t.value(-1) * t.value(0);
        const cd got = influence_lattice({1, 1}, {0, 2}, t);
        CHECK(std::abs(got - want) <= 1e-12 * std::abs(want));
    }
}

TEST_CASE("six-term combined expansion of a fifteen-pairing tuple") {
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 5; ++trial) {
        const BathTable t = random_table(rng, 0.1, 6);
        const cd v0 = t.value(0), v1 = t.value(1), vm1 = t.value(-1), vm2 = t.value(-2);
        // (0,2,1; 1,0,2) with coefficients 2, 4, 1, 2, 2, 4
        const cd want = 2.0 * v1 * v1 * v0 + 4.0 * v1 * vm1 * vm2 + v0 * v0 * v0 +
                        2.0 * v0 * vm1 * vm1 + 2.0 * vm2 * v0 * vm2 + 4.0 * vm2 * v1 * vm1;
        const cd got = influence_lattice({0, 2, 1}, {1, 0, 2}, t);
        CHECK(std::abs(got - want) <= 1e-12 * std::abs(want));
    }
}

TEST_CASE("combined-coefficient oracle agrees with raw pairing enumeration") {
    std::mt19937_64 rng(35);
    const BathTable t = random_table(rng, 0.1, 8);
    // every single-double tuple over two and three steps
    for (int n : {2, 3}) {
        std::vector<int> j(static_cast<std::size_t>(2 * n), 0);
        while (true) {
            int total = 0, twos = 0;
            for (int v : j) {
                total += v;
                twos += (v == 2);
            }
            if (twos == 1 && total % 2 == 0) {
                std::vector<int> j_minus(j.begin(), j.begin() + n);
                std::vector<int> j_plus(j.begin() + n, j.end());
                const cd raw = influence_lattice(j_minus, j_plus, t);
                const cd combined =
                    frods::testing::influence_combined_single_double(j_minus, j_plus, t);
                CHECK(std::abs(raw - combined) <=
                      1e-12 * std::max(1.0, std::abs(combined)));
            }
            std::size_t pos = 0;
            while (pos < j.size() && j[pos] == 2) j[pos++] = 0;
            if (pos == j.size()) break;
            ++j[pos];
        }
    }
}

TEST_CASE("mirror conjugation symmetry") {
    std::mt19937_64 rng(36);
    const BathTable t = random_table(rng, 0.1, 8);
    const std::vector<std::pair<std::vector<int>, std::vector<int>>> tuples = {
        {{1, 0, 1}, {0, 1, 1}}, {{0, 2, 1}, {1, 0, 2}}, {{1, 1}, {0, 2}}, {{1, 0}, {1, 0}}};
    for (const auto& [jm, jp] : tuples) {
        std::vector<int> jm2(jp.rbegin(), jp.rend());
        std::vector<int> jp2(jm.rbegin(), jm.rend());
        const cd a = influence_lattice(jm, jp, t);
        const cd b = influence_lattice(jm2, jp2, t);
        CHECK(std::abs(a - std::conj(b)) < 1e-13);
    }
}
