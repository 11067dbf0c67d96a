#include "doctest.h"

#include "frods/system.hpp"
#include "helpers.hpp"

#include <cmath>
#include <random>

using namespace frods;

TEST_CASE("spin-boson construction") {
    const SystemModel flip = spin_boson(0.0, 1.0);
    CHECK(flip.h_s(0, 0) == cd(0.0));
    CHECK(flip.h_s(0, 1) == cd(1.0));
    CHECK(flip.h_s(1, 0) == cd(1.0));
    CHECK(flip.h_s(1, 1) == cd(0.0));

    const SystemModel biased = spin_boson(1.0, 0.0);
    CHECK(biased.h_s(0, 0) == cd(1.0));
    CHECK(biased.h_s(1, 1) == cd(-1.0));
    CHECK(biased.h_s(0, 1) == cd(0.0));

    for (const SystemModel& m : {flip, biased}) {
        CHECK(m.w_s(0, 0) == cd(1.0));
        CHECK(m.w_s(1, 1) == cd(-1.0));
        CHECK(m.w_s(0, 1) == cd(0.0));
        CHECK(m.rho0(0, 0) == cd(1.0));
        m.validate();
    }
}

TEST_CASE("multilevel construction") {
    const SystemModel two = multilevel(2, 1.0);
    CHECK(two.w_s(0, 0) == cd(-1.0));
    CHECK(two.w_s(1, 1) == cd(1.0));

    const SystemModel three = multilevel(3, 1.0);
    CHECK(three.h_s(0, 1) == cd(1.0));
    CHECK(three.h_s(1, 0) == cd(1.0));
    CHECK(three.h_s(1, 2) == cd(1.0));
    CHECK(three.h_s(0, 2) == cd(0.0));
    CHECK(three.w_s(0, 0) == cd(-1.0));
    CHECK(three.w_s(1, 1) == cd(0.0));
    CHECK(three.w_s(2, 2) == cd(1.0));

    // coupling eigenvalues form an arithmetic sequence from -1 with step 1/J
    const SystemModel seven = multilevel(7, 0.8);
    const double step = 1.0 / 3.0;
    for (int i = 0; i < 7; ++i)
        CHECK(seven.w_s(i, i).real() == doctest::Approx(-1.0 + i * step).epsilon(1e-15));

    CHECK_THROWS_AS(multilevel(1, 1.0), std::invalid_argument);
}

TEST_CASE("multilevel reflection symmetry") {
    const SystemModel m = multilevel(6, 1.3);
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            CHECK(m.h_s(5 - i, 5 - j) == m.h_s(i, j));
        }
        CHECK(m.w_s(5 - i, 5 - i) == -m.w_s(i, i));
    }
}

TEST_CASE("propagators for trivial inputs") {
    SystemModel free_model = spin_boson(0.3, 0.7);
    free_model.h_s = ComplexMatrix(2); // H = 0
    const PropagatorSet p = build_propagators(free_model, 0.25);
    CHECK(max_abs_diff(p.p0, ComplexMatrix::identity(2)) < 1e-15);
    CHECK(max_abs_diff(p.p1, cd(0.0, -0.25) * free_model.w_s) < 1e-15);

    SystemModel uncoupled = spin_boson(0.3, 0.7);
    uncoupled.w_s = ComplexMatrix(2); // W = 0
    const PropagatorSet q = build_propagators(uncoupled, 0.25);
    CHECK(frob_norm(q.p1) == 0.0);
    CHECK(frob_norm(q.p2) == 0.0);
    CHECK(frob_norm(q.g1) == 0.0);
    CHECK(frob_norm(q.g2) == 0.0);
}

TEST_CASE("half-step factorization p2 = g2*g1") {
    const PropagatorSet p = build_propagators(spin_boson(0.0, 1.0), 0.1);
    CHECK(max_abs_diff(p.p2, matmul(p.g2, p.g1)) < 1e-14);

    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 3; ++trial) {
        const SystemModel m = frods::testing::random_model(rng, 3);
        const PropagatorSet r = build_propagators(m, 0.05 + 0.1 * trial);
        CHECK(max_abs_diff(r.p2, matmul(r.g2, r.g1)) < 1e-13);
    }
}

TEST_CASE("unitary conjugation preserves the trace") {
    std::mt19937_64 rng(22);
    const SystemModel m = frods::testing::random_model(rng, 4);
    const PropagatorSet p = build_propagators(m, 0.2);
    const ComplexMatrix evolved = matmul(matmul(p.p0, m.rho0), p.p0d);
    CHECK(std::abs(trace(evolved) - trace(m.rho0)) < 1e-13);
}

TEST_CASE("model validation rejects bad densities") {
    SystemModel m = spin_boson(0.0, 1.0);
    m.rho0(0, 0) = 0.7; // trace != 1
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}
