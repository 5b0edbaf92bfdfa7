#include "doctest.h"

#include <cmath>

#include "lmg/errors.hpp"
#include "lmg/spin_ops.hpp"
#include "test_common.hpp"

using namespace lmg;

TEST_CASE("basis enumerates m from +j down to -j") {
    Basis b = build_basis(4);
    CHECK(b.n_spins == 4);
    CHECK(b.j == doctest::Approx(2.0));
    CHECK(b.dim == 5);
    REQUIRE(b.m_values.size() == 5);
    for (int k = 0; k < 5; ++k)
        CHECK(b.m_values[k] == doctest::Approx(2.0 - k));

    Basis one = build_basis(1);
    CHECK(one.dim == 2);
    CHECK(one.m_values[0] == doctest::Approx(0.5));
    CHECK(one.m_values[1] == doctest::Approx(-0.5));

    CHECK_THROWS_AS(build_basis(0), invalid_argument);
    CHECK_THROWS_AS(build_basis(-3), invalid_argument);
}

TEST_CASE("ladder amplitudes and commutators") {
    Basis b = build_basis(7);
    Operator jp = build_jplus(b);
    Operator jm = build_jminus(b);
    Operator jz = build_jz(b);

    // J+ acting on |j,m> lands on |j,m+1>, one row up.
    for (int k = 1; k < b.dim; ++k) {
        double m = b.m_values[k];
        double amp = std::sqrt(b.j * (b.j + 1) - m * (m + 1));
        CHECK(std::abs(jp(k - 1, k) - amp) < 1e-14);
    }

    CHECK(lmgtest::max_abs_diff(jm, jp.adjoint()) == 0.0);

    Operator c1 = jz * jp - jp * jz;  // = +J+
    Operator c2 = jz * jm - jm * jz;  // = -J-
    Operator c3 = jp * jm - jm * jp;  // = 2 Jz
    CHECK(lmgtest::max_abs_diff(c1, jp) < 1e-13);
    CHECK(lmgtest::max_abs_diff(c2, -jm) < 1e-13);
    CHECK(lmgtest::max_abs_diff(c3, 2.0 * jz) < 1e-13);
}

TEST_CASE("total spin is the Casimir j(j+1)") {
    Basis b = build_basis(6);
    Operator jx = build_jx(b);
    Operator jy = build_jy(b);
    Operator jz = build_jz(b);
    Operator j2 = build_j_squared(b);

    Operator sum = jx * jx + jy * jy + jz * jz;
    CHECK(lmgtest::max_abs_diff(sum, j2) < 1e-12);

    double casimir = b.j * (b.j + 1);
    Operator expect = casimir * Operator::Identity(b.dim, b.dim);
    CHECK(lmgtest::max_abs_diff(j2, expect) < 1e-12);
}

TEST_CASE("N=2 ladder matches sqrt(2)") {
    Basis b = build_basis(2);
    Operator jp = build_jplus(b);
    CHECK(std::abs(jp(0, 1) - std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(jp(1, 2) - std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(jp(0, 2)) == 0.0);
}

TEST_CASE("parity projectors split the basis into alternating sectors") {
    for (int n : {2, 3, 8, 15}) {
        Basis b = build_basis(n);
        Operator pp = build_parity_projector(b, +1);
        Operator pm = build_parity_projector(b, -1);
        Operator id = Operator::Identity(b.dim, b.dim);

        CHECK(lmgtest::max_abs_diff(pp + pm, id) == 0.0);
        CHECK(lmgtest::max_abs(pp * pm) == 0.0);
        CHECK(lmgtest::max_abs_diff(pp * pp, pp) == 0.0);

        for (int k = 0; k < b.dim; ++k) {
            int even = ((n - k) % 2 == 0) ? 1 : 0;
            CHECK(pp(k, k).real() == doctest::Approx(even));
            CHECK(pm(k, k).real() == doctest::Approx(1 - even));
        }
    }
    CHECK_THROWS_AS(build_parity_projector(build_basis(3), 0), invalid_argument);
}

TEST_CASE("expectation agrees with the direct trace") {
    Basis b = build_basis(5);
    Operator op = lmgtest::random_hermitian(b.dim, 11u);
    DensityMatrix rho = lmgtest::random_density(b.dim, 12u);

    cxd direct = (op * rho).trace();
    cxd fast = expectation(op, rho);
    CHECK(std::abs(direct - fast) < 1e-13);

    DensityMatrix wrong = lmgtest::random_density(b.dim + 1, 13u);
    CHECK_THROWS_AS(expectation(op, wrong), dimension_mismatch);
}
