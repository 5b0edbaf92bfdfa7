#include "doctest.h"

#include <cmath>
#include <random>

#include "lmg/errors.hpp"
#include "lmg/mean_field.hpp"
#include "lmg/model.hpp"
#include "test_common.hpp"

using namespace lmg;

namespace {

ModelParams mf_params(double h, double kappa, double gamma_x) {
    ModelParams p;
    p.n_spins = 2;  // irrelevant to the thermodynamic-limit flow
    p.h = h;
    p.kappa = kappa;
    p.gamma_x = gamma_x;
    return p;
}

double norm3(const MeanFieldState& s) {
    return std::sqrt(s.x * s.x + s.y * s.y + s.z * s.z);
}

double dist3(const MeanFieldState& a, const MeanFieldState& b) {
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                     (a.z - b.z) * (a.z - b.z));
}

}  // namespace

TEST_CASE("flow conserves the spin length pointwise") {
    std::mt19937_64 rng(404u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        MeanFieldState s{gauss(rng), gauss(rng), gauss(rng)};
        ModelParams p = mf_params(1.0, std::abs(gauss(rng)), std::abs(gauss(rng)));
        MeanFieldState f = mf_rhs(s, p);
        double radial = s.x * f.x + s.y * f.y + s.z * f.z;
        CHECK(std::abs(radial) < 1e-13 * (1.0 + norm3(s) * norm3(s)));
    }
}

TEST_CASE("flow commutes with the parity flip (X,Y) -> (-X,-Y)") {
    MeanFieldState s{0.4, -0.3, 0.7};
    ModelParams p = mf_params(1.0, 0.3, 1.7);
    MeanFieldState f = mf_rhs(s, p);
    MeanFieldState sm{-s.x, -s.y, s.z};
    MeanFieldState fm = mf_rhs(sm, p);
    CHECK(fm.x == doctest::Approx(-f.x).epsilon(1e-14));
    CHECK(fm.y == doctest::Approx(-f.y).epsilon(1e-14));
    CHECK(fm.z == doctest::Approx(f.z).epsilon(1e-14));
}

TEST_CASE("jacobian matches a numerical derivative") {
    MeanFieldState s{0.3, 0.5, -0.6};
    ModelParams p = mf_params(1.0, 0.2, 1.4);
    Eigen::Matrix3d jac = mf_jacobian(s, p);

    const double eps = 1e-6;
    auto column = [&](int k) {
        MeanFieldState lo = s, hi = s;
        double* fields_hi[3] = {&hi.x, &hi.y, &hi.z};
        double* fields_lo[3] = {&lo.x, &lo.y, &lo.z};
        *fields_hi[k] += eps;
        *fields_lo[k] -= eps;
        MeanFieldState fh = mf_rhs(hi, p), fl = mf_rhs(lo, p);
        return Eigen::Vector3d((fh.x - fl.x) / (2 * eps), (fh.y - fl.y) / (2 * eps),
                               (fh.z - fl.z) / (2 * eps));
    };
    for (int k = 0; k < 3; ++k)
        CHECK((jac.col(k) - column(k)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("broken-symmetry fixed points satisfy the flow equations") {
    std::mt19937_64 rng(505u);
    std::uniform_real_distribution<double> uh(0.5, 2.0), uk(0.01, 0.8);
    int visited = 0;
    for (int trial = 0; trial < 100; ++trial) {
        double h = uh(rng), kappa = uk(rng);
        double gcr = h + kappa * kappa / (4 * h);
        std::uniform_real_distribution<double> ug(gcr + 0.05, 4.0);
        ModelParams p = mf_params(h, kappa, ug(rng));
        auto points = mf_fixed_points(p);
        for (const auto& fp : points) {
            MeanFieldState f = mf_rhs(fp.state, p);
            CHECK(std::abs(f.x) < 1e-10);
            CHECK(std::abs(f.y) < 1e-10);
            CHECK(std::abs(f.z) < 1e-10);
            CHECK(std::abs(norm3(fp.state) - 1.0) < 1e-8);
        }
        if (points.size() >= 3) ++visited;
    }
    CHECK(visited == 100);  // above threshold the pair always exists
}

TEST_CASE("fixed point branch values at the reference point") {
    // kappa = 0.05h, gamma_x = 2h: Z = (2h/kappa^2)(gamma - sqrt(gamma^2-kappa^2)).
    ModelParams p = mf_params(1.0, 0.05, 2.0);
    auto points = mf_fixed_points(p);
    REQUIRE(points.size() == 3);

    CHECK(points[0].state.z == doctest::Approx(1.0));
    CHECK(points[0].stability == Stability::unstable);

    const double B = std::sqrt(4.0 - 0.0025);
    const double z_ref = (2.0 / 0.0025) * (2.0 - B);
    CHECK(z_ref == doctest::Approx(0.5000781494236034).epsilon(1e-12));
    for (int k : {1, 2}) {
        CHECK(points[k].state.z == doctest::Approx(z_ref).epsilon(1e-9));
        CHECK(points[k].stability == Stability::stable);
    }
    CHECK(points[1].state.x == doctest::Approx(-points[2].state.x).epsilon(1e-12));
    CHECK(points[1].state.x == doctest::Approx(0.8659126115645293).epsilon(1e-9));
    CHECK(points[1].state.y == doctest::Approx(0.0108255994088437).epsilon(1e-7));

    // Below threshold only the pole survives and it is stable.
    auto low = mf_fixed_points(mf_params(1.0, 0.05, 0.5));
    REQUIRE(low.size() == 1);
    CHECK(low[0].stability == Stability::stable);
}

TEST_CASE("undamped limit reduces to the closed-model pitchfork") {
    auto points = mf_fixed_points(mf_params(1.0, 0.0, 2.0));
    REQUIRE(points.size() == 3);
    CHECK(points[1].state.z == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(points[1].state.x ==
          doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));
    CHECK(points[1].state.y == doctest::Approx(0.0));

    auto below = mf_fixed_points(mf_params(1.0, 0.0, 0.9));
    CHECK(below.size() == 1);
}

TEST_CASE("critical coupling closed form and bisection agree") {
    CHECK(mf_critical_coupling(mf_params(1.0, 0.0, 0.0)) == doctest::Approx(1.0));
    CHECK(mf_critical_coupling(mf_params(1.0, 0.05, 0.0)) ==
          doctest::Approx(1.000625).epsilon(1e-15));
    CHECK(mf_critical_coupling(mf_params(1.0, 2.0, 0.0)) ==
          doctest::Approx(2.0).epsilon(1e-15));

    for (double kappa : {0.05, 0.5, 1.0}) {
        ModelParams p = mf_params(1.0, kappa, 0.0);
        double closed = mf_critical_coupling(p);
        double found = mf_bisect_critical(p, 0.5, 3.0);
        CHECK(std::abs(found - closed) <= 1e-6);
    }
    CHECK_THROWS_AS(mf_bisect_critical(mf_params(1.0, 0.05, 0.0), 2.0, 3.0),
                    invalid_argument);
}

TEST_CASE("tangent eigenvalues at the pole follow the closed form") {
    // -kappa/2 +/- sqrt(h(gamma - h)) for gamma > h.
    ModelParams p = mf_params(1.0, 0.05, 1.5);
    MeanFieldState north{0.0, 0.0, 1.0};
    auto lam = mf_tangent_eigenvalues(north, p);
    double re_hi = std::max(lam[0].real(), lam[1].real());
    double re_lo = std::min(lam[0].real(), lam[1].real());
    CHECK(re_hi == doctest::Approx(-0.025 + std::sqrt(0.5)).epsilon(1e-12));
    CHECK(re_lo == doctest::Approx(-0.025 - std::sqrt(0.5)).epsilon(1e-12));

    // Exactly at threshold the leading tangent direction is marginal.
    ModelParams pc = mf_params(1.0, 0.05, 1.000625);
    FixedPoint fp = classify_fixed_point(north, pc);
    CHECK(fp.stability == Stability::marginal);
    CHECK(std::abs(fp.re_lambda_max) <= 1e-10);
}

TEST_CASE("free precession closes after a Larmor period") {
    ModelParams p = mf_params(1.0, 0.0, 0.0);
    MeanFieldState s0{1.0, 0.0, 0.0};
    auto path = mf_integrate(s0, p, 2.0 * M_PI, 1e-3);
    REQUIRE(!path.empty());
    CHECK(dist3(path.back(), s0) < 1e-6);
}

TEST_CASE("trajectories relax onto the stable fixed points") {
    // Below threshold: decay back to the pole.
    ModelParams low = mf_params(1.0, 0.05, 0.5);
    MeanFieldState tilted{std::sin(0.1), 0.0, std::cos(0.1)};
    auto back = mf_integrate(tilted, low, 600.0, 1e-3);
    CHECK(dist3(back.back(), MeanFieldState{0.0, 0.0, 1.0}) < 1e-6);

    // Above threshold: the pole repels and an A2 point collects the flow.
    ModelParams high = mf_params(1.0, 0.05, 2.0);
    MeanFieldState nudged{1e-3, 0.0, std::sqrt(1.0 - 1e-6)};
    auto away = mf_integrate(nudged, high, 1000.0, 1e-3);
    auto points = mf_fixed_points(high);
    REQUIRE(points.size() == 3);
    double reach = std::min(dist3(away.back(), points[1].state),
                            dist3(away.back(), points[2].state));
    CHECK(dist3(away.back(), points[0].state) > 0.5);
    CHECK(reach < 1e-4);
}

TEST_CASE("undamped flow conserves the classical energy") {
    // E = -h Z - (gamma/2) X^2 along kappa = 0 trajectories.
    ModelParams p = mf_params(1.0, 0.0, 1.5);
    MeanFieldState s0{0.6, 0.0, 0.8};
    auto path = mf_integrate(s0, p, 50.0, 1e-3, 2001);
    double e0 = -s0.z - 0.75 * s0.x * s0.x;
    for (const auto& s : path) {
        double e = -s.z - 0.75 * s.x * s.x;
        CHECK(std::abs(e - e0) < 1e-8);
    }
}

TEST_CASE("integrator guards its preconditions") {
    ModelParams p = mf_params(1.0, 0.0, 0.0);
    MeanFieldState off{0.5, 0.0, 0.0};
    CHECK_THROWS_AS(mf_integrate(off, p, 1.0, 1e-3), invalid_argument);

    MeanFieldState s0{1.0, 0.0, 0.0};
    CHECK_THROWS_AS(mf_integrate(s0, p, 1.0, 0.0), invalid_argument);
    // Oversized steps violate length conservation and abort.
    CHECK_THROWS_AS(mf_integrate(s0, p, 100.0, 0.8), step_size_error);
}

TEST_CASE("bifurcation scan walks the pitchfork") {
    ModelParams p = mf_params(1.0, 0.05, 0.0);
    std::vector<double> grid;
    for (int k = 0; k <= 30; ++k) grid.push_back(0.5 + 0.05 * k);
    auto branches = mf_bifurcation_scan(p, grid);

    const double gcr = 1.000625;
    double prev_z = 2.0;
    for (double g : grid) {
        int stable_here = 0;
        bool saw_south = false;
        double x1 = 0.0, x2 = 0.0, z1 = -2.0;
        for (const auto& bp : branches) {
            if (bp.gamma_x != g) continue;
            if (bp.stability == Stability::stable) ++stable_here;
            if (bp.branch_id == 1) { x1 = bp.state.x; z1 = bp.state.z; }
            if (bp.branch_id == 2) x2 = bp.state.x;
            if (bp.branch_id >= 3 && bp.state.z < -0.9) {
                saw_south = true;
                CHECK(bp.stability == Stability::unstable);
            }
        }
        if (g < gcr) {
            CHECK(stable_here == 1);
        } else if (g > gcr + 1e-9) {
            CHECK(stable_here == 2);
            CHECK(x1 == doctest::Approx(-x2).epsilon(1e-9));
            // Z decreases along the broken branch.
            CHECK(z1 < prev_z + 1e-12);
            prev_z = z1;
        }
        CHECK(saw_south);  // Newton from the seed lattice surfaces the pole
    }

    CHECK_THROWS_AS(mf_bifurcation_scan(p, std::vector<double>{1.0, 0.9}),
                    invalid_argument);
}
