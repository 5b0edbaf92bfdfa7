#pragma once

// Thermodynamic-limit analysis: Bloch-vector flow, fixed points and their
// stability, the critical coupling, and the bifurcation scan.
//
// The flow is
//   X' = h Y - (kappa/2) Z X
//   Y' = -h X + gamma_x Z X - (kappa/2) Z Y
//   Z' = -gamma_x X Y + (kappa/2)(X^2 + Y^2)
// which conserves X^2 + Y^2 + Z^2 identically. Because of that conservation
// the ambient 3x3 Jacobian at every fixed point carries a structural zero
// eigenvalue along the radius; stability is therefore classified from the
// Jacobian restricted to the sphere's tangent plane (two eigenvalues), while
// the three ambient eigenvalues are still reported.

#include <array>
#include <complex>
#include <vector>

#include "lmg/model.hpp"
#include "lmg/types.hpp"

namespace lmg {

struct MeanFieldState {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

enum class Stability { stable, unstable, marginal };

struct FixedPoint {
    MeanFieldState state;
    Stability stability;
    std::array<std::complex<double>, 3> eigenvalues;  // ambient Jacobian
    double re_lambda_max;  // largest real part over the tangent-plane pair
};

MeanFieldState mf_rhs(const MeanFieldState& s, const ModelParams& params);

Eigen::Matrix3d mf_jacobian(const MeanFieldState& s, const ModelParams& params);

// Eigenvalues of the Jacobian projected onto the tangent plane at s
// (s must be nonzero).
std::array<std::complex<double>, 2> mf_tangent_eigenvalues(
    const MeanFieldState& s, const ModelParams& params);

// unstable when any tangent real part exceeds +1e-10, stable when both lie
// below -1e-10, marginal otherwise (a borderline-zero direction).
FixedPoint classify_fixed_point(const MeanFieldState& s, const ModelParams& params);

// The north pole (0,0,1) always; for gamma_x >= kappa additionally the
// symmetry-broken pair
//   B = sqrt(gamma_x^2 - kappa^2), Z = (2h/kappa^2)(gamma_x - B),
//   X = +-(1/(sqrt2 kappa)) sqrt(A- + (B/gamma_x) A+), A+- = kappa^2 +- 4h^2,
//   Y = (kappa/2h) X Z
// whenever X is real (equivalently gamma_x above the critical coupling); the
// kappa = 0 limit uses the closed-system pair Z = h/gamma_x,
// X = +-sqrt(1 - h^2/gamma_x^2), Y = 0.
std::vector<FixedPoint> mf_fixed_points(const ModelParams& params);

// h + kappa^2 / (4h); requires h > 0.
double mf_critical_coupling(const ModelParams& params);

// Bisection on the largest tangent-eigenvalue real part at the north pole.
double mf_bisect_critical(const ModelParams& params, double gamma_lo,
                          double gamma_hi, int iterations = 80);

// Fixed-step RK4 on the sphere. The trajectory is returned downsampled to at
// most max_samples points (first and last always included). Norm drift
// beyond 1e-6 aborts with step_size_error.
std::vector<MeanFieldState> mf_integrate(const MeanFieldState& s0,
                                         const ModelParams& params,
                                         double t_final, double dt,
                                         int max_samples = 4097);

struct BranchPoint {
    double gamma_x;
    int branch_id;  // 0 north pole, 1/2 broken pair (+X first), 3+ extra roots
    MeanFieldState state;
    Stability stability;
    double re_lambda_max;
};

// Per-grid-point root inventory: the closed-form points plus every root a
// Newton search from a seed lattice on the sphere converges to (this is what
// surfaces the always-present south pole, which the closed-form list omits).
std::vector<BranchPoint> mf_bifurcation_scan(const ModelParams& params,
                                             const std::vector<double>& gamma_grid);

}  // namespace lmg
