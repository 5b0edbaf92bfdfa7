#pragma once

// Steady-state observables: collective spin moments, the rescaled pairwise
// concurrence for symmetric states, the exact two-qubit oracle it is checked
// against at N = 2, and grid-derivative feature extraction.

#include <vector>

#include "lmg/spin_ops.hpp"
#include "lmg/types.hpp"

namespace lmg {

struct ObservableSet {
    double jz = 0.0;
    double jz_normalized = 0.0;  // jz / j
    double jx2 = 0.0;
    double jy2 = 0.0;
    double jz2 = 0.0;
    double jplus2_abs = 0.0;     // |<J_+^2>|
    double concurrence = 0.0;
    double purity = 0.0;
};

ObservableSet compute_observables(const DensityMatrix& rho, const Basis& basis);

// The printed branch conditions of the concurrence formula are mutually
// inconsistent (their denominators differ by a factor of 2, leaving a gap
// region). Branches here are exhaustive and exclusive on the first form:
// branch 1 iff (N^2 - 4<J_z^2>)/(2N) < B. When the two printed predicates
// disagree on a sample, both branch values are recorded in the diagnostics
// rather than silently picking one.
struct ConcurrenceDiag {
    bool predicates_disagree = false;
    bool used_branch1 = false;
    double branch1 = 0.0;
    double branch2 = 0.0;
};

// Rescaled concurrence from collective moments:
//   S = sqrt[(N(N-2) + 4<J_z^2>)^2 - (4(N-1)<J_z>)^2] / (4N)
//   B = S + |<J_+^2>|/N
//   branch 1: 2 max{0, |<J_+^2>|/N - (<J_x^2>+<J_y^2>)/N + 1/2}
//   branch 2: 2 max{0, N/4 - <J_z^2>/N - S}
// A radicand of S below -1e-10 is a numeric-domain error; values in
// [-1e-10, 0] are clamped to zero.
double concurrence_from_moments(double jz, double jz2, double jx2, double jy2,
                                double jplus2_abs, int n_spins,
                                ConcurrenceDiag* diag = nullptr);

// Same rescaled concurrence evaluated from the state itself. The radicand
// of S factors exactly as
//   [sum_k p_k (N-2m_k)(N-2m_k-2)] * [sum_k p_k (N+2m_k)(N+2m_k-2)]
// with every coefficient a nonnegative even integer, so with the populations
// p_k clamped at zero (reporting-side positivity repair) both factors are
// sums of nonnegative terms and the radicand cannot go negative in floating
// point. Near the fully polarized state the direct moment form loses the
// sign of an exact zero to cancellation; this route does not.
double concurrence(const DensityMatrix& rho, const Basis& basis,
                   ConcurrenceDiag* diag = nullptr);

// Wootters concurrence C = max{0, l1 - l2 - l3 - l4} with l_i the descending
// square roots of the eigenvalues of rho (sy kron sy) rho^* (sy kron sy),
// evaluated as the singular values of sqrt(rho) (sy kron sy) conj(sqrt(rho))
// so that near-zero eigenvalues keep full precision.
double wootters_concurrence(const Eigen::Matrix4cd& rho2);

// Exact isometric embedding of the N = 2 triplet block into the two-qubit
// space: |1,1> = |uu>, |1,0> = (|ud>+|du>)/sqrt(2), |1,-1> = |dd>; the
// singlet stays unpopulated.
Eigen::Matrix4cd embed_two_qubit(const Eigen::Matrix3cd& rho_collective);

struct DerivativeResult {
    std::vector<double> derivative;  // central differences, one-sided edges
    bool has_minimum = false;        // false on a plateau
    double argmin = 0.0;             // quadratically refined when interior
    double min_value = 0.0;
};

// d<J_z>/d(gamma) on a uniform grid plus the location of the derivative
// minimum. Interior minima are refined by the parabola through the three
// surrounding samples; an edge minimum is reported at the grid point.
DerivativeResult sweep_derivative(const std::vector<double>& jz_series,
                                  const std::vector<double>& gamma_grid);

}  // namespace lmg
