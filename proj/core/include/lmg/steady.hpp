#pragma once

// Stationary states of a Liouvillian and the fixed-step time-evolution
// oracle used to validate them.

#include "lmg/liouvillian.hpp"
#include "lmg/types.hpp"

namespace lmg {

enum class SolverKind { direct_nullspace, shifted_inverse, time_evolution };

struct SteadyStateResult {
    DensityMatrix rho;
    double residual = 0.0;  // ||L vec(rho)||_inf after hermitization
    int nullspace_dim = 0;
    SolverKind solver = SolverKind::direct_nullspace;
};

// Computes the kernel of L, hermitizes via rho <- (rho + rho^dagger)/2 and
// normalizes the trace. Dense path (d <= kDenseDimLimit): full SVD; the
// nullspace dimension is the count of singular values below 1e-9 * sigma_max.
// Sparse path: inverse iteration at shift 0 on the trace-deflated operator
// M = L + vec(I) vec(I)^dagger / d, whose solve against vec(I)/d lands
// exactly on the stationary state when the kernel is one-dimensional; a
// second deflated iteration from a fixed pseudorandom start probes for a
// further kernel direction. Results are accepted only when nullspace_dim = 1
// and the residual is at most 1e-8 * ||L||; otherwise this throws
// degenerate_steady_state or numeric_error.
SteadyStateResult solve_steady_state(const SuperOperator& liouvillian);

struct EvolveStats {
    long trace_corrections = 0;
    double max_trace_drift = 0.0;
};

// Classical fixed-step RK4 on vec(rho). Requires dt <= 0.1 / ||L|| (spectral
// norm bound). The trace is renormalized whenever |Tr - 1| exceeds 1e-12 and
// each correction is recorded; a growing solution (||rho||_max > 10) aborts
// with step_size_error.
DensityMatrix evolve(const DensityMatrix& rho0, const SuperOperator& liouvillian,
                     double t_final, double dt, EvolveStats* stats = nullptr);

double purity(const DensityMatrix& rho);

struct DensityMatrixCheck {
    double hermiticity_error;  // max |rho - rho^dagger|
    double trace_error;        // |Tr - 1|
    double min_eigenvalue;
    bool valid;                // hermitian to 1e-10, trace to 1e-10, min eig >= -1e-8
};

DensityMatrixCheck check_density_matrix(const DensityMatrix& rho);

// Reporting helper only: projects negative eigenvalues (within the accepted
// -1e-8 tolerance) to zero and renormalizes. Solvers never call this.
DensityMatrix clamp_positive(const DensityMatrix& rho);

}  // namespace lmg
