#pragma once

// Closed-system side of the model: Hamiltonian, spectrum with parity labels,
// ground-state energy curves with finite-difference derivatives, and the
// density of states.

#include <utility>
#include <vector>

#include "lmg/model.hpp"
#include "lmg/spin_ops.hpp"
#include "lmg/types.hpp"

namespace lmg {

struct Spectrum {
    Eigen::VectorXd energies;   // ascending
    Eigen::MatrixXcd states;    // orthonormal eigenvectors, one per column
    std::vector<int> parities;  // +1 / -1, or 0 when the expectation is mixed
};

struct DensityOfStates {
    std::vector<double> bin_centers;
    std::vector<double> density;  // normalized so sum(density)*bin_width = 1
    double bin_width;
};

// H = -h J_z - (gamma_x / N) J_x^2.
Operator build_hamiltonian(const ModelParams& params, const Basis& basis);

// Full eigendecomposition with parity labels. A state is labeled +1 (-1)
// when <v|P+|v> (<v|P-|v>) exceeds 1 - 1e-8; otherwise the label is 0,
// flagged rather than guessed. Near-degenerate doublets in the broken phase
// legitimately produce mixed eigenvectors, so 0 is an expected outcome there.
Spectrum diagonalize(const Operator& hamiltonian);

// e0 = E0 / N per grid point. The grid must be ascending, uniformly spaced,
// with at least 5 points.
std::vector<std::pair<double, double>> ground_state_energy_curve(
    int n_spins, double h, const std::vector<double>& gamma_grid);

// Finite differences on a uniformly sampled series: central differences in
// the interior, one-sided stencils of matching order at the edges. order is
// 1 or 2; step is the grid spacing.
std::vector<double> finite_difference(const std::vector<double>& series,
                                      double step, int order);

// Histogram of eigenvalues over [min, max] with equal bins, normalized to
// unit integral. Bins are half-open [lo, hi) except the last, which includes
// the upper edge. n_bins >= 10; a degenerate range is an error.
DensityOfStates density_of_states(const Eigen::VectorXd& energies, int n_bins);

}  // namespace lmg
