#include "lmg/closed.hpp"

#include <cmath>
#include <string>

#include "lmg/errors.hpp"
#include "lmg/lapack.hpp"

namespace lmg {

namespace {

constexpr double kParityThreshold = 1.0 - 1e-8;

// Grids feeding the derivative stencils must be uniform; tolerance is
// relative to the nominal step.
void require_uniform(const std::vector<double>& grid) {
    if (grid.size() < 2) return;
    const double step = grid[1] - grid[0];
    if (step <= 0.0) {
        throw invalid_argument("grid must be strictly ascending");
    }
    for (size_t i = 1; i + 1 < grid.size(); ++i) {
        const double local = grid[i + 1] - grid[i];
        if (std::abs(local - step) > 1e-9 * std::max(1.0, std::abs(step))) {
            throw invalid_argument("grid spacing is not uniform");
        }
    }
}

}  // namespace

Operator build_hamiltonian(const ModelParams& params, const Basis& basis) {
    validate(params);
    if (basis.n_spins != params.n_spins) {
        throw dimension_mismatch(
            "build_hamiltonian: basis built for N=" +
            std::to_string(basis.n_spins) + " but params have N=" +
            std::to_string(params.n_spins));
    }
    const Operator jx = build_jx(basis);
    Operator h = -params.h * build_jz(basis);
    h.noalias() -= (params.gamma_x / params.n_spins) * (jx * jx);
    return h;
}

Spectrum diagonalize(const Operator& hamiltonian) {
    if (hamiltonian.rows() != hamiltonian.cols()) {
        throw dimension_mismatch("diagonalize: matrix must be square");
    }
    const double herm_err =
        (hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff();
    if (herm_err > 1e-10 * std::max(1.0, hamiltonian.cwiseAbs().maxCoeff())) {
        throw invalid_argument("diagonalize: matrix is not hermitian");
    }

    auto decomp = lapack::eigh(hamiltonian);
    Spectrum spec;
    spec.energies = std::move(decomp.w);
    spec.states = std::move(decomp.v);

    const int dim = static_cast<int>(spec.energies.size());
    const int n_spins = dim - 1;
    spec.parities.resize(dim, 0);
    for (int col = 0; col < dim; ++col) {
        // P+ is diagonal with entry 1 where m + j is even, i.e. N - k even.
        double p_plus = 0.0;
        for (int k = 0; k < dim; ++k) {
            if ((n_spins - k) % 2 == 0) {
                p_plus += std::norm(spec.states(k, col));
            }
        }
        if (p_plus > kParityThreshold) {
            spec.parities[col] = 1;
        } else if (1.0 - p_plus > kParityThreshold) {
            spec.parities[col] = -1;
        }
        // else: mixed expectation, label stays 0 (unlabeled).
    }
    return spec;
}

std::vector<std::pair<double, double>> ground_state_energy_curve(
    int n_spins, double h, const std::vector<double>& gamma_grid) {
    if (gamma_grid.size() < 5) {
        throw invalid_argument(
            "ground_state_energy_curve: need at least 5 grid points");
    }
    require_uniform(gamma_grid);

    const Basis basis = build_basis(n_spins);
    const Operator jz = build_jz(basis);
    const Operator jx = build_jx(basis);
    const Operator jx2 = jx * jx;

    std::vector<std::pair<double, double>> curve;
    curve.reserve(gamma_grid.size());
    for (double gamma : gamma_grid) {
        Operator ham = -h * jz - (gamma / n_spins) * jx2;
        const auto decomp = lapack::eigh(ham);
        curve.emplace_back(gamma, decomp.w(0) / n_spins);
    }
    return curve;
}

std::vector<double> finite_difference(const std::vector<double>& series,
                                      double step, int order) {
    if (order != 1 && order != 2) {
        throw invalid_argument("finite_difference: order must be 1 or 2");
    }
    const int n = static_cast<int>(series.size());
    if (n < order + 1) {
        throw invalid_argument(
            "finite_difference: need at least order+1 samples");
    }
    if (step <= 0.0 || !std::isfinite(step)) {
        throw invalid_argument("finite_difference: step must be positive");
    }

    std::vector<double> out(static_cast<size_t>(n));
    const auto& f = series;
    if (order == 1) {
        if (n == 2) {
            out[0] = out[1] = (f[1] - f[0]) / step;
            return out;
        }
        for (int i = 1; i + 1 < n; ++i) {
            out[i] = (f[i + 1] - f[i - 1]) / (2.0 * step);
        }
        out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * step);
        out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * step);
        return out;
    }

    const double step2 = step * step;
    for (int i = 1; i + 1 < n; ++i) {
        out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / step2;
    }
    if (n >= 4) {
        // One-sided stencils with the same second-order accuracy as the
        // interior, so edge artifacts do not masquerade as spectral features.
        out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / step2;
        out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] -
                      f[n - 4]) / step2;
    } else {
        out[0] = out[n - 1] = out[1];
    }
    return out;
}

DensityOfStates density_of_states(const Eigen::VectorXd& energies,
                                  int n_bins) {
    if (n_bins < 10) {
        throw invalid_argument("density_of_states: n_bins must be >= 10");
    }
    if (energies.size() < 2) {
        throw invalid_argument("density_of_states: need at least 2 energies");
    }
    const double lo = energies.minCoeff();
    const double hi = energies.maxCoeff();
    if (!(hi > lo)) {
        throw numeric_error(
            "density_of_states: degenerate spectrum, all energies equal");
    }

    DensityOfStates dos;
    dos.bin_width = (hi - lo) / n_bins;
    dos.bin_centers.resize(static_cast<size_t>(n_bins));
    dos.density.assign(static_cast<size_t>(n_bins), 0.0);
    for (int b = 0; b < n_bins; ++b) {
        dos.bin_centers[static_cast<size_t>(b)] = lo + (b + 0.5) * dos.bin_width;
    }
    for (Eigen::Index i = 0; i < energies.size(); ++i) {
        // Half-open bins [lo, hi) except the last, which takes the top edge.
        int b = static_cast<int>((energies(i) - lo) / dos.bin_width);
        if (b >= n_bins) b = n_bins - 1;
        if (b < 0) b = 0;
        dos.density[static_cast<size_t>(b)] += 1.0;
    }
    const double norm = static_cast<double>(energies.size()) * dos.bin_width;
    for (double& d : dos.density) d /= norm;
    return dos;
}

}  // namespace lmg
