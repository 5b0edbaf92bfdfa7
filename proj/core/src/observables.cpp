#include "lmg/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lmg/closed.hpp"
#include "lmg/errors.hpp"
#include "lmg/lapack.hpp"

namespace lmg {

namespace {

constexpr double kRadicandTol = 1e-10;

double real_expectation(const Operator& op, const DensityMatrix& rho) {
    return expectation(op, rho).real();
}

// Branch selection shared by the moment and density-matrix entry points;
// s is the pair-correlation scale S already extracted from the radicand.
double concurrence_branches(double s, double jz2, double jx2, double jy2,
                            double jplus2_abs, double n,
                            ConcurrenceDiag* diag) {
    const double b = s + jplus2_abs / n;

    const double branch1 =
        2.0 * std::max(0.0, jplus2_abs / n - (jx2 + jy2) / n + 0.5);
    const double branch2 = 2.0 * std::max(0.0, n / 4.0 - jz2 / n - s);

    // First printed predicate, with the 2N denominator; the alternative form
    // divides by N instead. Branch selection follows the first one.
    const bool pred1 = (n * n - 4.0 * jz2) / (2.0 * n) < b;
    const bool pred2 = (n * n - 4.0 * jz2) / n < b;
    if (diag) {
        diag->predicates_disagree = pred1 != pred2;
        diag->used_branch1 = pred1;
        diag->branch1 = branch1;
        diag->branch2 = branch2;
    }
    return pred1 ? branch1 : branch2;
}

// Radicand of S through the exact factorization over populations,
//   (A - B)(A + B) with A - B = sum p_k (N-2m)(N-2m-2),
//                       A + B = sum p_k (N+2m)(N+2m-2);
// every coefficient is a nonnegative even integer (zero only on the two
// outermost m values of each sign), so with p_k clamped at zero both sums
// stay nonnegative term by term and the product cannot dip below zero the
// way the moment form does next to the polarized edge.
double pair_correlation_s(const DensityMatrix& rho, const Basis& basis) {
    const double n = basis.n_spins;
    double a_minus_b = 0.0;
    double a_plus_b = 0.0;
    for (int k = 0; k < basis.dim; ++k) {
        const double p = std::max(0.0, rho(k, k).real());
        const double down = n - 2.0 * basis.m_values[static_cast<size_t>(k)];
        const double up = n + 2.0 * basis.m_values[static_cast<size_t>(k)];
        a_minus_b += p * down * (down - 2.0);
        a_plus_b += p * up * (up - 2.0);
    }
    return std::sqrt(a_minus_b * a_plus_b) / (4.0 * n);
}

}  // namespace

ObservableSet compute_observables(const DensityMatrix& rho,
                                  const Basis& basis) {
    if (rho.rows() != basis.dim || rho.cols() != basis.dim) {
        throw dimension_mismatch("compute_observables: state is " +
                                 std::to_string(rho.rows()) + "x" +
                                 std::to_string(rho.cols()) +
                                 " but the basis has dimension " +
                                 std::to_string(basis.dim));
    }
    const Operator jz = build_jz(basis);
    const Operator jx = build_jx(basis);
    const Operator jy = build_jy(basis);
    const Operator jp = build_jplus(basis);

    ObservableSet obs;
    obs.jz = real_expectation(jz, rho);
    obs.jz_normalized = obs.jz / basis.j;
    obs.jx2 = real_expectation(jx * jx, rho);
    obs.jy2 = real_expectation(jy * jy, rho);
    obs.jz2 = real_expectation(jz * jz, rho);
    obs.jplus2_abs = std::abs(expectation(jp * jp, rho));
    obs.concurrence =
        concurrence_branches(pair_correlation_s(rho, basis), obs.jz2, obs.jx2,
                             obs.jy2, obs.jplus2_abs, basis.n_spins, nullptr);
    obs.purity = rho.cwiseProduct(rho.transpose()).sum().real();
    return obs;
}

double concurrence_from_moments(double jz, double jz2, double jx2, double jy2,
                                double jplus2_abs, int n_spins,
                                ConcurrenceDiag* diag) {
    if (n_spins < 2) {
        throw invalid_argument(
            "concurrence: defined for two or more spins, got N = " +
            std::to_string(n_spins));
    }
    const double n = n_spins;

    const double plus_term = n * (n - 2.0) + 4.0 * jz2;
    const double minus_term = 4.0 * (n - 1.0) * jz;
    double radicand = plus_term * plus_term - minus_term * minus_term;
    if (radicand < -kRadicandTol) {
        throw numeric_error(
            "concurrence: negative radicand " + std::to_string(radicand) +
            ", moments do not come from a symmetric state");
    }
    if (radicand < 0.0) radicand = 0.0;
    const double s = std::sqrt(radicand) / (4.0 * n);
    return concurrence_branches(s, jz2, jx2, jy2, jplus2_abs, n, diag);
}

double concurrence(const DensityMatrix& rho, const Basis& basis,
                   ConcurrenceDiag* diag) {
    if (basis.n_spins < 2) {
        throw invalid_argument(
            "concurrence: defined for two or more spins, got N = " +
            std::to_string(basis.n_spins));
    }
    if (rho.rows() != basis.dim || rho.cols() != basis.dim) {
        throw dimension_mismatch("concurrence: state is " +
                                 std::to_string(rho.rows()) + "x" +
                                 std::to_string(rho.cols()) +
                                 " but the basis has dimension " +
                                 std::to_string(basis.dim));
    }
    const Operator jz = build_jz(basis);
    const Operator jx = build_jx(basis);
    const Operator jy = build_jy(basis);
    const Operator jp = build_jplus(basis);
    return concurrence_branches(
        pair_correlation_s(rho, basis), real_expectation(jz * jz, rho),
        real_expectation(jx * jx, rho), real_expectation(jy * jy, rho),
        std::abs(expectation(jp * jp, rho)), basis.n_spins, diag);
}

double wootters_concurrence(const Eigen::Matrix4cd& rho2) {
    Eigen::Matrix4cd herm = 0.5 * (rho2 + rho2.adjoint());

    Eigen::Matrix4cd flip = Eigen::Matrix4cd::Zero();
    flip(0, 3) = -1.0;
    flip(1, 2) = 1.0;
    flip(2, 1) = 1.0;
    flip(3, 0) = -1.0;

    // sqrt(rho) through the spectral decomposition, with tiny negative
    // eigenvalues from roundoff clamped before the root.
    const auto rho_decomp = lapack::eigh(herm);
    Eigen::Vector4d w = rho_decomp.w;
    for (int i = 0; i < 4; ++i) w(i) = std::sqrt(std::max(w(i), 0.0));
    const Eigen::Matrix4cd sqrt_rho =
        rho_decomp.v * w.asDiagonal() * rho_decomp.v.adjoint();

    // rho (sy x sy) rho^* (sy x sy) is similar to Y Y^dag with
    // Y = sqrt(rho) (sy x sy) conj(sqrt(rho)), so the Wootters lambdas are
    // the singular values of Y. Going through Y skips the square-then-root
    // detour that loses half the digits on near-zero eigenvalues.
    Eigen::Matrix4cd y = sqrt_rho * flip * sqrt_rho.conjugate();
    const Eigen::VectorXd lambda = lapack::singular_values(y);

    // Descending from the SVD; the largest against the other three.
    return std::max(0.0, lambda(0) - lambda(1) - lambda(2) - lambda(3));
}

Eigen::Matrix4cd embed_two_qubit(const Eigen::Matrix3cd& rho_collective) {
    Eigen::Matrix<cxd, 4, 3> isometry = Eigen::Matrix<cxd, 4, 3>::Zero();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    isometry(0, 0) = 1.0;
    isometry(1, 1) = inv_sqrt2;
    isometry(2, 1) = inv_sqrt2;
    isometry(3, 2) = 1.0;
    return isometry * rho_collective * isometry.adjoint();
}

DerivativeResult sweep_derivative(const std::vector<double>& jz_series,
                                  const std::vector<double>& gamma_grid) {
    if (jz_series.size() != gamma_grid.size()) {
        throw dimension_mismatch("sweep_derivative: series and grid lengths "
                                 "differ");
    }
    const int n = static_cast<int>(gamma_grid.size());
    if (n < 3) {
        throw invalid_argument("sweep_derivative: need at least 3 samples");
    }
    const double step = gamma_grid[1] - gamma_grid[0];
    for (int i = 1; i + 1 < n; ++i) {
        if (std::abs(gamma_grid[static_cast<size_t>(i) + 1] -
                     gamma_grid[static_cast<size_t>(i)] - step) >
            1e-9 * std::max(1.0, std::abs(step))) {
            throw invalid_argument("sweep_derivative: grid is not uniform");
        }
    }

    DerivativeResult result;
    result.derivative = finite_difference(jz_series, step, 1);
    const auto& der = result.derivative;

    const auto [min_it, max_it] = std::minmax_element(der.begin(), der.end());
    const double spread = *max_it - *min_it;
    if (spread <= 1e-12 * std::max({1.0, std::abs(*max_it),
                                    std::abs(*min_it)})) {
        result.has_minimum = false;
        result.argmin = gamma_grid.front();
        result.min_value = der.front();
        return result;
    }
    result.has_minimum = true;

    const int idx = static_cast<int>(std::distance(der.begin(), min_it));
    result.argmin = gamma_grid[static_cast<size_t>(idx)];
    result.min_value = der[static_cast<size_t>(idx)];
    if (idx > 0 && idx + 1 < n) {
        const double y0 = der[static_cast<size_t>(idx) - 1];
        const double y1 = der[static_cast<size_t>(idx)];
        const double y2 = der[static_cast<size_t>(idx) + 1];
        const double curvature = y0 - 2.0 * y1 + y2;
        if (curvature > 0.0) {
            double delta = 0.5 * (y0 - y2) / curvature;
            delta = std::clamp(delta, -0.5, 0.5);
            result.argmin += delta * step;
            result.min_value = y1 - 0.25 * (y0 - y2) * delta;
        }
    }
    return result;
}

}  // namespace lmg
