#include "lmg/steady.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/SparseLU>

#include "lmg/errors.hpp"
#include "lmg/lapack.hpp"

namespace lmg {

namespace {

constexpr double kNullspaceRelTol = 1e-9;
constexpr double kResidualRelTol = 1e-8;

Eigen::VectorXcd vectorize(const DensityMatrix& rho) {
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(),
                                              rho.rows() * rho.cols());
}

DensityMatrix unvectorize(const Eigen::VectorXcd& v, int d) {
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d);
}

// Hermitize and normalize the trace in place; returns the raw trace that was
// divided out. Throws when the candidate is numerically traceless.
double normalize_state(DensityMatrix& rho) {
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double tr = rho.trace().real();
    if (std::abs(tr) < 1e-12 * std::max(1.0, rho.cwiseAbs().maxCoeff())) {
        throw numeric_error(
            "steady state: kernel vector is traceless, cannot normalize");
    }
    rho /= tr;
    return tr;
}

// Parity of the coherence offset carried by a vectorized (column-stacked)
// index: entry v addresses rho(row, col) with row = v % d, col = v / d.
inline int offset_parity(Eigen::Index v, int d) {
    return static_cast<int>((v % d + v / d) & 1);
}

// With axial feedback (no J_x/J_y rotation in the control unitary) every
// term of the generator shifts row and column indices of rho by the same
// parity, so the dense matrix carries no coupling between even and odd
// offset sectors. Probing the zero pattern instead of the parameters keeps
// the solver agnostic about where the operator came from.
bool offset_parity_preserved(const Eigen::MatrixXcd& mat, int d) {
    const Eigen::Index n = mat.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        const int pj = offset_parity(j, d);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (offset_parity(i, d) != pj && mat(i, j) != 0.0) return false;
        }
    }
    return true;
}

SteadyStateResult finish_dense(const SuperOperator& liouvillian,
                               const Eigen::VectorXcd& kernel,
                               int nullspace_dim) {
    if (nullspace_dim != 1) {
        throw degenerate_steady_state(
            "steady state: Liouvillian kernel has dimension " +
                std::to_string(nullspace_dim) + ", expected 1",
            nullspace_dim);
    }
    SteadyStateResult result;
    result.rho = unvectorize(kernel, liouvillian.dim_h);
    normalize_state(result.rho);
    result.residual =
        liouvillian.apply(vectorize(result.rho)).cwiseAbs().maxCoeff();
    result.nullspace_dim = 1;
    result.solver = SolverKind::direct_nullspace;

    const double bound = kResidualRelTol * liouvillian.norm_bound();
    if (!(result.residual <= bound)) {
        throw numeric_error("steady state: residual " +
                            std::to_string(result.residual) +
                            " exceeds acceptance bound " +
                            std::to_string(bound));
    }
    return result;
}

SteadyStateResult solve_dense(const SuperOperator& liouvillian) {
    const int d = liouvillian.dim_h;
    const Eigen::Index n = liouvillian.size();

    if (offset_parity_preserved(liouvillian.mat, d)) {
        // Block-diagonal case: one SVD per offset-parity sector is a quarter
        // of the cost of the full decomposition at equal accuracy.
        std::array<std::vector<Eigen::Index>, 2> sector;
        for (Eigen::Index v = 0; v < n; ++v) {
            sector[static_cast<size_t>(offset_parity(v, d))].push_back(v);
        }

        std::array<lapack::Svd, 2> decomp;
        double sigma_max = 0.0;
        for (int s = 0; s < 2; ++s) {
            const auto& idx = sector[static_cast<size_t>(s)];
            if (idx.empty()) continue;
            Eigen::MatrixXcd sub(idx.size(), idx.size());
            for (size_t j = 0; j < idx.size(); ++j) {
                for (size_t i = 0; i < idx.size(); ++i) {
                    sub(static_cast<Eigen::Index>(i),
                        static_cast<Eigen::Index>(j)) =
                        liouvillian.mat(idx[i], idx[j]);
                }
            }
            decomp[static_cast<size_t>(s)] = lapack::svd(sub);
            sigma_max =
                std::max(sigma_max, decomp[static_cast<size_t>(s)].s(0));
        }

        int nullspace_dim = 0;
        int kernel_sector = -1;
        if (sigma_max == 0.0) {
            nullspace_dim = static_cast<int>(n);
        } else {
            for (int s = 0; s < 2; ++s) {
                if (sector[static_cast<size_t>(s)].empty()) continue;
                const auto& sv = decomp[static_cast<size_t>(s)].s;
                for (Eigen::Index i = 0; i < sv.size(); ++i) {
                    if (sv(i) < kNullspaceRelTol * sigma_max) {
                        ++nullspace_dim;
                        kernel_sector = s;
                    }
                }
            }
        }

        Eigen::VectorXcd kernel = Eigen::VectorXcd::Zero(n);
        if (nullspace_dim == 1) {
            const auto& idx = sector[static_cast<size_t>(kernel_sector)];
            const auto& dec = decomp[static_cast<size_t>(kernel_sector)];
            const Eigen::VectorXcd local =
                dec.vh.row(dec.vh.rows() - 1).adjoint();
            for (size_t i = 0; i < idx.size(); ++i) {
                kernel(idx[i]) = local(static_cast<Eigen::Index>(i));
            }
        }
        return finish_dense(liouvillian, kernel, nullspace_dim);
    }

    const auto decomp = lapack::svd(liouvillian.mat);

    const double sigma_max = decomp.s(0);
    int nullspace_dim = 0;
    if (sigma_max == 0.0) {
        nullspace_dim = static_cast<int>(n);
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (decomp.s(i) < kNullspaceRelTol * sigma_max) ++nullspace_dim;
        }
    }

    // Right singular vector for the smallest singular value spans the kernel.
    Eigen::VectorXcd kernel = Eigen::VectorXcd::Zero(n);
    if (nullspace_dim == 1) {
        kernel = decomp.vh.row(n - 1).adjoint();
    }
    return finish_dense(liouvillian, kernel, nullspace_dim);
}

SteadyStateResult solve_sparse(const SuperOperator& liouvillian) {
    const int d = liouvillian.dim_h;
    const Eigen::Index n = liouvillian.size();
    const double norm_bound = liouvillian.norm_bound();

    // Deflate the trace functional: M = L + vec(I) vec(I)^dagger / d. For a
    // one-dimensional kernel M is nonsingular and M^-1 vec(I)/d is exactly
    // the trace-one stationary state.
    Eigen::VectorXcd trace_vec = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < d; ++i) {
        trace_vec(static_cast<Eigen::Index>(i) * d + i) = cxd(1.0, 0.0);
    }
    SparseMatrixXcd deflation(n, n);
    {
        std::vector<Eigen::Triplet<cxd>> triplets;
        triplets.reserve(static_cast<size_t>(d) * d);
        const cxd w = cxd(1.0 / d, 0.0);
        for (int i = 0; i < d; ++i) {
            for (int k = 0; k < d; ++k) {
                triplets.emplace_back(i * d + i, k * d + k, w);
            }
        }
        deflation.setFromTriplets(triplets.begin(), triplets.end());
    }
    SparseMatrixXcd m = liouvillian.sp + deflation;
    m.makeCompressed();

    Eigen::SparseLU<SparseMatrixXcd> lu;
    lu.compute(m);
    if (lu.info() != Eigen::Success) {
        throw degenerate_steady_state(
            "steady state: deflated operator is singular, kernel dimension "
            "is at least 2",
            2);
    }

    // Probe the smallest singular direction of M by inverse iteration from a
    // fixed pseudorandom start. A second kernel direction of L survives the
    // deflation and shows up as unbounded growth here.
    {
        std::mt19937_64 rng(0x5eed5eed5eed5eedULL);
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::VectorXcd probe(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            probe(i) = cxd(gauss(rng), gauss(rng));
        }
        probe /= probe.norm();
        double growth = 0.0;
        for (int iter = 0; iter < 2; ++iter) {
            Eigen::VectorXcd next = lu.solve(probe);
            const double g = next.norm();
            if (!next.allFinite() || !std::isfinite(g)) {
                throw degenerate_steady_state(
                    "steady state: inverse iteration diverged, kernel "
                    "dimension is at least 2",
                    2);
            }
            growth = std::max(growth, g);
            probe = next / g;
        }
        if (1.0 / growth < kNullspaceRelTol * norm_bound) {
            throw degenerate_steady_state(
                "steady state: deflated operator has a near-null direction, "
                "kernel dimension is at least 2",
                2);
        }
    }

    const Eigen::VectorXcd rhs = trace_vec / double(d);
    Eigen::VectorXcd x = lu.solve(rhs);
    // One round of iterative refinement with the existing factorization.
    Eigen::VectorXcd residual_vec = rhs - m * x;
    x += lu.solve(residual_vec);
    if (!x.allFinite()) {
        throw numeric_error("steady state: sparse solve produced non-finite "
                            "entries");
    }

    SteadyStateResult result;
    result.rho = unvectorize(x, d);
    normalize_state(result.rho);
    result.residual =
        liouvillian.apply(vectorize(result.rho)).cwiseAbs().maxCoeff();
    result.nullspace_dim = 1;
    result.solver = SolverKind::shifted_inverse;

    const double bound = kResidualRelTol * norm_bound;
    if (!(result.residual <= bound)) {
        throw numeric_error("steady state: residual " +
                            std::to_string(result.residual) +
                            " exceeds acceptance bound " +
                            std::to_string(bound));
    }
    return result;
}

}  // namespace

SteadyStateResult solve_steady_state(const SuperOperator& liouvillian) {
    if (liouvillian.dim_h < 1) {
        throw invalid_argument("solve_steady_state: empty operator");
    }
    return liouvillian.dense ? solve_dense(liouvillian)
                             : solve_sparse(liouvillian);
}

DensityMatrix evolve(const DensityMatrix& rho0,
                     const SuperOperator& liouvillian, double t_final,
                     double dt, EvolveStats* stats) {
    if (rho0.rows() != rho0.cols() || rho0.rows() != liouvillian.dim_h) {
        throw dimension_mismatch("evolve: state dimension does not match the "
                                 "Liouvillian");
    }
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
        throw invalid_argument("evolve: t_final must be >= 0 and finite");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw invalid_argument("evolve: dt must be positive and finite");
    }
    const double dt_cap = 0.1 / liouvillian.norm_bound();
    if (dt > dt_cap) {
        throw invalid_argument("evolve: dt = " + std::to_string(dt) +
                               " exceeds the stability bound 0.1/||L|| = " +
                               std::to_string(dt_cap));
    }

    EvolveStats local;
    EvolveStats& st = stats ? *stats : local;
    st.trace_corrections = 0;
    st.max_trace_drift = 0.0;

    const int d = liouvillian.dim_h;
    Eigen::VectorXcd x = vectorize(rho0);

    const auto step = [&](double step_dt) {
        const Eigen::VectorXcd k1 = liouvillian.apply(x);
        const Eigen::VectorXcd k2 = liouvillian.apply(x + (0.5 * step_dt) * k1);
        const Eigen::VectorXcd k3 = liouvillian.apply(x + (0.5 * step_dt) * k2);
        const Eigen::VectorXcd k4 = liouvillian.apply(x + step_dt * k3);
        x += (step_dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        if (x.cwiseAbs().maxCoeff() > 10.0) {
            throw step_size_error(
                "evolve: solution norm exceeded 10, step size too large for "
                "this generator");
        }
        cxd tr(0.0, 0.0);
        for (int i = 0; i < d; ++i) {
            tr += x(static_cast<Eigen::Index>(i) * d + i);
        }
        const double drift = std::abs(tr - cxd(1.0, 0.0));
        st.max_trace_drift = std::max(st.max_trace_drift, drift);
        if (drift > 1e-12) {
            x /= tr;
            ++st.trace_corrections;
        }
    };

    const double n_exact = t_final / dt;
    long n_full = static_cast<long>(std::floor(n_exact + 1e-9));
    double remainder = t_final - double(n_full) * dt;
    if (remainder < 1e-12 * dt) remainder = 0.0;

    for (long i = 0; i < n_full; ++i) step(dt);
    if (remainder > 0.0) step(remainder);

    return unvectorize(x, d);
}

double purity(const DensityMatrix& rho) {
    if (rho.rows() != rho.cols()) {
        throw dimension_mismatch("purity: matrix must be square");
    }
    // Tr(rho^2) = sum_ij rho_ij rho_ji, no matrix product needed.
    return rho.cwiseProduct(rho.transpose()).sum().real();
}

DensityMatrixCheck check_density_matrix(const DensityMatrix& rho) {
    DensityMatrixCheck check{};
    if (rho.rows() != rho.cols() || rho.rows() == 0) {
        throw dimension_mismatch("check_density_matrix: matrix must be square");
    }
    check.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    check.trace_error = std::abs(rho.trace() - cxd(1.0, 0.0));
    const DensityMatrix herm = 0.5 * (rho + rho.adjoint());
    const auto decomp = lapack::eigh(herm);
    check.min_eigenvalue = decomp.w(0);
    check.valid = check.hermiticity_error <= 1e-10 &&
                  check.trace_error <= 1e-10 &&
                  check.min_eigenvalue >= -1e-8;
    return check;
}

DensityMatrix clamp_positive(const DensityMatrix& rho) {
    const DensityMatrix herm = 0.5 * (rho + rho.adjoint());
    const auto decomp = lapack::eigh(herm);
    Eigen::VectorXd w = decomp.w;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w(i) < 0.0) w(i) = 0.0;
    }
    const double total = w.sum();
    if (total <= 0.0) {
        throw numeric_error("clamp_positive: no positive weight remains");
    }
    w /= total;
    return decomp.v * w.asDiagonal() * decomp.v.adjoint();
}

}  // namespace lmg
