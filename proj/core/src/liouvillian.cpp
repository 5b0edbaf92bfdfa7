#include "lmg/liouvillian.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "lmg/errors.hpp"
#include "lmg/lapack.hpp"

namespace lmg {

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
        }
    }
    return out;
}

struct Entry {
    int row;
    int col;
    cxd value;
};

std::vector<Entry> nonzeros(const Eigen::MatrixXcd& m) {
    std::vector<Entry> entries;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            if (m(r, c) != cxd(0.0, 0.0)) {
                entries.push_back({static_cast<int>(r), static_cast<int>(c),
                                   m(r, c)});
            }
        }
    }
    return entries;
}

void check_basis(const ModelParams& params, const Basis& basis) {
    validate(params);
    if (basis.n_spins != params.n_spins) {
        throw dimension_mismatch("liouvillian: basis built for N=" +
                                 std::to_string(basis.n_spins) +
                                 " but params have N=" +
                                 std::to_string(params.n_spins));
    }
}

}  // namespace

Eigen::VectorXcd SuperOperator::apply(const Eigen::VectorXcd& x) const {
    if (x.size() != size()) {
        throw dimension_mismatch("SuperOperator::apply: vector length " +
                                 std::to_string(x.size()) + ", expected " +
                                 std::to_string(size()));
    }
    return dense ? Eigen::VectorXcd(mat * x) : Eigen::VectorXcd(sp * x);
}

double SuperOperator::norm_bound() const {
    if (dense) {
        const auto abs = mat.cwiseAbs();
        const double n1 = abs.colwise().sum().maxCoeff();
        const double ninf = abs.rowwise().sum().maxCoeff();
        return std::sqrt(n1 * ninf);
    }
    Eigen::VectorXd col_sum = Eigen::VectorXd::Zero(sp.cols());
    Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(sp.rows());
    for (int k = 0; k < sp.outerSize(); ++k) {
        for (SparseMatrixXcd::InnerIterator it(sp, k); it; ++it) {
            const double a = std::abs(it.value());
            col_sum(it.col()) += a;
            row_sum(it.row()) += a;
        }
    }
    return std::sqrt(col_sum.maxCoeff() * row_sum.maxCoeff());
}

Operator build_effective_hamiltonian(const ModelParams& params,
                                     const Basis& basis) {
    check_basis(params, basis);
    const Operator jp = build_jplus(basis);
    Operator h_eff = -params.h * build_jz(basis);
    const Operator jx = build_jx(basis);
    h_eff.noalias() -= (params.gamma_x / params.n_spins) * (jx * jx);
    // Anti-hermitian decay term from the J_+ collapse channel.
    h_eff.noalias() -= (0.5 * kImag * params.kappa / double(params.n_spins)) *
                       (jp.adjoint() * jp);
    return h_eff;
}

Operator build_control_unitary(const ModelParams& params, const Basis& basis) {
    check_basis(params, basis);
    const double scale = 1.0 / std::sqrt(double(params.n_spins));
    Operator g = scale * (params.theta_x * build_jx(basis) +
                          params.theta_y * build_jy(basis) +
                          params.theta_z * build_jz(basis));
    // Exponentiate through the spectral decomposition; the result is unitary
    // to machine precision regardless of the angle magnitudes.
    const auto decomp = lapack::eigh(g);
    Eigen::VectorXcd phases(decomp.w.size());
    for (Eigen::Index i = 0; i < decomp.w.size(); ++i) {
        phases(i) = std::exp(-kImag * decomp.w(i));
    }
    return decomp.v * phases.asDiagonal() * decomp.v.adjoint();
}

SuperOperator build_liouvillian(const ModelParams& params, const Basis& basis,
                                bool feedback) {
    check_basis(params, basis);
    const int d = basis.dim;
    const double rate = params.kappa / double(params.n_spins);

    SuperOperator out;
    out.dim_h = d;
    out.dense = d <= kDenseDimLimit;

    const Operator h_eff = build_effective_hamiltonian(params, basis);
    const bool transverse_feedback =
        feedback && (params.theta_x != 0.0 || params.theta_y != 0.0);

    if (out.dense) {
        Operator a = build_jplus(basis);
        if (feedback) {
            a = build_control_unitary(params, basis) * a;
        }
        const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
        out.mat = -kImag * (kron(id, h_eff) - kron(h_eff.conjugate(), id));
        out.mat.noalias() += rate * kron(a.conjugate(), a);
        return out;
    }

    if (transverse_feedback) {
        throw resource_error(
            "liouvillian: transverse feedback angles make the jump operator "
            "dense; dimension " + std::to_string(d) +
            " exceeds the dense limit of " + std::to_string(kDenseDimLimit));
    }

    // Sparse path: H_eff is banded and the rotated jump operator stays on the
    // superdiagonal because a pure J_z rotation is diagonal in this basis.
    std::vector<Entry> a_entries;
    {
        const double j = basis.j;
        const double scale = 1.0 / std::sqrt(double(params.n_spins));
        for (int k = 1; k < d; ++k) {
            const double m = basis.m_values[static_cast<size_t>(k)];
            cxd value = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
            if (feedback && params.theta_z != 0.0) {
                const double m_row = basis.m_values[static_cast<size_t>(k - 1)];
                value *= std::exp(-kImag * (params.theta_z * scale * m_row));
            }
            a_entries.push_back({k - 1, k, value});
        }
    }
    const std::vector<Entry> h_entries = nonzeros(h_eff);

    std::vector<Eigen::Triplet<cxd>> triplets;
    triplets.reserve(2 * h_entries.size() * static_cast<size_t>(d) +
                     a_entries.size() * a_entries.size());
    for (int block = 0; block < d; ++block) {
        const int off = block * d;
        for (const Entry& e : h_entries) {
            triplets.emplace_back(off + e.row, off + e.col, -kImag * e.value);
        }
    }
    for (const Entry& e : h_entries) {
        for (int i = 0; i < d; ++i) {
            triplets.emplace_back(e.row * d + i, e.col * d + i,
                                  kImag * std::conj(e.value));
        }
    }
    for (const Entry& outer : a_entries) {
        const cxd left = rate * std::conj(outer.value);
        for (const Entry& inner : a_entries) {
            triplets.emplace_back(outer.row * d + inner.row,
                                  outer.col * d + inner.col,
                                  left * inner.value);
        }
    }

    out.sp.resize(out.size(), out.size());
    out.sp.setFromTriplets(triplets.begin(), triplets.end());
    out.sp.makeCompressed();
    return out;
}

}  // namespace lmg
