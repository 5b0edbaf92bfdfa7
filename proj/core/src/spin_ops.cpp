#include "lmg/spin_ops.hpp"

#include <cmath>

#include "lmg/errors.hpp"

namespace lmg {

Basis build_basis(int n_spins) {
    if (n_spins < 1) {
        throw invalid_argument("build_basis: n_spins must be >= 1, got " +
                               std::to_string(n_spins));
    }
    Basis basis;
    basis.n_spins = n_spins;
    basis.j = 0.5 * n_spins;
    basis.dim = n_spins + 1;
    basis.m_values.resize(basis.dim);
    for (int k = 0; k < basis.dim; ++k) {
        basis.m_values[k] = basis.j - k;
    }
    return basis;
}

Operator build_jz(const Basis& basis) {
    Operator jz = Operator::Zero(basis.dim, basis.dim);
    for (int k = 0; k < basis.dim; ++k) {
        jz(k, k) = basis.m_values[k];
    }
    return jz;
}

Operator build_jplus(const Basis& basis) {
    Operator jp = Operator::Zero(basis.dim, basis.dim);
    const double j = basis.j;
    // |j,m> sits at row k with m = j - k, so raising lands one row up.
    for (int k = 1; k < basis.dim; ++k) {
        const double m = basis.m_values[k];
        jp(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    }
    return jp;
}

Operator build_jminus(const Basis& basis) {
    return build_jplus(basis).adjoint();
}

Operator build_jx(const Basis& basis) {
    const Operator jp = build_jplus(basis);
    return 0.5 * (jp + jp.adjoint());
}

Operator build_jy(const Basis& basis) {
    const Operator jp = build_jplus(basis);
    return (jp - jp.adjoint()) / (2.0 * kImag);
}

Operator build_j_squared(const Basis& basis) {
    const double j = basis.j;
    return j * (j + 1.0) * Operator::Identity(basis.dim, basis.dim);
}

Operator build_parity_projector(const Basis& basis, int sign) {
    if (sign != 1 && sign != -1) {
        throw invalid_argument("build_parity_projector: sign must be +1 or -1");
    }
    Operator p = Operator::Zero(basis.dim, basis.dim);
    for (int k = 0; k < basis.dim; ++k) {
        // exp(i pi m) exp(i pi N/2) = (-1)^(m + j); m + j = N - k is integral.
        const int parity = ((basis.n_spins - k) % 2 == 0) ? 1 : -1;
        p(k, k) = 0.5 * (1.0 + sign * parity);
    }
    return p;
}

cxd expectation(const Operator& op, const DensityMatrix& rho) {
    if (op.rows() != op.cols() || rho.rows() != rho.cols() ||
        op.rows() != rho.rows()) {
        throw dimension_mismatch("expectation: operator is " +
                                 std::to_string(op.rows()) + "x" +
                                 std::to_string(op.cols()) + ", state is " +
                                 std::to_string(rho.rows()) + "x" +
                                 std::to_string(rho.cols()));
    }
    // Tr(op rho) without forming the product.
    return (op.transpose().cwiseProduct(rho)).sum();
}

}  // namespace lmg
