#pragma once

// Open-system generator on vectorized density matrices, with and without the
// jump-conditioned feedback rotation.
//
// Vectorization is column stacking throughout: vec(A rho B) = (B^T kron A) vec(rho).
// The generator splits as L = L0 + J with
//   L0 rho = -i (H_eff rho - rho H_eff^dagger),  H_eff = H - (i/2)(kappa/N) J_- J_+
//   J  rho = (kappa/N) A rho A^dagger
// where A = J_+ without feedback and A = U_C J_+ with it. The control unitary
// leaves L0 untouched.

#include "lmg/model.hpp"
#include "lmg/spin_ops.hpp"
#include "lmg/types.hpp"

namespace lmg {

// Hilbert dimensions above this use sparse storage; a dense superoperator at
// d = 65 would already take (65^2)^2 complex entries.
inline constexpr int kDenseDimLimit = 64;

struct SuperOperator {
    int dim_h = 0;   // Hilbert dimension d; the matrix acts on C^(d^2)
    bool dense = true;
    Eigen::MatrixXcd mat;  // populated when dense
    SparseMatrixXcd sp;    // populated when sparse

    Eigen::Index size() const {
        return static_cast<Eigen::Index>(dim_h) * dim_h;
    }
    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;

    // Upper bound on the spectral norm: sqrt(norm1 * normInf). Deterministic
    // and cheap; used for step-size preconditions and residual scaling.
    double norm_bound() const;
};

// H_eff = H - (i/2)(kappa/N) J_- J_+ (non-hermitian for kappa > 0).
Operator build_effective_hamiltonian(const ModelParams& params, const Basis& basis);

// U_C = exp(-i G), G = (theta_x J_x + theta_y J_y + theta_z J_z)/sqrt(N),
// computed through the hermitian eigendecomposition of G so the result is
// unitary to machine precision at any angle.
Operator build_control_unitary(const ModelParams& params, const Basis& basis);

// Assembles the generator. Dense for d <= kDenseDimLimit. Above that the
// matrix is stored sparse, which requires a sparse jump operator: theta = 0
// or a pure theta_z rotation keeps A banded, while transverse angles make
// U_C dense and the jump superoperator O(d^4); that case raises
// resource_error rather than silently exhausting memory.
SuperOperator build_liouvillian(const ModelParams& params, const Basis& basis,
                                bool feedback);

}  // namespace lmg
