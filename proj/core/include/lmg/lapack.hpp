#pragma once

// Thin wrappers over the LAPACKE routines the library relies on. Eigen's own
// decompositions are used for small fixed-size work; these cover the large
// dense factorizations where LAPACK is substantially faster.

#include "lmg/types.hpp"

namespace lmg::lapack {

struct Svd {
    Eigen::MatrixXcd u;
    Eigen::VectorXd s;   // descending
    Eigen::MatrixXcd vh; // V^H, rows are right singular vectors conjugated
};

// Full SVD via zgesdd. Throws numeric_error on failure.
Svd svd(const Eigen::MatrixXcd& a);

// Singular values only (zgesdd, job 'N').
Eigen::VectorXd singular_values(const Eigen::MatrixXcd& a);

struct Eigh {
    Eigen::VectorXd w;   // ascending
    Eigen::MatrixXcd v;  // columns are eigenvectors
};

// Hermitian eigendecomposition via zheevd. Uses the lower triangle.
Eigh eigh(const Eigen::MatrixXcd& a);

// Eigenvalues of a general complex matrix via zgeev (no vectors).
Eigen::VectorXcd eig_values(const Eigen::MatrixXcd& a);

// Solves a x = b via zgesv (LU with partial pivoting); a and b are copied.
Eigen::VectorXcd solve(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b);

}  // namespace lmg::lapack
