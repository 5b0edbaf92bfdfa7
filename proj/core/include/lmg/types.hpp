#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace lmg {

using cxd = std::complex<double>;

// Dense complex operator on the collective-spin block. The matrix dimension
// is the basis dimension d = N+1; hbar = 1, energies in units of the field h.
using Operator = Eigen::MatrixXcd;

// Hermitian, unit-trace, positive-semidefinite d x d matrix (validated where
// contracts require it, not by the type itself).
using DensityMatrix = Eigen::MatrixXcd;

using SparseMatrixXcd = Eigen::SparseMatrix<cxd>;

inline constexpr cxd kImag{0.0, 1.0};

}  // namespace lmg
