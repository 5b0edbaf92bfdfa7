#include "lmg/lapack.hpp"

#include <lapacke.h>

#include <algorithm>
#include <string>
#include <vector>

#include "lmg/errors.hpp"

namespace lmg::lapack {

namespace {

lapack_complex_double* ptr(Eigen::MatrixXcd& m) {
    return reinterpret_cast<lapack_complex_double*>(m.data());
}

lapack_complex_double* ptr(Eigen::VectorXcd& v) {
    return reinterpret_cast<lapack_complex_double*>(v.data());
}

[[noreturn]] void fail(const char* routine, lapack_int info) {
    throw numeric_error(std::string(routine) + " failed with info=" +
                        std::to_string(info));
}

}  // namespace

Svd svd(const Eigen::MatrixXcd& a) {
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    const lapack_int k = std::min(m, n);
    Eigen::MatrixXcd work = a;  // zgesdd destroys its input
    Svd out;
    out.u.resize(m, k);
    out.s.resize(k);
    out.vh.resize(k, n);
    const lapack_int info = LAPACKE_zgesdd(
        LAPACK_COL_MAJOR, 'S', m, n, ptr(work), m, out.s.data(), ptr(out.u), m,
        ptr(out.vh), k);
    if (info != 0) fail("zgesdd", info);
    return out;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& a) {
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    const lapack_int k = std::min(m, n);
    Eigen::MatrixXcd work = a;
    Eigen::VectorXd s(k);
    const lapack_int info =
        LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, ptr(work), m, s.data(),
                       nullptr, m, nullptr, k);
    if (info != 0) fail("zgesdd", info);
    return s;
}

Eigh eigh(const Eigen::MatrixXcd& a) {
    if (a.rows() != a.cols()) {
        throw dimension_mismatch("eigh: matrix must be square");
    }
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Eigh out;
    out.v = a;
    out.w.resize(n);
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                           ptr(out.v), n, out.w.data());
    if (info != 0) fail("zheevd", info);
    return out;
}

Eigen::VectorXcd eig_values(const Eigen::MatrixXcd& a) {
    if (a.rows() != a.cols()) {
        throw dimension_mismatch("eig_values: matrix must be square");
    }
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Eigen::MatrixXcd work = a;
    Eigen::VectorXcd w(n);
    const lapack_int info =
        LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, ptr(work), n, ptr(w),
                      nullptr, 1, nullptr, 1);
    if (info != 0) fail("zgeev", info);
    return w;
}

Eigen::VectorXcd solve(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b) {
    if (a.rows() != a.cols()) {
        throw dimension_mismatch("solve: matrix must be square");
    }
    if (a.rows() != b.size()) {
        throw dimension_mismatch("solve: rhs length does not match matrix");
    }
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Eigen::MatrixXcd lu = a;
    Eigen::VectorXcd x = b;
    std::vector<lapack_int> ipiv(static_cast<size_t>(n));
    const lapack_int info = LAPACKE_zgesv(LAPACK_COL_MAJOR, n, 1, ptr(lu), n,
                                          ipiv.data(), ptr(x), n);
    if (info != 0) fail("zgesv", info);
    return x;
}

}  // namespace lmg::lapack
