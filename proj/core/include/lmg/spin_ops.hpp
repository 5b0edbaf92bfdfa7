#pragma once

// Collective angular-momentum operators on the maximal-spin block of N
// spin-1/2 particles. The basis is |j=N/2, m> with m listed in descending
// order, m = +j first; this ordering is binding for every other module.

#include <vector>

#include "lmg/types.hpp"

namespace lmg {

struct Basis {
    int n_spins;                  // N
    double j;                     // N/2
    int dim;                      // N + 1
    std::vector<double> m_values; // +j, +j-1, ..., -j
};

Basis build_basis(int n_spins);

// J_z is diagonal with entries m in basis order.
Operator build_jz(const Basis& basis);

// J_+ raises m by one with amplitude sqrt(j(j+1) - m(m+1)); with the
// m-descending ordering its nonzeros sit on the superdiagonal.
Operator build_jplus(const Basis& basis);

// J_- = (J_+)^dagger.
Operator build_jminus(const Basis& basis);

Operator build_jx(const Basis& basis);  // (J_+ + J_-)/2
Operator build_jy(const Basis& basis);  // (J_+ - J_-)/(2i)

// j(j+1) * identity on this block.
Operator build_j_squared(const Basis& basis);

// P(+-) = (1/2)[I +- exp(i pi J_z) exp(i pi N/2)]; diagonal with entries in
// {0, 1}. sign must be +1 or -1.
Operator build_parity_projector(const Basis& basis, int sign);

// Tr(op * rho). For hermitian op and a valid state the imaginary part is
// numerical noise; callers report the real part.
cxd expectation(const Operator& op, const DensityMatrix& rho);

}  // namespace lmg
