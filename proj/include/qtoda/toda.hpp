#pragma once

#include <vector>

#include "qtoda/multipoly.hpp"
#include "qtoda/report.hpp"
#include "qtoda/weyl.hpp"

namespace qtoda {

// Characteristic polynomial Delta(lambda, p, q) of the tridiagonal matrix
// with lambda + p_i on the diagonal, q_i above and -1 below, computed by the
// three-term recurrence and cross-checked against the determinant for n <= 4.
MultiPoly build_delta(int n);

// Conserved quantities: D_m = lambda^{n-m} coefficient of Delta.
std::vector<MultiPoly> conserved(int n);

// Quantizations, asserted ordering-independent with symbol round trip.
std::vector<DiffOp> quantized(int n);

// H = (1/2) sum (h d_i)^2 - sum q_i and its symbol.
DiffOp hamiltonian(int n);
MultiPoly hamiltonian_symbol(int n);

// [H, D_m] = 0 for all m; optionally pairwise [D_l, D_m] = 0 and the
// classical Poisson brackets.
CheckReport check_theorem1(int n, bool pairwise = true, bool poisson_check = true);

// (a) weighted homogeneity of D_m (degree m+1) and of the quantized
// operators; (b) Delta equals the continued-fraction numerator.
CheckReport check_grading_and_fraction(int n);

}  // namespace qtoda
