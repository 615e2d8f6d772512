#pragma once

#include <map>
#include <vector>

#include "qtoda/cohomology.hpp"
#include "qtoda/laurent.hpp"
#include "qtoda/report.hpp"
#include "qtoda/weyl.hpp"

namespace qtoda {

// Coefficients s^(d) of the vector solution s = sum s^(d) q^d of H s = 0,
// with s^(0) = 1; each s^(d) is a class with Laurent-in-h coordinates.
struct SolutionData {
    int n = 0;
    int order = 0;
    std::map<std::vector<int>, std::vector<LaurentH>> s;
};

// Degree-by-degree solve: M_d s^(d) = sum_{i: d_i > 0} s^(d - a_i) with
// M_d = (h^2/2) sum_i (d_i - d_{i+1})^2 + h sum_i d_i (p_i - p_{i-1}),
// inverted by a finite geometric series around the nonzero scalar part.
SolutionData compute_s(int n, int order);

// Scalar series S_A = <e^{pt/h} s, A> for every basis class A.
std::vector<QSeries> assemble_all(const SolutionData& data);
QSeries assemble_series(const SolutionData& data, int basis_index);

// H S_A = 0 (theorem3) and D_m S_A = 0 (theorem4) through total q-degree
// `order`, exactly, for all basis classes; the solution data is computed to
// order + (q-degree of the operator) internally.
CheckReport check_theorem3(int n, int order);
CheckReport check_theorem4(int n, int order);

// The quadratic form (d,d) = sum (d_i - d_{i+1})^2 is positive for d != 0 and
// the induced leading block on bounded-degree t-polynomials is injective.
CheckReport check_kim_rank(int n, int order);

// (h q d/dq)^N s = q s for the projective-space series, exactly through
// the truncation order, componentwise mod p^N.
CheckReport check_projective_series(int bigN, int order);

// Coefficients 1/prod_{k<=d}(p + k h)^N mod p^N of the projective-space
// series; entry [d][j] is the p^j component.
std::vector<std::vector<LaurentH>> projective_coefficients(int bigN, int order);

// Flat gauge: columns express the quantum classes of the basis monomials in
// the constant-class frame of H*(F)[q], extracted exactly at q-order 1 from
// the h-degree structure of the solution pairings.
struct FlatFrame {
    int n = 0;
    std::vector<Mat<Rat>> correction;  // G = I + sum_m q_m G_m
};
FlatFrame flat_gauge(int n);

// J_i o J_j = J_i J_j + delta_ij q_i in the flat frame (exact; corrections
// beyond q-order 1 vanish by the weighted grading).
CheckReport check_example6(int n);

}  // namespace qtoda
