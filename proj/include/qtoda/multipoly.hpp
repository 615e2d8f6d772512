#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qtoda/rational.hpp"

namespace qtoda {

// Variable universe, ordered lambda < h < p_0 < ... < p_n < q_1 < ... < q_n,
// extended with the formal edge variables u_i, v_i used by the amplitude
// factorization checks.
enum class VarKind : std::uint8_t { Lambda = 0, Hbar = 1, P = 2, Q = 3, U = 4, V = 5 };

struct Var {
    VarKind kind;
    int index;  // site index; 0 for lambda/hbar

    auto operator<=>(const Var&) const = default;
};

inline Var var_lambda() { return {VarKind::Lambda, 0}; }
inline Var var_hbar() { return {VarKind::Hbar, 0}; }
inline Var var_p(int i) { return {VarKind::P, i}; }
inline Var var_q(int i) { return {VarKind::Q, i}; }
inline Var var_u(int i) { return {VarKind::U, i}; }
inline Var var_v(int i) { return {VarKind::V, i}; }

std::string var_name(Var v);

// Weights of the grading deg p = deg lambda = deg h = 1, deg q = 2.
// The edge variables u, v carry weight 1 so that q_i = u_i v_i stays graded.
int var_weight(Var v);

// Sparse monomial: (variable, exponent) pairs sorted by variable, exponents > 0.
using Mono = std::vector<std::pair<Var, int>>;

int mono_total_degree(const Mono& m);
int mono_weighted_degree(const Mono& m);
Mono mono_mul(const Mono& a, const Mono& b);

// Graded reverse-lexicographic order: compare by total degree, then the
// monomial with the larger exponent at the smallest differing variable is
// the smaller one.
struct GrevlexLess {
    bool operator()(const Mono& a, const Mono& b) const;
};

class MultiPoly {
public:
    using TermMap = std::map<Mono, Rat, GrevlexLess>;

    MultiPoly() = default;
    static MultiPoly zero() { return {}; }
    static MultiPoly constant(Rat c);
    static MultiPoly variable(Var v, int exp = 1);

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rat constant_term() const;

    void add_term(Mono m, Rat c);  // accumulates, drops zeros

    MultiPoly operator-() const;
    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly& operator-=(const MultiPoly& o);
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }
    MultiPoly scaled(const Rat& c) const;
    MultiPoly pow(int k) const;

    bool operator==(const MultiPoly& o) const { return terms_ == o.terms_; }

    MultiPoly derivative(Var v) const;
    MultiPoly substitute(Var v, const MultiPoly& value) const;

    // Largest weighted degree over terms; nullopt for the zero polynomial.
    std::optional<int> weighted_degree() const;
    bool is_weighted_homogeneous(int* degree_out = nullptr) const;

    // Coefficient of lambda^k, with the lambda factor removed.
    MultiPoly lambda_coefficient(int k) const;
    int lambda_degree() const;

    bool depends_on(VarKind kind) const;
    int max_index(VarKind kind) const;  // -1 when absent

    std::complex<double> eval(const std::function<std::complex<double>(Var)>& x) const;
    Rat eval_rat(const std::function<Rat(Var)>& x) const;

    // Canonical text form, terms in descending monomial order,
    // e.g. "3/2*p_0^2*q_1 + p_1 - 2".
    std::string to_string() const;

private:
    TermMap terms_;
};

// Parses the canonical text form (also accepts J_i as -(p_0+...+p_{i-1})
// and parenthesized subexpressions with + - * ^).
MultiPoly poly_parse(std::string_view text);

// Canonical Poisson bracket {f,g} = sum_i (df/dp_i d_{t_i}g - d_{t_i}f dg/dp_i)
// where d_{t_i} scales q^d by (d_i - d_{i+1}); f, g must not involve lambda, h.
MultiPoly poisson(const MultiPoly& f, const MultiPoly& g);

}  // namespace qtoda
