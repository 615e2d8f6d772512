#pragma once

#include <map>
#include <string>
#include <vector>

#include "qtoda/laurent.hpp"
#include "qtoda/multipoly.hpp"

namespace qtoda {

// One normal-ordered term c * h^k * q^d * (h d/dt)^a on n+1 sites:
// q-powers to the left of all derivatives, every derivative carrying one h,
// k the extra h-power beyond the derivatives.
struct OpKey {
    std::vector<int> d;  // size n, q-exponents, all >= 0
    std::vector<int> a;  // size n+1, derivative exponents
    int k = 0;

    auto operator<=>(const OpKey&) const = default;
};

class DiffOp {
public:
    explicit DiffOp(int n) : n_(n) {}

    static DiffOp zero(int n) { return DiffOp(n); }
    static DiffOp constant(int n, const Rat& c);
    static DiffOp q_monomial(int n, const std::vector<int>& d, const Rat& c = 1);
    static DiffOp h_del(int n, int site, int power = 1);  // (h d/dt_site)^power
    static DiffOp hbar(int n, int power = 1);

    int sites() const { return n_ + 1; }
    int n() const { return n_; }
    const std::map<OpKey, Rat>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(OpKey key, Rat c);

    DiffOp operator-() const;
    DiffOp& operator+=(const DiffOp& o);
    DiffOp& operator-=(const DiffOp& o);
    friend DiffOp operator+(DiffOp a, const DiffOp& b) { return a += b; }
    friend DiffOp operator-(DiffOp a, const DiffOp& b) { return a -= b; }
    DiffOp scaled(const Rat& c) const;

    bool operator==(const DiffOp& o) const { return n_ == o.n_ && terms_ == o.terms_; }

    // Max total q-shift over terms.
    int q_degree() const;
    // Weighted degree k + |a| + 2|d| of each term; homogeneity check.
    bool is_weighted_homogeneous(int* degree_out = nullptr) const;

    // Text form with h collected and derivative factors rendered as d_i,
    // e.g. "h^2*q_1*d_0*d_1 + q_1".
    std::string to_string() const;

private:
    int n_;
    std::map<OpKey, Rat> terms_;
};

// Normal-ordered product: moves (h d_i)^a past q^d via
// (h d_i) q^d = q^d (h d_i + h (d_i - d_{i+1})).
DiffOp compose(const DiffOp& x, const DiffOp& y);
DiffOp commutator(const DiffOp& x, const DiffOp& y);

// D(p, q, 0): (h d)^a -> p^a, terms with extra h dropped.
MultiPoly symbol(const DiffOp& x);

struct QuantizeResult {
    DiffOp op;
    // True when every monomial with q_i present has neither p_i nor p_{i-1},
    // so left and right q-ordering agree.
    bool ordering_independent;
};

// c p^a q^d -> c q^d (h d)^a; f must involve only p and q variables.
QuantizeResult quantize(const MultiPoly& f, int n);

// Polynomial in t_0..t_n with Laurent-in-h coefficients.
using TMono = std::vector<int>;
using TPoly = std::map<TMono, LaurentH>;

TPoly tpoly_scaled(const TPoly& f, const LaurentH& c);
TPoly tpoly_add(TPoly a, const TPoly& b);
TPoly tpoly_derivative(const TPoly& f, int site);
bool tpoly_is_zero(const TPoly& f);
std::string tpoly_to_string(const TPoly& f, int nsites);

// Truncated power series in q_1..q_n, coefficients TPoly.
class QSeries {
public:
    QSeries(int n, int order) : n_(n), order_(order) {}

    int n() const { return n_; }
    int order() const { return order_; }
    void set_order(int o) { order_ = o; }
    const std::map<std::vector<int>, TPoly>& coeffs() const { return coeffs_; }

    void add(const std::vector<int>& d, const TPoly& f);
    bool is_zero() const;
    QSeries& operator-=(const QSeries& o);

    std::string to_string() const;

private:
    int n_;
    int order_;
    std::map<std::vector<int>, TPoly> coeffs_;
};

// X applied to S; (h d_i) acts on q^d f as q^d (h (d_i - d_{i+1}) f + h df/dt_i),
// q-shifts raise d; output truncated to S.order() - X.q_degree().
QSeries apply(const DiffOp& x, const QSeries& s);

}  // namespace qtoda
