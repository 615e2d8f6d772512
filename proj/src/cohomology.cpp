#include "qtoda/cohomology.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <random>

#include "qtoda/toda.hpp"

namespace qtoda {

namespace {

using QExp = std::vector<int>;
using ColKey = std::pair<PExp, QExp>;

int exp_sum(const std::vector<int>& v) {
    int s = 0;
    for (int x : v) s += x;
    return s;
}

bool is_standard(const PExp& a) {
    if (a[0] != 0) return false;
    for (std::size_t i = 1; i < a.size(); ++i)
        if (a[i] > static_cast<int>(i)) return false;
    return true;
}

// All (p-exponent, q-exponent) pairs of weighted degree g (deg p = 1, deg q = 2).
std::vector<ColKey> monomials_of_degree(int np, int nq, int g) {
    std::vector<ColKey> out;
    std::vector<int> qexp(nq, 0);
    std::vector<int> pexp(np, 0);
    std::function<void(int, int)> rec_p = [&](int pos, int left) {
        if (pos == np - 1) {
            pexp[pos] = left;
            out.emplace_back(pexp, qexp);
            pexp[pos] = 0;
            return;
        }
        for (int e = 0; e <= left; ++e) {
            pexp[pos] = e;
            rec_p(pos + 1, left - e);
        }
        pexp[pos] = 0;
    };
    std::function<void(int, int)> rec_q = [&](int pos, int left) {
        if (pos == nq) {
            rec_p(0, left);
            return;
        }
        for (int e = 0; 2 * e <= left; ++e) {
            qexp[pos] = e;
            rec_q(pos + 1, left - 2 * e);
        }
        qexp[pos] = 0;
    };
    rec_q(0, g);
    return out;
}

ColKey poly_term_key(const Mono& m, int np, int nq) {
    ColKey key{PExp(np, 0), QExp(nq, 0)};
    for (const auto& [v, e] : m) {
        if (v.kind == VarKind::P)
            key.first.at(v.index) = e;
        else if (v.kind == VarKind::Q)
            key.second.at(v.index - 1) = e;
        else
            throw InvalidInput("quotient builder: unexpected variable " + var_name(v));
    }
    return key;
}

struct QuotientBuild {
    std::vector<PExp> basis;
    std::vector<int> degrees;
    std::vector<int> graded_dims;  // standard monomial count per degree, 0..top
    std::vector<Mat<MultiPoly>> mult;
};

// Quotient of Q[p_0..p_n, q_1..q_nq] by homogeneous generators, degree by
// degree: in each weighted degree the span of monomial multiples of the
// generators is eliminated exactly; the standard monomial basis must survive
// as a free complement, otherwise the build fails.
QuotientBuild build_quotient(int n, int nq, const std::vector<MultiPoly>& gens, int top) {
    const int np = n + 1;
    std::vector<int> gen_degree;
    for (const auto& g : gens) {
        int deg = 0;
        if (!g.is_weighted_homogeneous(&deg))
            throw CheckFailure("quotient builder: inhomogeneous generator");
        gen_degree.push_back(deg);
    }

    QuotientBuild out;
    out.graded_dims.assign(top + 1, 0);

    struct Bucket {
        std::vector<ColKey> cols;  // nonstandard block first
        std::map<ColKey, int> col_index;
        int n_nonstandard = 0;
        Echelon ech;
    };
    std::vector<Bucket> buckets(top + 2);

    for (int g = 0; g <= top + 1; ++g) {
        Bucket& bk = buckets[g];
        std::vector<ColKey> all = monomials_of_degree(np, nq, g);
        for (const auto& c : all)
            if (!is_standard(c.first)) bk.cols.push_back(c);
        bk.n_nonstandard = static_cast<int>(bk.cols.size());
        for (const auto& c : all)
            if (is_standard(c.first)) bk.cols.push_back(c);
        for (std::size_t i = 0; i < bk.cols.size(); ++i)
            bk.col_index.emplace(bk.cols[i], static_cast<int>(i));

        std::vector<std::vector<Rat>> rows;
        for (std::size_t j = 0; j < gens.size(); ++j) {
            const int rem = g - gen_degree[j];
            if (rem < 0) continue;
            for (const auto& [alpha, delta] : monomials_of_degree(np, nq, rem)) {
                std::vector<Rat> row(bk.cols.size());
                for (const auto& [m, c] : gens[j].terms()) {
                    ColKey key = poly_term_key(m, np, nq);
                    for (int t = 0; t < np; ++t) key.first[t] += alpha[t];
                    for (int t = 0; t < nq; ++t) key.second[t] += delta[t];
                    row[static_cast<std::size_t>(bk.col_index.at(key))] += c;
                }
                rows.push_back(std::move(row));
            }
        }
        bk.ech = rref(std::move(rows));

        // Standard monomials have degree <= top by construction, so in the
        // classical case the top+1 bucket has no standard columns and this
        // demands that the whole degree is ideal.
        bool pivots_ok = bk.ech.rank() == bk.n_nonstandard;
        for (int pc : bk.ech.pivot_cols)
            if (pc >= bk.n_nonstandard) pivots_ok = false;
        if (!pivots_ok)
            throw CheckFailure(
                "quotient builder: standard monomials fail to stay free in degree " +
                std::to_string(g) + " (rank " + std::to_string(bk.ech.rank()) + ")");
        if (g <= top)
            out.graded_dims[g] = static_cast<int>(bk.cols.size()) - bk.n_nonstandard;
    }

    // Global basis: the q-free standard monomials of degree <= top.
    std::map<PExp, int> basis_index;
    for (int g = 0; g <= top; ++g) {
        const Bucket& bk = buckets[g];
        for (int c = bk.n_nonstandard; c < static_cast<int>(bk.cols.size()); ++c)
            if (bk.cols[c].second == QExp(nq, 0)) basis_index.emplace(bk.cols[c].first, 0);
    }
    {
        std::vector<std::pair<int, PExp>> ordered;
        for (const auto& [bexp, idx] : basis_index) ordered.emplace_back(exp_sum(bexp), bexp);
        std::stable_sort(ordered.begin(), ordered.end());
        for (const auto& [deg, bexp] : ordered) {
            basis_index[bexp] = static_cast<int>(out.basis.size());
            out.basis.push_back(bexp);
            out.degrees.push_back(deg);
        }
    }

    // Multiplication matrices: columns are normal forms of p_i * b.
    const std::size_t nb = out.basis.size();
    out.mult.assign(np, Mat<MultiPoly>(nb, nb));
    for (int i = 0; i < np; ++i) {
        for (std::size_t b = 0; b < nb; ++b) {
            const int g = out.degrees[b] + 1;
            const Bucket& bk = buckets[g];
            PExp target = out.basis[b];
            target[i] += 1;
            std::vector<Rat> v(bk.cols.size());
            v[static_cast<std::size_t>(bk.col_index.at({target, QExp(nq, 0)}))] = 1;
            v = reduce_against(bk.ech, v);
            for (int c = bk.n_nonstandard; c < static_cast<int>(bk.cols.size()); ++c) {
                if (is_zero(v[static_cast<std::size_t>(c)])) continue;
                const auto& [bexp, dexp] = bk.cols[static_cast<std::size_t>(c)];
                Mono qmono;
                for (int t = 0; t < nq; ++t)
                    if (dexp[t] > 0) qmono.emplace_back(var_q(t + 1), dexp[t]);
                MultiPoly entry;
                entry.add_term(std::move(qmono), v[static_cast<std::size_t>(c)]);
                out.mult[i](static_cast<std::size_t>(basis_index.at(bexp)), b) += entry;
            }
        }
    }
    return out;
}

std::vector<MultiPoly> elementary_symmetric(int n) {
    // Coefficients of prod (x + p_i): e_1 .. e_{n+1}.
    std::vector<MultiPoly> e(n + 2);
    e[0] = MultiPoly::constant(1);
    for (int k = 1; k <= n + 1; ++k) e[k] = MultiPoly::zero();
    for (int i = 0; i <= n; ++i) {
        for (int k = std::min(i + 1, n + 1); k >= 1; --k)
            e[k] += e[k - 1] * MultiPoly::variable(var_p(i));
    }
    return {e.begin() + 1, e.end()};
}

Rat factorial_rat(int n) { return rat_factorial(n); }

std::complex<double> eval_pq(const MultiPoly& f, const std::vector<Cd>& p,
                             const std::vector<Cd>& q) {
    return f.eval([&](Var v) -> Cd {
        if (v.kind == VarKind::P) return p.at(static_cast<std::size_t>(v.index));
        if (v.kind == VarKind::Q) return q.at(static_cast<std::size_t>(v.index - 1));
        throw InvalidInput("eval_pq: unexpected variable " + var_name(v));
    });
}

double eval_scale_pq(const MultiPoly& f, const std::vector<Cd>& p, const std::vector<Cd>& q) {
    double s = 0.0;
    for (const auto& [m, c] : f.terms()) {
        double t = std::abs(to_double(c));
        for (const auto& [v, e] : m) {
            const double base = v.kind == VarKind::P ? std::abs(p.at(v.index))
                                                     : std::abs(q.at(v.index - 1));
            for (int i = 0; i < e; ++i) t *= base;
        }
        s += t;
    }
    return s;
}

}  // namespace

std::string basis_label(const PExp& e) {
    std::string out;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (!out.empty()) out += "*";
        out += "p_" + std::to_string(i);
        if (e[i] > 1) out += "^" + std::to_string(e[i]);
    }
    return out.empty() ? "1" : out;
}

const FlagRing& FlagRing::get(int n) {
    static std::map<int, std::unique_ptr<FlagRing>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::unique_ptr<FlagRing>(new FlagRing(n))).first;
    return *it->second;
}

FlagRing::FlagRing(int n) : n_(n), top_(n * (n + 1) / 2) {
    if (n < 1 || n > 4) throw InvalidInput("FlagRing: 1 <= n <= 4 required");
    QuotientBuild qb = build_quotient(n, 0, elementary_symmetric(n), top_);
    basis_ = std::move(qb.basis);
    degrees_ = std::move(qb.degrees);
    graded_dims_ = std::move(qb.graded_dims);

    Rat expected_rank = factorial_rat(n + 1);
    if (Rat(static_cast<int>(basis_.size())) != expected_rank)
        throw CheckFailure("FlagRing: basis dimension " + std::to_string(basis_.size()) +
                           " != (n+1)!");

    // Graded dimensions must match prod_{k=1}^{n} (1 + x + ... + x^k).
    std::vector<Rat> poincare{1};
    for (int k = 1; k <= n; ++k) {
        std::vector<Rat> next(poincare.size() + static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < poincare.size(); ++i)
            for (int j = 0; j <= k; ++j) next[i + static_cast<std::size_t>(j)] += poincare[i];
        poincare = std::move(next);
    }
    for (int g = 0; g <= top_; ++g)
        if (Rat(graded_dims_[g]) != poincare[static_cast<std::size_t>(g)])
            throw CheckFailure("FlagRing: graded dimension mismatch in degree " +
                               std::to_string(g));

    mult_.reserve(qb.mult.size());
    for (const auto& mq : qb.mult) {
        Mat<Rat> m(mq.rows(), mq.cols());
        for (std::size_t i = 0; i < mq.rows(); ++i)
            for (std::size_t j = 0; j < mq.cols(); ++j) m(i, j) = mq(i, j).constant_term();
        mult_.push_back(std::move(m));
    }

    for (std::size_t i = 0; i < basis_.size(); ++i)
        if (degrees_[i] == top_) {
            if (top_index_ != -1) throw CheckFailure("FlagRing: top degree not 1-dimensional");
            top_index_ = static_cast<int>(i);
        }
    if (top_index_ < 0) throw CheckFailure("FlagRing: missing top class");

    // Normalize the integral: the product of the positive roots integrates
    // to (n+1)! (Euler class vs Euler characteristic).
    MultiPoly vandermonde = MultiPoly::constant(1);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j < i; ++j)
            vandermonde *= MultiPoly::variable(var_p(i)) - MultiPoly::variable(var_p(j));
    scale_ = 1;  // temporary; class_of only multiplies matrices
    ClassRat v = class_of(vandermonde);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (static_cast<int>(i) != top_index_ && !is_zero(v[i]))
            throw CheckFailure("FlagRing: Euler class not concentrated in the top piece");
    if (is_zero(v[static_cast<std::size_t>(top_index_)]))
        throw CheckFailure("FlagRing: Euler class vanishes");
    scale_ = expected_rank / v[static_cast<std::size_t>(top_index_)];

    const std::size_t nb = basis_.size();
    gram_ = Mat<Rat>(nb, nb);
    for (std::size_t i = 0; i < nb; ++i) {
        ClassRat ei(nb, 0);
        ei[i] = 1;
        for (std::size_t j = 0; j < nb; ++j) {
            ClassRat ej(nb, 0);
            ej[j] = 1;
            gram_(i, j) = integrate(mult_classes(ei, ej));
        }
    }
    // Poincare duality: the pairing must be nondegenerate.
    std::vector<std::vector<Rat>> rows(nb, std::vector<Rat>(nb));
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < nb; ++j) rows[i][j] = gram_(i, j);
    if (rref(std::move(rows)).rank() != static_cast<int>(nb))
        throw CheckFailure("FlagRing: degenerate Poincare pairing");
}

MultiPoly FlagRing::basis_poly(int i) const {
    MultiPoly out = MultiPoly::constant(1);
    const PExp& e = basis_[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < e.size(); ++j)
        if (e[j] > 0) out *= MultiPoly::variable(var_p(static_cast<int>(j)), e[j]);
    return out;
}

ClassRat FlagRing::apply_monomial(const PExp& e, ClassRat v) const {
    for (std::size_t i = 0; i < e.size(); ++i)
        for (int rep = 0; rep < e[i]; ++rep) v = mult_[i].apply(v);
    return v;
}

ClassRat FlagRing::class_of(const MultiPoly& f) const {
    ClassRat out(basis_.size(), 0);
    for (const auto& [m, c] : f.terms()) {
        PExp e(static_cast<std::size_t>(n_ + 1), 0);
        for (const auto& [v, ex] : m) {
            if (v.kind != VarKind::P)
                throw InvalidInput("FlagRing::class_of: expected a polynomial in p only");
            e.at(static_cast<std::size_t>(v.index)) = ex;
        }
        ClassRat unit(basis_.size(), 0);
        unit[0] = 1;
        ClassRat r = apply_monomial(e, std::move(unit));
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * r[i];
    }
    return out;
}

ClassRat FlagRing::mult_classes(const ClassRat& a, const ClassRat& b) const {
    ClassRat out(basis_.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (is_zero(a[i])) continue;
        ClassRat r = apply_monomial(basis_[i], b);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += a[i] * r[j];
    }
    return out;
}

Rat FlagRing::integrate(const ClassRat& c) const {
    return c.at(static_cast<std::size_t>(top_index_)) * scale_;
}

Rat FlagRing::pairing(const ClassRat& a, const ClassRat& b) const {
    return integrate(mult_classes(a, b));
}

const QuantumRing& QuantumRing::get(int n) {
    static std::map<int, std::unique_ptr<QuantumRing>> cache;
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::unique_ptr<QuantumRing>(new QuantumRing(n))).first;
    return *it->second;
}

QuantumRing::QuantumRing(int n) : n_(n) {
    if (n < 1 || n > 3) throw InvalidInput("QuantumRing: 1 <= n <= 3 required");
    classical_ = &FlagRing::get(n);
    relations_ = conserved(n);
    QuotientBuild qb = build_quotient(n, n, relations_, classical_->top_degree());
    if (qb.basis != classical_->basis())
        throw CheckFailure("QuantumRing: quantum basis differs from the classical one");
    mult_ = std::move(qb.mult);
}

ClassPolyQ QuantumRing::apply_p(int i, const ClassPolyQ& v) const {
    return mult_[static_cast<std::size_t>(i)].apply(v);
}

ClassPolyQ QuantumRing::class_of(const MultiPoly& f) const {
    const std::size_t nb = static_cast<std::size_t>(rank());
    ClassPolyQ out(nb);
    for (const auto& [m, c] : f.terms()) {
        PExp e(static_cast<std::size_t>(n_ + 1), 0);
        Mono qpart;
        for (const auto& [v, ex] : m) {
            if (v.kind == VarKind::P)
                e.at(static_cast<std::size_t>(v.index)) = ex;
            else if (v.kind == VarKind::Q)
                qpart.emplace_back(v, ex);
            else
                throw InvalidInput("QuantumRing::class_of: expected a polynomial in p, q");
        }
        ClassPolyQ r(nb);
        r[0] = MultiPoly::constant(1);
        for (std::size_t i = 0; i < e.size(); ++i)
            for (int rep = 0; rep < e[i]; ++rep) r = apply_p(static_cast<int>(i), r);
        MultiPoly factor;
        factor.add_term(qpart, c);
        for (std::size_t i = 0; i < nb; ++i) out[i] += factor * r[i];
    }
    return out;
}

ClassPolyQ QuantumRing::quantum_product(const MultiPoly& a, const MultiPoly& b) const {
    return class_of(a * b);
}

MultiPoly QuantumRing::pairing_q(const ClassPolyQ& a, const ClassPolyQ& b) const {
    MultiPoly out;
    const auto& g = classical_->gram();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (b[j].is_zero() || is_zero(g(i, j))) continue;
            out += (a[i] * b[j]).scaled(g(i, j));
        }
    }
    return out;
}

MultiPoly QuantumRing::frobenius_pairing(const ClassPolyQ& a, const ClassPolyQ& b) const {
    // product of the classes, then the integral = top coefficient x scale
    const std::size_t nb = static_cast<std::size_t>(rank());
    ClassPolyQ prod(nb);
    for (std::size_t i = 0; i < nb; ++i) {
        if (a[i].is_zero()) continue;
        ClassPolyQ r = b;
        const PExp& e = classical_->basis()[i];
        for (std::size_t k = 0; k < e.size(); ++k)
            for (int rep = 0; rep < e[k]; ++rep) r = apply_p(static_cast<int>(k), r);
        for (std::size_t j = 0; j < nb; ++j) prod[j] += a[i] * r[j];
    }
    ClassRat top_unit(nb, 0);
    top_unit[static_cast<std::size_t>(classical_->top_index())] = 1;
    const Rat top_norm = classical_->integrate(top_unit);
    return prod[static_cast<std::size_t>(classical_->top_index())].scaled(top_norm);
}

std::vector<Mat<Cd>> QuantumRing::mult_at(const std::vector<Cd>& q) const {
    std::vector<Mat<Cd>> out;
    out.reserve(mult_.size());
    for (const auto& m : mult_) {
        Mat<Cd> e(m.rows(), m.cols());
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j)
                if (!m(i, j).is_zero())
                    e(i, j) = m(i, j).eval([&](Var v) -> Cd {
                        if (v.kind != VarKind::Q) throw InvalidInput("mult_at: non-q entry");
                        return q.at(static_cast<std::size_t>(v.index - 1));
                    });
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<FiberPoint> QuantumRing::fiber_points(const std::vector<Cd>& q, std::uint64_t seed,
                                                  double tol) const {
    if (static_cast<int>(q.size()) != n_) throw InvalidInput("fiber_points: expected n q-values");
    for (const Cd& qi : q)
        if (std::abs(qi) == 0.0) throw InvalidInput("fiber_points: all q_i must be nonzero");

    const int nb = rank();
    const auto ms = mult_at(q);
    std::vector<Eigen::MatrixXcd> em(ms.size());
    for (std::size_t i = 0; i < ms.size(); ++i) {
        em[i].resize(nb, nb);
        for (int r = 0; r < nb; ++r)
            for (int c = 0; c < nb; ++c)
                em[i](r, c) = ms[i](static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    }

    std::vector<std::vector<MultiPoly>> jac(relations_.size());
    for (std::size_t m = 0; m < relations_.size(); ++m)
        for (int j = 0; j <= n_; ++j) jac[m].push_back(relations_[m].derivative(var_p(j)));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    std::string last_error = "no attempt";
    for (int attempt = 0; attempt < 5; ++attempt) {
        Eigen::MatrixXcd mc = Eigen::MatrixXcd::Zero(nb, nb);
        for (std::size_t i = 0; i < em.size(); ++i) mc += Cd(unit(rng), unit(rng)) * em[i];
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(mc);
        if (es.info() != Eigen::Success) {
            last_error = "eigensolver failed";
            continue;
        }

        std::vector<FiberPoint> pts;
        bool ok = true;
        for (int k = 0; k < nb && ok; ++k) {
            Eigen::VectorXcd v = es.eigenvectors().col(k);
            FiberPoint pt;
            pt.p.resize(static_cast<std::size_t>(n_ + 1));
            const double nrm = v.squaredNorm();
            for (int i = 0; i <= n_; ++i)
                pt.p[static_cast<std::size_t>(i)] = (v.adjoint() * em[static_cast<std::size_t>(i)] * v)(0, 0) / nrm;

            // Newton polish on the square system D_m(p, q) = 0.
            for (int it = 0; it < 12; ++it) {
                Eigen::VectorXcd rhs(n_ + 1);
                Eigen::MatrixXcd jm(n_ + 1, n_ + 1);
                double worst = 0;
                for (int m = 0; m <= n_; ++m) {
                    const Cd val = eval_pq(relations_[static_cast<std::size_t>(m)], pt.p, q);
                    rhs(m) = -val;
                    worst = std::max(worst, std::abs(val));
                    for (int j = 0; j <= n_; ++j)
                        jm(m, j) = eval_pq(jac[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)], pt.p, q);
                }
                if (worst < 1e-14) break;
                Eigen::VectorXcd delta = jm.fullPivLu().solve(rhs);
                for (int j = 0; j <= n_; ++j) pt.p[static_cast<std::size_t>(j)] += delta(j);
            }

            double res = 0;
            for (int m = 0; m <= n_; ++m) {
                const double scale = eval_scale_pq(relations_[static_cast<std::size_t>(m)], pt.p, q);
                res = std::max(res,
                               std::abs(eval_pq(relations_[static_cast<std::size_t>(m)], pt.p, q)) /
                                   (1.0 + scale));
            }
            pt.residual = res;
            if (res > tol) {
                ok = false;
                last_error = "residual " + std::to_string(res) + " above tolerance";
                break;
            }
            Eigen::MatrixXcd jm(n_ + 1, n_ + 1);
            for (int m = 0; m <= n_; ++m)
                for (int j = 0; j <= n_; ++j)
                    jm(m, j) = eval_pq(jac[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)], pt.p, q);
            pt.jacobian = jm.fullPivLu().determinant();
            pts.push_back(std::move(pt));
        }
        if (!ok) continue;

        // Deduplicate at relative 1e-8 on the p-vectors.
        std::sort(pts.begin(), pts.end(), [](const FiberPoint& a, const FiberPoint& b) {
            for (std::size_t i = 0; i < a.p.size(); ++i) {
                if (a.p[i].real() != b.p[i].real()) return a.p[i].real() < b.p[i].real();
                if (a.p[i].imag() != b.p[i].imag()) return a.p[i].imag() < b.p[i].imag();
            }
            return false;
        });
        double pscale = 0;
        for (const auto& pt : pts)
            for (const Cd& pi : pt.p) pscale = std::max(pscale, std::abs(pi));
        std::vector<FiberPoint> uniq;
        for (auto& pt : pts) {
            bool dup = false;
            for (const auto& u : uniq) {
                double dist = 0;
                for (std::size_t i = 0; i < pt.p.size(); ++i)
                    dist = std::max(dist, std::abs(pt.p[i] - u.p[i]));
                if (dist <= 1e-8 * (1.0 + pscale)) {
                    dup = true;
                    break;
                }
            }
            if (!dup) uniq.push_back(std::move(pt));
        }
        if (static_cast<int>(uniq.size()) == nb) return uniq;
        last_error = "found " + std::to_string(uniq.size()) + " distinct points, expected " +
                     std::to_string(nb);
    }
    throw CheckFailure("fiber_points: defective eigenproblem after 5 attempts (" + last_error +
                       ")");
}

void QuantumRing::calibrate_sign() const {
    if (sign_ != 0) return;
    std::vector<Cd> q;
    for (int i = 1; i <= n_; ++i)
        q.emplace_back(0.31 + 0.07 * i, 0.11 + 0.05 * i);  // fixed generic point
    const auto pts = fiber_points(q, /*seed=*/9001);
    const int nb = rank();
    auto evalq = [&](const MultiPoly& f) {
        return f.eval([&](Var v) -> Cd {
            if (v.kind != VarKind::Q) throw InvalidInput("calibrate: non-q variable");
            return q.at(static_cast<std::size_t>(v.index - 1));
        });
    };
    double err_plus = 0, err_minus = 0;
    for (int i = 0; i < nb; ++i) {
        const MultiPoly bi = classical_->basis_poly(i);
        ClassPolyQ ci(static_cast<std::size_t>(nb));
        ci[static_cast<std::size_t>(i)] = MultiPoly::constant(1);
        for (int j = 0; j < nb; ++j) {
            const MultiPoly bj = classical_->basis_poly(j);
            ClassPolyQ cj(static_cast<std::size_t>(nb));
            cj[static_cast<std::size_t>(j)] = MultiPoly::constant(1);
            Cd sum = 0;
            for (const auto& pt : pts)
                sum += eval_pq(bi, pt.p, q) * eval_pq(bj, pt.p, q) / pt.jacobian;
            const Cd exact = evalq(frobenius_pairing(ci, cj));
            err_plus = std::max(err_plus, std::abs(sum - exact));
            err_minus = std::max(err_minus, std::abs(-sum - exact));
        }
    }
    if (std::min(err_plus, err_minus) > 1e-6)
        throw CheckFailure("residue sign calibration failed (errors " + std::to_string(err_plus) +
                           ", " + std::to_string(err_minus) + ")");
    sign_ = err_plus <= err_minus ? 1 : -1;
}

int QuantumRing::residue_sign() const {
    calibrate_sign();
    return sign_;
}

Cd QuantumRing::residue_pairing(const MultiPoly& a, const MultiPoly& b, const std::vector<Cd>& q,
                                std::uint64_t seed, int force_sign) const {
    const int sign = force_sign != 0 ? force_sign : residue_sign();
    const auto pts = fiber_points(q, seed);
    Cd sum = 0;
    for (const auto& pt : pts) {
        double jscale = 0;
        for (const Cd& pi : pt.p) jscale = std::max(jscale, std::abs(pi));
        if (std::abs(pt.jacobian) < 1e-10 * (1.0 + std::pow(jscale, n_ * (n_ + 1) / 2)))
            throw CheckFailure("residue_pairing: near-degenerate fiber point; try a different q");
        sum += eval_pq(a, pt.p, q) * eval_pq(b, pt.p, q) / pt.jacobian;
    }
    return static_cast<double>(sign) * sum;
}

CheckReport check_quantum_ring(int n) {
    Stopwatch sw;
    CheckReport rep;
    rep.check = "quantum-ring";
    rep.paper_anchor = "Example 6 and Corollary (1) of Theorem 4";
    rep.pass = true;
    rep.details["n"] = n;

    const QuantumRing& ring = QuantumRing::get(n);  // construction verifies freeness
    const FlagRing& cl = ring.classical();
    const int nb = ring.rank();
    rep.details["rank"] = nb;

    // sum_i p_i o p_i = 2 q_1 + ... + 2 q_n as a matrix identity.
    {
        const std::size_t sz = static_cast<std::size_t>(nb);
        Mat<MultiPoly> acc(sz, sz);
        for (int i = 0; i <= n; ++i)
            acc = acc + ring.mult_matrix(i) * ring.mult_matrix(i);
        MultiPoly twoq;
        for (int i = 1; i <= n; ++i) twoq += MultiPoly::variable(var_q(i)).scaled(2);
        bool diag_ok = true;
        for (std::size_t r = 0; r < sz; ++r)
            for (std::size_t c = 0; c < sz; ++c) {
                const MultiPoly expect = r == c ? twoq : MultiPoly::zero();
                if (!(acc(r, c) == expect)) diag_ok = false;
            }
        rep.details["example6_p2"] = diag_ok ? "pass" : "fail";
        if (!diag_ok) rep.pass = false;
    }

    // Multiplication matrices commute.
    {
        bool comm_ok = true;
        for (int i = 0; i <= n && comm_ok; ++i)
            for (int j = i + 1; j <= n && comm_ok; ++j)
                if (!(ring.mult_matrix(i) * ring.mult_matrix(j) ==
                      ring.mult_matrix(j) * ring.mult_matrix(i)))
                    comm_ok = false;
        rep.details["commuting"] = comm_ok ? "pass" : "fail";
        if (!comm_ok) rep.pass = false;
    }

    // Classical limit at q = 0.
    {
        bool limit_ok = true;
        for (int i = 0; i <= n && limit_ok; ++i) {
            const auto& mq = ring.mult_matrix(i);
            for (std::size_t r = 0; r < mq.rows() && limit_ok; ++r)
                for (std::size_t c = 0; c < mq.cols(); ++c) {
                    MultiPoly at0 = mq(r, c);
                    for (int k = 1; k <= n; ++k) at0 = at0.substitute(var_q(k), MultiPoly::zero());
                    if (!(at0.constant_term() == cl.mult_matrix(i)(r, c)) || !at0.is_constant()) {
                        limit_ok = false;
                        break;
                    }
                }
        }
        rep.details["classical_limit"] = limit_ok ? "pass" : "fail";
        if (!limit_ok) rep.pass = false;
    }

    // Normal forms of the relations vanish.
    {
        bool rel_ok = true;
        for (const auto& d : ring.relations()) {
            ClassPolyQ c = ring.class_of(d);
            for (const auto& e : c)
                if (!e.is_zero()) rel_ok = false;
        }
        rep.details["relations_vanish"] = rel_ok ? "pass" : "fail";
        if (!rel_ok) rep.pass = false;
    }

    rep.residual = rep.pass ? 0.0 : 1.0;
    rep.runtime_ms = sw.ms();
    return rep;
}

CheckReport check_residue_pairing(int n, int samples, std::uint64_t seed, int force_sign) {
    Stopwatch sw;
    CheckReport rep;
    rep.check = "residue-check";
    rep.paper_anchor = "residue formula for the Poincare pairing";
    rep.seed = seed;
    rep.details["n"] = n;
    rep.details["samples"] = samples;

    const QuantumRing& ring = QuantumRing::get(n);
    const FlagRing& cl = ring.classical();
    const int nb = ring.rank();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mod(0.3, 1.2), arg(0.0, 2.0 * 3.14159265358979323846);

    // Exact side: the q-extended Poincare pairing on the quantum algebra
    // (Frobenius form), a polynomial in q per basis pair.
    std::vector<std::vector<MultiPoly>> exact(static_cast<std::size_t>(nb),
                                              std::vector<MultiPoly>(static_cast<std::size_t>(nb)));
    for (int i = 0; i < nb; ++i)
        for (int j = i; j < nb; ++j) {
            ClassPolyQ ci(static_cast<std::size_t>(nb)), cj(static_cast<std::size_t>(nb));
            ci[static_cast<std::size_t>(i)] = MultiPoly::constant(1);
            cj[static_cast<std::size_t>(j)] = MultiPoly::constant(1);
            exact[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                ring.frobenius_pairing(ci, cj);
        }

    double worst = 0;
    for (int s = 0; s < samples; ++s) {
        std::vector<Cd> q;
        for (int i = 0; i < n; ++i) q.push_back(std::polar(mod(rng), arg(rng)));
        auto evalq = [&](const MultiPoly& f) {
            return f.eval([&](Var v) -> Cd { return q.at(static_cast<std::size_t>(v.index - 1)); });
        };
        for (int i = 0; i < nb; ++i)
            for (int j = i; j < nb; ++j) {
                const Cd val = ring.residue_pairing(cl.basis_poly(i), cl.basis_poly(j), q,
                                                    seed + static_cast<std::uint64_t>(s), force_sign);
                const Cd want = evalq(exact[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
                worst = std::max(worst, std::abs(val - want) / (1.0 + std::abs(want)));
            }
    }
    rep.residual = worst;
    rep.pass = worst < 1e-8;
    rep.details["sign"] = force_sign != 0 ? force_sign : ring.residue_sign();
    rep.runtime_ms = sw.ms();
    return rep;
}

}  // namespace qtoda
