#include "qtoda/weyl.hpp"

#include <sstream>
#include <stdexcept>

namespace qtoda {

namespace {

int vec_sum(const std::vector<int>& v) {
    int s = 0;
    for (int x : v) s += x;
    return s;
}

// d_i - d_{i+1} with d_0 = d_{n+1} = 0 (q-exponent vector indexed 1..n).
int t_multiplier(const std::vector<int>& d, int site) {
    const int n = static_cast<int>(d.size());
    const int di = (site >= 1 && site <= n) ? d[site - 1] : 0;
    const int di1 = (site + 1 >= 1 && site + 1 <= n) ? d[site] : 0;
    return di - di1;
}

}  // namespace

DiffOp DiffOp::constant(int n, const Rat& c) {
    DiffOp x(n);
    x.add_term(OpKey{std::vector<int>(n, 0), std::vector<int>(n + 1, 0), 0}, c);
    return x;
}

DiffOp DiffOp::q_monomial(int n, const std::vector<int>& d, const Rat& c) {
    DiffOp x(n);
    x.add_term(OpKey{d, std::vector<int>(n + 1, 0), 0}, c);
    return x;
}

DiffOp DiffOp::h_del(int n, int site, int power) {
    DiffOp x(n);
    std::vector<int> a(n + 1, 0);
    a[site] = power;
    x.add_term(OpKey{std::vector<int>(n, 0), a, 0}, 1);
    return x;
}

DiffOp DiffOp::hbar(int n, int power) {
    DiffOp x(n);
    x.add_term(OpKey{std::vector<int>(n, 0), std::vector<int>(n + 1, 0), power}, 1);
    return x;
}

void DiffOp::add_term(OpKey key, Rat c) {
    if (qtoda::is_zero(c)) return;
    if (static_cast<int>(key.d.size()) != n_ || static_cast<int>(key.a.size()) != n_ + 1)
        throw std::invalid_argument("DiffOp term shape mismatch");
    for (int e : key.d)
        if (e < 0) throw std::invalid_argument("DiffOp: negative q-exponents are excluded");
    for (int e : key.a)
        if (e < 0) throw std::invalid_argument("DiffOp: negative derivative exponents");
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(std::move(key), std::move(c));
    } else {
        it->second += c;
        if (qtoda::is_zero(it->second)) terms_.erase(it);
    }
}

DiffOp DiffOp::operator-() const {
    DiffOp out(n_);
    for (const auto& [k, c] : terms_) out.terms_.emplace(k, -c);
    return out;
}

DiffOp& DiffOp::operator+=(const DiffOp& o) {
    if (o.n_ != n_) throw std::invalid_argument("DiffOp site mismatch");
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
}

DiffOp& DiffOp::operator-=(const DiffOp& o) {
    if (o.n_ != n_) throw std::invalid_argument("DiffOp site mismatch");
    for (const auto& [k, c] : o.terms_) add_term(k, -c);
    return *this;
}

DiffOp DiffOp::scaled(const Rat& c) const {
    DiffOp out(n_);
    if (qtoda::is_zero(c)) return out;
    for (const auto& [k, co] : terms_) out.terms_.emplace(k, co * c);
    return out;
}

int DiffOp::q_degree() const {
    int deg = 0;
    for (const auto& [k, c] : terms_) deg = std::max(deg, vec_sum(k.d));
    return deg;
}

bool DiffOp::is_weighted_homogeneous(int* degree_out) const {
    bool have = false;
    int deg = 0;
    for (const auto& [k, c] : terms_) {
        const int d = k.k + vec_sum(k.a) + 2 * vec_sum(k.d);
        if (!have) {
            deg = d;
            have = true;
        } else if (d != deg) {
            return false;
        }
    }
    if (degree_out && have) *degree_out = deg;
    return true;
}

std::string DiffOp::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto rit = terms_.rbegin(); rit != terms_.rend(); ++rit) {
        const auto& [key, c] = *rit;
        const bool neg = sgn(c) < 0;
        Rat mag = neg ? Rat(-c) : c;
        if (first) {
            if (neg) os << "-";
            first = false;
        } else {
            os << (neg ? " - " : " + ");
        }
        const int htot = key.k + vec_sum(key.a);
        std::vector<std::string> factors;
        if (htot > 0) factors.push_back(htot == 1 ? "h" : "h^" + std::to_string(htot));
        for (int i = 0; i < n_; ++i)
            if (key.d[i] > 0)
                factors.push_back("q_" + std::to_string(i + 1) +
                                  (key.d[i] > 1 ? "^" + std::to_string(key.d[i]) : ""));
        for (int i = 0; i <= n_; ++i)
            if (key.a[i] > 0)
                factors.push_back("d_" + std::to_string(i) +
                                  (key.a[i] > 1 ? "^" + std::to_string(key.a[i]) : ""));
        const bool unit = (mag == 1);
        if (!unit || factors.empty()) os << rat_to_string(mag);
        bool star = !unit || factors.empty();
        for (const auto& f : factors) {
            if (star) os << "*";
            os << f;
            star = true;
        }
    }
    return os.str();
}

DiffOp compose(const DiffOp& x, const DiffOp& y) {
    if (x.n() != y.n()) throw std::invalid_argument("compose: site mismatch");
    const int n = x.n();
    DiffOp out(n);
    for (const auto& [kx, cx] : x.terms()) {
        for (const auto& [ky, cy] : y.terms()) {
            // Move (h d_i)^{kx.a_i} past q^{ky.d}:
            // (h d_i)^m q^d = q^d (h d_i + h c_i)^m,  c_i = d_i - d_{i+1}.
            std::vector<int> d(n);
            for (int i = 0; i < n; ++i) d[i] = kx.d[i] + ky.d[i];
            // Expand the binomials site by site.
            struct Partial {
                std::vector<int> extra_a;  // derivative exponents kept
                int extra_k;               // h-powers released
                Rat coeff;
            };
            std::vector<Partial> parts{{std::vector<int>(n + 1, 0), 0, Rat(1)}};
            for (int i = 0; i <= n; ++i) {
                const int m = kx.a[i];
                if (m == 0) continue;
                const int ci = t_multiplier(ky.d, i);
                std::vector<Partial> next;
                for (const auto& part : parts) {
                    if (ci == 0) {
                        Partial p = part;
                        p.extra_a[i] += m;
                        next.push_back(std::move(p));
                        continue;
                    }
                    for (int j = m; j >= 0; --j) {
                        // j derivatives survive, m - j scalars h*ci
                        Partial p = part;
                        p.extra_a[i] += j;
                        p.extra_k += m - j;
                        Rat scal = rat_binomial(m, j);
                        Rat cfac = 1;
                        for (int t = 0; t < m - j; ++t) cfac *= ci;
                        p.coeff = part.coeff * scal * cfac;
                        next.push_back(std::move(p));
                    }
                }
                parts = std::move(next);
            }
            for (const auto& part : parts) {
                OpKey key;
                key.d = d;
                key.a.resize(n + 1);
                for (int i = 0; i <= n; ++i) key.a[i] = part.extra_a[i] + ky.a[i];
                key.k = kx.k + ky.k + part.extra_k;
                out.add_term(std::move(key), cx * cy * part.coeff);
            }
        }
    }
    return out;
}

DiffOp commutator(const DiffOp& x, const DiffOp& y) {
    return compose(x, y) - compose(y, x);
}

MultiPoly symbol(const DiffOp& x) {
    MultiPoly out;
    for (const auto& [key, c] : x.terms()) {
        if (key.k != 0) continue;
        Mono m;
        for (int i = 0; i <= x.n(); ++i)
            if (key.a[i] > 0) m.emplace_back(var_p(i), key.a[i]);
        for (int i = 0; i < x.n(); ++i)
            if (key.d[i] > 0) m.emplace_back(var_q(i + 1), key.d[i]);
        std::sort(m.begin(), m.end());
        out.add_term(std::move(m), c);
    }
    return out;
}

QuantizeResult quantize(const MultiPoly& f, int n) {
    if (f.depends_on(VarKind::Lambda) || f.depends_on(VarKind::Hbar))
        throw std::invalid_argument("quantize expects a polynomial in p, q only");
    QuantizeResult res{DiffOp(n), true};
    for (const auto& [m, c] : f.terms()) {
        OpKey key;
        key.d.assign(n, 0);
        key.a.assign(n + 1, 0);
        for (const auto& [v, e] : m) {
            if (v.kind == VarKind::P) {
                key.a.at(v.index) = e;
            } else if (v.kind == VarKind::Q) {
                key.d.at(v.index - 1) = e;
            } else {
                throw std::invalid_argument("quantize: unexpected variable " + var_name(v));
            }
        }
        for (int j = 1; j <= n; ++j) {
            if (key.d[j - 1] > 0 && (key.a[j] > 0 || key.a[j - 1] > 0))
                res.ordering_independent = false;
        }
        res.op.add_term(std::move(key), c);
    }
    return res;
}

TPoly tpoly_scaled(const TPoly& f, const LaurentH& c) {
    TPoly out;
    if (c.is_zero()) return out;
    for (const auto& [m, co] : f) {
        LaurentH v = co * c;
        if (!v.is_zero()) out.emplace(m, std::move(v));
    }
    return out;
}

TPoly tpoly_add(TPoly a, const TPoly& b) {
    for (const auto& [m, c] : b) {
        auto [it, inserted] = a.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) a.erase(it);
        }
    }
    return a;
}

TPoly tpoly_derivative(const TPoly& f, int site) {
    TPoly out;
    for (const auto& [m, c] : f) {
        if (site >= static_cast<int>(m.size()) || m[site] == 0) continue;
        TMono dm = m;
        dm[site] -= 1;
        LaurentH dc = c.scaled(m[site]);
        auto [it, inserted] = out.emplace(std::move(dm), dc);
        if (!inserted) it->second += dc;
    }
    return out;
}

bool tpoly_is_zero(const TPoly& f) {
    for (const auto& [m, c] : f)
        if (!c.is_zero()) return false;
    return true;
}

std::string tpoly_to_string(const TPoly& f, int nsites) {
    if (f.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : f) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.to_string() << ")";
        for (int i = 0; i < nsites; ++i)
            if (i < static_cast<int>(m.size()) && m[i] > 0) {
                os << "*t_" << i;
                if (m[i] > 1) os << "^" << m[i];
            }
    }
    return os.str();
}

void QSeries::add(const std::vector<int>& d, const TPoly& f) {
    if (static_cast<int>(d.size()) != n_) throw std::invalid_argument("QSeries shape");
    if (vec_sum(d) > order_) return;
    auto [it, inserted] = coeffs_.emplace(d, f);
    if (!inserted) it->second = tpoly_add(it->second, f);
    if (tpoly_is_zero(it->second)) coeffs_.erase(d);
}

bool QSeries::is_zero() const {
    for (const auto& [d, f] : coeffs_)
        if (!tpoly_is_zero(f)) return false;
    return true;
}

QSeries& QSeries::operator-=(const QSeries& o) {
    if (o.n_ != n_) throw std::invalid_argument("QSeries site mismatch");
    order_ = std::min(order_, o.order_);
    for (const auto& [d, f] : o.coeffs_) {
        if (vec_sum(d) > order_) continue;
        TPoly neg;
        for (const auto& [m, c] : f) neg.emplace(m, -c);
        add(d, neg);
    }
    // drop coefficients beyond the tightened order
    for (auto it = coeffs_.begin(); it != coeffs_.end();)
        it = vec_sum(it->first) > order_ ? coeffs_.erase(it) : std::next(it);
    return *this;
}

std::string QSeries::to_string() const {
    std::ostringstream os;
    os << "O(" << order_ + 1 << ")";
    for (const auto& [d, f] : coeffs_) {
        os << " ; q^(";
        for (std::size_t i = 0; i < d.size(); ++i) os << (i ? "," : "") << d[i];
        os << "): " << tpoly_to_string(f, n_ + 1);
    }
    return os.str();
}

QSeries apply(const DiffOp& x, const QSeries& s) {
    if (x.n() != s.n()) throw std::invalid_argument("apply: site mismatch");
    const int n = x.n();
    QSeries out(n, s.order() - x.q_degree());
    for (const auto& [key, c] : x.terms()) {
        for (const auto& [d, f] : s.coeffs()) {
            TPoly g = f;
            for (int i = 0; i <= n; ++i) {
                const int mult = t_multiplier(d, i);
                for (int rep = 0; rep < key.a[i]; ++rep) {
                    // (h d_i): q^d g -> q^d (h mult g + h dg/dt_i)
                    TPoly part = tpoly_scaled(g, LaurentH::h_power(1, mult));
                    TPoly der = tpoly_derivative(g, i);
                    g = tpoly_add(std::move(part), tpoly_scaled(der, LaurentH::h_power(1)));
                }
            }
            std::vector<int> dt(n);
            for (int i = 0; i < n; ++i) dt[i] = d[i] + key.d[i];
            out.add(dt, tpoly_scaled(g, LaurentH::h_power(key.k, c)));
        }
    }
    return out;
}

}  // namespace qtoda
