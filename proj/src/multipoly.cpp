#include "qtoda/multipoly.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace qtoda {

std::string rat_to_string(const Rat& r) {
    return r.get_str();
}

Rat rat_from_string(std::string_view s) {
    try {
        Rat r{std::string(s)};
        r.canonicalize();
        return r;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad rational literal: " + std::string(s));
    }
}

Rat rat_binomial(long n, long k) {
    if (k < 0 || k > n) return 0;
    Int num;
    mpz_bin_uiui(num.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Rat(num);
}

Rat rat_factorial(long n) {
    Int f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return Rat(f);
}

std::string var_name(Var v) {
    switch (v.kind) {
        case VarKind::Lambda: return "lambda";
        case VarKind::Hbar: return "h";
        case VarKind::P: return "p_" + std::to_string(v.index);
        case VarKind::Q: return "q_" + std::to_string(v.index);
        case VarKind::U: return "u_" + std::to_string(v.index);
        case VarKind::V: return "v_" + std::to_string(v.index);
    }
    return "?";
}

int var_weight(Var v) {
    return v.kind == VarKind::Q ? 2 : 1;
}

int mono_total_degree(const Mono& m) {
    int d = 0;
    for (const auto& [v, e] : m) d += e;
    return d;
}

int mono_weighted_degree(const Mono& m) {
    int d = 0;
    for (const auto& [v, e] : m) d += e * var_weight(v);
    return d;
}

Mono mono_mul(const Mono& a, const Mono& b) {
    Mono out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first == b[j].first) {
            out.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i, ++j;
        } else if (a[i].first < b[j].first) {
            out.push_back(a[i++]);
        } else {
            out.push_back(b[j++]);
        }
    }
    for (; i < a.size(); ++i) out.push_back(a[i]);
    for (; j < b.size(); ++j) out.push_back(b[j]);
    return out;
}

bool GrevlexLess::operator()(const Mono& a, const Mono& b) const {
    const int da = mono_total_degree(a), db = mono_total_degree(b);
    if (da != db) return da < db;
    // Merged ascending scan; larger exponent at the first differing
    // (smallest) variable makes the monomial smaller.
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first == b[j].first) {
            if (a[i].second != b[j].second) return a[i].second > b[j].second;
            ++i, ++j;
        } else if (a[i].first < b[j].first) {
            return true;  // a has the smaller variable with exponent > 0
        } else {
            return false;
        }
    }
    if (i < a.size()) return true;
    return false;
}

MultiPoly MultiPoly::constant(Rat c) {
    MultiPoly p;
    p.add_term({}, std::move(c));
    return p;
}

MultiPoly MultiPoly::variable(Var v, int exp) {
    MultiPoly p;
    if (exp == 0) return constant(1);
    p.add_term(Mono{{v, exp}}, 1);
    return p;
}

bool MultiPoly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rat MultiPoly::constant_term() const {
    auto it = terms_.find(Mono{});
    return it == terms_.end() ? Rat(0) : it->second;
}

void MultiPoly::add_term(Mono m, Rat c) {
    if (qtoda::is_zero(c)) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(std::move(m), std::move(c));
    } else {
        it->second += c;
        if (qtoda::is_zero(it->second)) terms_.erase(it);
    }
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly out;
    for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
    return out;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    MultiPoly out;
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) out.add_term(mono_mul(ma, mb), ca * cb);
    return out;
}

MultiPoly MultiPoly::scaled(const Rat& c) const {
    MultiPoly out;
    if (qtoda::is_zero(c)) return out;
    for (const auto& [m, co] : terms_) out.terms_.emplace(m, co * c);
    return out;
}

MultiPoly MultiPoly::pow(int k) const {
    MultiPoly out = constant(1);
    for (int i = 0; i < k; ++i) out *= *this;
    return out;
}

MultiPoly MultiPoly::derivative(Var v) const {
    MultiPoly out;
    for (const auto& [m, c] : terms_) {
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i].first == v) {
                Mono dm = m;
                Rat dc = c * m[i].second;
                if (dm[i].second == 1) {
                    dm.erase(dm.begin() + static_cast<long>(i));
                } else {
                    dm[i].second -= 1;
                }
                out.add_term(std::move(dm), std::move(dc));
                break;
            }
        }
    }
    return out;
}

MultiPoly MultiPoly::substitute(Var v, const MultiPoly& value) const {
    MultiPoly out;
    for (const auto& [m, c] : terms_) {
        Mono rest;
        int exp = 0;
        for (const auto& [mv, me] : m) {
            if (mv == v)
                exp = me;
            else
                rest.emplace_back(mv, me);
        }
        MultiPoly term;
        term.add_term(std::move(rest), c);
        if (exp > 0) term *= value.pow(exp);
        out += term;
    }
    return out;
}

std::optional<int> MultiPoly::weighted_degree() const {
    std::optional<int> best;
    for (const auto& [m, c] : terms_) {
        const int d = mono_weighted_degree(m);
        if (!best || d > *best) best = d;
    }
    return best;
}

bool MultiPoly::is_weighted_homogeneous(int* degree_out) const {
    std::optional<int> deg;
    for (const auto& [m, c] : terms_) {
        const int d = mono_weighted_degree(m);
        if (!deg)
            deg = d;
        else if (*deg != d)
            return false;
    }
    if (degree_out && deg) *degree_out = *deg;
    return true;
}

MultiPoly MultiPoly::lambda_coefficient(int k) const {
    MultiPoly out;
    for (const auto& [m, c] : terms_) {
        Mono rest;
        int exp = 0;
        for (const auto& [v, e] : m) {
            if (v.kind == VarKind::Lambda)
                exp = e;
            else
                rest.emplace_back(v, e);
        }
        if (exp == k) out.add_term(std::move(rest), c);
    }
    return out;
}

int MultiPoly::lambda_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_)
        for (const auto& [v, e] : m)
            if (v.kind == VarKind::Lambda && e > d) d = e;
    return d;
}

bool MultiPoly::depends_on(VarKind kind) const {
    for (const auto& [m, c] : terms_)
        for (const auto& [v, e] : m)
            if (v.kind == kind) return true;
    return false;
}

int MultiPoly::max_index(VarKind kind) const {
    int idx = -1;
    for (const auto& [m, c] : terms_)
        for (const auto& [v, e] : m)
            if (v.kind == kind && v.index > idx) idx = v.index;
    return idx;
}

std::complex<double> MultiPoly::eval(const std::function<std::complex<double>(Var)>& x) const {
    std::complex<double> acc = 0.0;
    for (const auto& [m, c] : terms_) {
        std::complex<double> t = to_double(c);
        for (const auto& [v, e] : m) {
            const std::complex<double> xv = x(v);
            for (int i = 0; i < e; ++i) t *= xv;
        }
        acc += t;
    }
    return acc;
}

Rat MultiPoly::eval_rat(const std::function<Rat(Var)>& x) const {
    Rat acc = 0;
    for (const auto& [m, c] : terms_) {
        Rat t = c;
        for (const auto& [v, e] : m) {
            const Rat xv = x(v);
            for (int i = 0; i < e; ++i) t *= xv;
        }
        acc += t;
    }
    return acc;
}

std::string MultiPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [m, c] = *it;
        const bool neg = sgn(c) < 0;
        Rat mag = neg ? Rat(-c) : c;
        if (first) {
            if (neg) os << "-";
            first = false;
        } else {
            os << (neg ? " - " : " + ");
        }
        const bool unit = (mag == 1);
        if (!unit || m.empty()) os << rat_to_string(mag);
        bool star = !unit || m.empty();
        for (const auto& [v, e] : m) {
            if (star) os << "*";
            os << var_name(v);
            if (e > 1) os << "^" << e;
            star = true;
        }
    }
    return os.str();
}

namespace {

// Minimal recursive-descent parser over + - * ^ ( ), rational literals and
// the variable names emitted by to_string (plus J_i shorthands).
struct Parser {
    std::string_view s;
    std::size_t pos = 0;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("parse error at position " + std::to_string(pos) + ": " + what);
    }

    MultiPoly parse_expr() {
        MultiPoly acc = parse_term();
        for (;;) {
            skip();
            if (eat('+'))
                acc += parse_term();
            else if (eat('-'))
                acc -= parse_term();
            else
                return acc;
        }
    }

    MultiPoly parse_term() {
        MultiPoly acc = parse_power();
        for (;;) {
            skip();
            if (eat('*'))
                acc *= parse_power();
            else
                return acc;
        }
    }

    MultiPoly parse_power() {
        MultiPoly base = parse_atom();
        skip();
        if (eat('^')) {
            skip();
            std::size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (start == pos) fail("expected exponent");
            return base.pow(std::stoi(std::string(s.substr(start, pos - start))));
        }
        return base;
    }

    MultiPoly parse_atom() {
        skip();
        if (pos >= s.size()) fail("unexpected end");
        if (eat('(')) {
            MultiPoly inner = parse_expr();
            if (!eat(')')) fail("expected )");
            return inner;
        }
        if (eat('-')) return -parse_atom();
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos;
            while (pos < s.size() &&
                   (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '/'))
                ++pos;
            return MultiPoly::constant(rat_from_string(s.substr(start, pos - start)));
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                ++pos;
            std::string name(s.substr(start, pos - start));
            if (name == "lambda" || name == "l") return MultiPoly::variable(var_lambda());
            if (name == "h" || name == "hbar") return MultiPoly::variable(var_hbar());
            auto indexed = [&](const std::string& prefix) -> std::optional<int> {
                if (name.size() > prefix.size() && name.compare(0, prefix.size(), prefix) == 0)
                    return std::stoi(name.substr(prefix.size()));
                return std::nullopt;
            };
            if (auto i = indexed("p_")) return MultiPoly::variable(var_p(*i));
            if (auto i = indexed("q_")) return MultiPoly::variable(var_q(*i));
            if (auto i = indexed("u_")) return MultiPoly::variable(var_u(*i));
            if (auto i = indexed("v_")) return MultiPoly::variable(var_v(*i));
            if (auto i = indexed("J_")) {
                MultiPoly out;
                for (int k = 0; k < *i; ++k) out -= MultiPoly::variable(var_p(k));
                return out;
            }
            fail("unknown name '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

}  // namespace

MultiPoly poly_parse(std::string_view text) {
    Parser p{text};
    MultiPoly out = p.parse_expr();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing input");
    return out;
}

namespace {

// d_{t_i} on a monomial: scale by (d_i - d_{i+1}) read off the q-exponents.
MultiPoly t_derivative(const MultiPoly& f, int i) {
    MultiPoly out;
    for (const auto& [m, c] : f.terms()) {
        int di = 0, di1 = 0;
        for (const auto& [v, e] : m) {
            if (v.kind == VarKind::Q && v.index == i) di = e;
            if (v.kind == VarKind::Q && v.index == i + 1) di1 = e;
        }
        const int mult = di - di1;
        if (mult != 0) out.add_term(m, c * mult);
    }
    return out;
}

}  // namespace

MultiPoly poisson(const MultiPoly& f, const MultiPoly& g) {
    if (f.depends_on(VarKind::Lambda) || g.depends_on(VarKind::Lambda) ||
        f.depends_on(VarKind::Hbar) || g.depends_on(VarKind::Hbar))
        throw std::invalid_argument("poisson bracket expects polynomials in p, q only");
    const int np = std::max(f.max_index(VarKind::P), g.max_index(VarKind::P));
    const int nq = std::max(f.max_index(VarKind::Q), g.max_index(VarKind::Q));
    const int n = std::max(np, nq);
    MultiPoly out;
    for (int i = 0; i <= n; ++i) {
        out += f.derivative(var_p(i)) * t_derivative(g, i);
        out -= t_derivative(f, i) * g.derivative(var_p(i));
    }
    return out;
}

}  // namespace qtoda
