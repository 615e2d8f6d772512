#include "qtoda/linalg.hpp"

#include <Eigen/Dense>

#include <unordered_map>

#include "qtoda/laurent.hpp"

namespace qtoda {

LaurentH LaurentH::monomial_inverse() const {
    if (terms_.size() != 1) throw std::invalid_argument("LaurentH inverse needs a monomial");
    const auto& [e, c] = *terms_.begin();
    return h_power(-e, Rat(1) / c);
}

std::complex<double> LaurentH::eval(std::complex<double> h) const {
    std::complex<double> acc = 0.0;
    for (const auto& [e, c] : terms_) acc += to_double(c) * std::pow(h, e);
    return acc;
}

std::string LaurentH::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        const bool neg = sgn(c) < 0;
        Rat mag = neg ? Rat(-c) : c;
        if (first) {
            if (neg) out += "-";
            first = false;
        } else {
            out += neg ? " - " : " + ";
        }
        const bool unit = (mag == 1);
        if (!unit || e == 0) out += rat_to_string(mag);
        if (e != 0) {
            if (!unit) out += "*";
            out += "h";
            if (e != 1) out += "^" + std::to_string(e);
        }
    }
    return out;
}

LaurentH laurent_parse(std::string_view text) {
    // Reuse the polynomial parser; negative exponents h^-2 are rewritten first.
    // Simplest robust route: scan term by term.
    LaurentH out;
    std::size_t i = 0;
    int sign = 1;
    auto skip = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip();
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        if (text[i] == '-') sign = -1;
        ++i;
    }
    while (i <= text.size()) {
        skip();
        std::size_t start = i;
        while (i < text.size() &&
               (text[i] != '+' && (text[i] != '-' || (i > 0 && text[i - 1] == '^'))))
            ++i;
        std::string term(text.substr(start, i - start));
        // strip spaces
        std::string t;
        for (char ch : term)
            if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
        if (t.empty()) throw std::invalid_argument("bad laurent term");
        Rat coeff = 1;
        int exp = 0;
        std::size_t hpos = t.find('h');
        if (hpos == std::string::npos) {
            coeff = rat_from_string(t);
        } else {
            std::string cpart = t.substr(0, hpos);
            if (!cpart.empty() && cpart.back() == '*') cpart.pop_back();
            if (!cpart.empty()) coeff = rat_from_string(cpart);
            std::string epart = t.substr(hpos + 1);
            if (epart.empty())
                exp = 1;
            else if (epart[0] == '^')
                exp = std::stoi(epart.substr(1));
            else
                throw std::invalid_argument("bad laurent exponent: " + t);
        }
        out.add(exp, sign < 0 ? Rat(-coeff) : coeff);
        if (i >= text.size()) break;
        sign = text[i] == '-' ? -1 : 1;
        ++i;
        if (i >= text.size()) throw std::invalid_argument("trailing sign");
    }
    return out;
}

namespace {

template <class T>
T det_memo(const Mat<T>& m, std::size_t row, unsigned colmask,
           std::unordered_map<unsigned, T>& memo, const T& zero, const T& one) {
    const std::size_t n = m.rows();
    if (row == n) return one;
    auto it = memo.find(colmask);
    if (it != memo.end()) return it->second;
    T acc = zero;
    int sign = 1;
    for (std::size_t j = 0; j < n; ++j) {
        if (colmask & (1u << j)) continue;
        // expansion along the current row over free columns
        T sub = det_memo(m, row + 1, colmask | (1u << j), memo, zero, one);
        T term = m(row, j) * sub;
        if (sign < 0) term = zero - term;
        acc += term;
        sign = -sign;
    }
    memo.emplace(colmask, acc);
    return acc;
}

}  // namespace

MultiPoly det(const Mat<MultiPoly>& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("det: square matrix required");
    if (m.rows() > 12) throw ResourceError("det: size capped at 12");
    if (m.rows() == 0) return MultiPoly::constant(1);
    std::unordered_map<unsigned, MultiPoly> memo;
    return det_memo<MultiPoly>(m, 0, 0, memo, MultiPoly::zero(), MultiPoly::constant(1));
}

Rat det(const Mat<Rat>& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("det: square matrix required");
    if (m.rows() > 12) throw ResourceError("det: size capped at 12");
    if (m.rows() == 0) return 1;
    std::unordered_map<unsigned, Rat> memo;
    return det_memo<Rat>(m, 0, 0, memo, Rat(0), Rat(1));
}

Echelon rref(std::vector<std::vector<Rat>> rows) {
    // Forward elimination with unit pivots; rows below the pivot are cleared
    // immediately, reduction of vectors happens in reduce_against.
    Echelon e;
    if (rows.empty()) return e;
    const std::size_t cols = rows[0].size();
    std::size_t next = 0;
    for (std::size_t col = 0; col < cols && next < rows.size(); ++col) {
        std::size_t pivot = next;
        while (pivot < rows.size() && is_zero(rows[pivot][col])) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[next], rows[pivot]);
        const Rat inv = Rat(1) / rows[next][col];
        if (inv != 1)
            for (std::size_t j = col; j < cols; ++j)
                if (!is_zero(rows[next][j])) rows[next][j] *= inv;
        for (std::size_t r = next + 1; r < rows.size(); ++r) {
            if (is_zero(rows[r][col])) continue;
            const Rat f = rows[r][col];
            for (std::size_t j = col; j < cols; ++j)
                if (!is_zero(rows[next][j])) rows[r][j] -= f * rows[next][j];
        }
        e.pivot_cols.push_back(static_cast<int>(col));
        ++next;
    }
    rows.resize(next);
    e.rows = std::move(rows);
    return e;
}

std::vector<Rat> reduce_against(const Echelon& e, std::vector<Rat> v) {
    // Ascending pivot order clears every pivot coordinate, even against a
    // non-reduced echelon basis; the result is the canonical representative
    // with support on non-pivot columns.
    for (std::size_t r = 0; r < e.rows.size(); ++r) {
        const int pc = e.pivot_cols[r];
        if (is_zero(v[pc])) continue;
        const Rat f = v[pc];
        const auto& row = e.rows[r];
        for (std::size_t j = static_cast<std::size_t>(pc); j < row.size(); ++j)
            if (!is_zero(row[j])) v[j] -= f * row[j];
    }
    return v;
}

std::vector<Rat> solve_exact(const Mat<Rat>& a, const std::vector<Rat>& b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve_exact: shape");
    std::vector<std::vector<Rat>> rows(n, std::vector<Rat>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) rows[i][j] = a(i, j);
        rows[i][n] = b[i];
    }
    Echelon e = rref(std::move(rows));
    // pivots must be exactly the first n columns
    if (e.rank() != static_cast<int>(n) ||
        (!e.pivot_cols.empty() && e.pivot_cols.back() == static_cast<int>(n))) {
        int rank = 0;
        for (int pc : e.pivot_cols)
            if (pc < static_cast<int>(n)) ++rank;
        throw RankError(rank);
    }
    std::vector<Rat> x(n);
    for (std::size_t r = 0; r < n; ++r) x[static_cast<std::size_t>(e.pivot_cols[r])] = e.rows[r][n];
    return x;
}

namespace {

Eigen::MatrixXcd to_eigen(const Mat<Cd>& a) {
    Eigen::MatrixXcd m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m(static_cast<long>(i), static_cast<long>(j)) = a(i, j);
    return m;
}

}  // namespace

std::vector<Cd> solve_complex(const Mat<Cd>& a, const std::vector<Cd>& b) {
    Eigen::MatrixXcd m = to_eigen(a);
    Eigen::VectorXcd rhs(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) rhs(static_cast<long>(i)) = b[i];
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
    if (!lu.isInvertible()) throw RankError(static_cast<int>(lu.rank()));
    Eigen::VectorXcd x = lu.solve(rhs);
    return {x.data(), x.data() + x.size()};
}

LstSqResult lstsq_complex(const Mat<Cd>& a, const std::vector<Cd>& b) {
    Eigen::MatrixXcd m = to_eigen(a);
    Eigen::VectorXcd rhs(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) rhs(static_cast<long>(i)) = b[i];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXcd x = svd.solve(rhs);
    LstSqResult out;
    out.x.assign(x.data(), x.data() + x.size());
    out.residual = (m * x - rhs).norm();
    const auto& sv = svd.singularValues();
    out.condition = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1)
                                          : std::numeric_limits<double>::infinity();
    return out;
}

}  // namespace qtoda
