#pragma once

#include <complex>
#include <map>
#include <string>

#include "qtoda/rational.hpp"

namespace qtoda {

// Laurent polynomial in h with rational coefficients: finite support,
// possibly negative exponents, no stored zeros.
class LaurentH {
public:
    LaurentH() = default;
    LaurentH(const Rat& c) { add(0, c); }  // NOLINT: implicit from constants
    static LaurentH h_power(int k, Rat c = 1) {
        LaurentH x;
        x.add(k, std::move(c));
        return x;
    }

    const std::map<int, Rat>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add(int exp, const Rat& c) {
        if (qtoda::is_zero(c)) return;
        auto [it, inserted] = terms_.emplace(exp, c);
        if (!inserted) {
            it->second += c;
            if (qtoda::is_zero(it->second)) terms_.erase(it);
        }
    }

    LaurentH operator-() const {
        LaurentH out;
        for (const auto& [e, c] : terms_) out.terms_.emplace(e, -c);
        return out;
    }
    LaurentH& operator+=(const LaurentH& o) {
        for (const auto& [e, c] : o.terms_) add(e, c);
        return *this;
    }
    LaurentH& operator-=(const LaurentH& o) {
        for (const auto& [e, c] : o.terms_) add(e, -c);
        return *this;
    }
    friend LaurentH operator+(LaurentH a, const LaurentH& b) { return a += b; }
    friend LaurentH operator-(LaurentH a, const LaurentH& b) { return a -= b; }
    friend LaurentH operator*(const LaurentH& a, const LaurentH& b) {
        LaurentH out;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) out.add(ea + eb, ca * cb);
        return out;
    }
    LaurentH& operator*=(const LaurentH& o) { return *this = *this * o; }
    LaurentH scaled(const Rat& c) const {
        LaurentH out;
        if (qtoda::is_zero(c)) return out;
        for (const auto& [e, co] : terms_) out.terms_.emplace(e, co * c);
        return out;
    }
    LaurentH shifted(int dk) const {  // multiply by h^dk
        LaurentH out;
        for (const auto& [e, c] : terms_) out.terms_.emplace(e + dk, c);
        return out;
    }

    bool operator==(const LaurentH& o) const { return terms_ == o.terms_; }

    // Inverse of c*h^k (a monomial); throws for anything else.
    LaurentH monomial_inverse() const;

    int min_exponent() const { return terms_.empty() ? 0 : terms_.begin()->first; }
    int max_exponent() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }

    std::complex<double> eval(std::complex<double> h) const;

    // "3/2*h^3 + h^-2 - 1" style; parseable by laurent_parse.
    std::string to_string() const;

private:
    std::map<int, Rat> terms_;
};

LaurentH laurent_parse(std::string_view text);

}  // namespace qtoda
