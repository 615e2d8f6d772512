#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>
#include <string_view>

namespace qtoda {

// Exact rational arithmetic is delegated to GMP.  mpq_class keeps values
// canonical (positive denominator, gcd(num, den) = 1) after every operation.
using Rat = mpq_class;
using Int = mpz_class;

inline bool is_zero(const Rat& r) { return sgn(r) == 0; }

inline double to_double(const Rat& r) { return r.get_d(); }

inline std::complex<double> to_complex(const Rat& r) {
    return {r.get_d(), 0.0};
}

// "3/2", "-7", "0"; denominator suppressed when 1.
std::string rat_to_string(const Rat& r);

// Accepts integer and num/den forms; throws std::invalid_argument otherwise.
Rat rat_from_string(std::string_view s);

Rat rat_binomial(long n, long k);
Rat rat_factorial(long n);

}  // namespace qtoda
