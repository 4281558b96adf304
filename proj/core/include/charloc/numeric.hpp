#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <utility>

#include "charloc/errors.hpp"

namespace charloc {

// Exact integer / rational backing for all digit and valuation arithmetic.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt pow_int(long base, long exp) {
    BigInt r = 1, b = base;
    for (long i = 0; i < exp; ++i) r *= b;
    return r;
}

inline BigInt numerator(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt denominator(const Rational& q) { return boost::multiprecision::denominator(q); }

// floor/ceil of an exact rational as BigInt.
BigInt floor_big(const Rational& q);
BigInt ceil_big(const Rational& q);

inline long floor_long(const Rational& q) { return static_cast<long>(floor_big(q)); }
inline long ceil_long(const Rational& q) { return static_cast<long>(ceil_big(q)); }

// Fractional part in [0, 1).
inline Rational frac_part(const Rational& q) { return q - Rational(floor_big(q)); }
inline bool is_integer(const Rational& q) { return denominator(q) == 1; }

// p-adic valuation of a nonzero rational, together with the p-free unit part.
// val_p(a/b) = v_p(a) - v_p(b); unit = (a/b) * p^{-val}.
struct PAdicSplit {
    long val;
    Rational unit; // numerator and denominator both coprime to p
};
PAdicSplit split_p(const Rational& q, long p);

// c mod m reduced to [0, m); m > 0.
inline BigInt mod_pos(const BigInt& c, const BigInt& m) {
    BigInt r = c % m;
    if (r < 0) r += m;
    return r;
}

// Multiplicative inverse mod m (m > 1, gcd(c, m) = 1).
BigInt mod_inverse(const BigInt& c, const BigInt& m);

// Number of factors p in c (c != 0), capped at `cap`.
long val_p_big(const BigInt& c, long p, long cap);

std::string rational_str(const Rational& q);
Rational parse_rational(const std::string& text); // throws ParseError

} // namespace charloc
