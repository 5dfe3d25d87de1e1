#pragma once

// Exact arithmetic helpers shared by every module.

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace scalebar {

// Expression templates are off so that `auto` never captures a dangling expression.
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;

inline Rational make_rational(long long num, long long den = 1) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    return Rational(BigInt(num), BigInt(den));
}

// 2^e for any integer e, exact.
inline Rational pow2(long e) {
    BigInt one = 1;
    if (e >= 0) return Rational(BigInt(one << static_cast<unsigned>(e)));
    return Rational(one, BigInt(one << static_cast<unsigned>(-e)));
}

inline Rational rational_pow(const Rational& base, unsigned e) {
    Rational r = 1;
    for (unsigned i = 0; i < e; ++i) r *= base;
    return r;
}

inline BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Exact rational value of a finite double.
inline Rational from_double(double x) {
    if (!std::isfinite(x)) throw std::domain_error("non-finite value has no rational form");
    return Rational(x);
}

// Canonical "p/q" string (q = 1 is written explicitly).
inline std::string to_pq(const Rational& r) {
    return numerator_of(r).str() + "/" + denominator_of(r).str();
}

// Accepts "p/q", "p", or a decimal/float literal.
inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        BigInt p(s.substr(0, slash));
        BigInt q(s.substr(slash + 1));
        if (q == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
        return Rational(p, q);
    }
    bool integral = !s.empty() && s.find_first_not_of("+-0123456789") == std::string::npos;
    if (integral) return Rational(BigInt(s[0] == '+' ? s.substr(1) : s));
    std::size_t used = 0;
    double x = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("cannot parse rational '" + s + "'");
    return from_double(x);
}

}  // namespace scalebar
