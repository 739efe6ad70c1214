#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "hitchin/errors.hpp"

namespace hitchin {

// Exact arbitrary-precision rational, always canonical (lowest terms, positive
// denominator) — mpq_class maintains that invariant for us.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw DivisionByZero("rat(" + std::to_string(num) + ", 0)");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Serialized form used in every JSON file: "p/q", or "p" when q == 1.
inline std::string rat_str(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Rational rat_parse(std::string_view s) {
    if (s.empty()) throw BadInput("empty rational literal");
    Rational q;
    if (q.set_str(std::string(s), 10) != 0) throw BadInput("unparsable rational literal '" + std::string(s) + "'");
    if (q.get_den() == 0) throw DivisionByZero("rational literal '" + std::string(s) + "'");
    q.canonicalize();
    return q;
}

// Nearest double, for handing exact values to the float integrator.
inline double rat_to_double(const Rational& q) { return q.get_d(); }

inline Rational rat_div(const Rational& a, const Rational& b) {
    if (b == 0) throw DivisionByZero("rational quotient");
    return a / b;
}

inline Rational rat_pow(const Rational& base, unsigned long e) {
    Rational r;
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), e);
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), e);
    r.canonicalize();
    return r;
}

} // namespace hitchin
