#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zerofiber/error.hpp"

namespace zerofiber {

// mpq_class keeps values canonical as long as every constructor path that
// takes a numerator/denominator pair goes through canonicalize().
using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

/// Parses "p", "p/q" or "-p/q". Whitespace is not accepted.
inline Rational parse_rational(std::string_view text) {
    if (text.empty()) throw InputError("empty rational literal");
    std::string s(text);
    auto slash = s.find('/');
    auto valid_int = [](const std::string& part) {
        if (part.empty()) return false;
        std::size_t start = (part[0] == '-' || part[0] == '+') ? 1 : 0;
        if (start == part.size()) return false;
        for (std::size_t k = start; k < part.size(); ++k)
            if (part[k] < '0' || part[k] > '9') return false;
        return true;
    };
    if (slash == std::string::npos) {
        if (!valid_int(s)) throw InputError("malformed rational '" + s + "'");
        if (s[0] == '+') s.erase(0, 1);
        return Rational(mpz_class(s, 10));
    }
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+')
        throw InputError("malformed rational '" + s + "'");
    if (num[0] == '+') num.erase(0, 1);
    mpz_class d(den, 10);
    if (d == 0) throw InputError("zero denominator in '" + s + "'");
    Rational r(mpz_class(num, 10), d);
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

/// Exact value of a finite double (doubles are dyadic rationals).
inline Rational from_double(double x) {
    if (!std::isfinite(x)) throw InputError("non-finite value");
    Rational r(x);
    r.canonicalize();
    return r;
}

/// Last continued-fraction convergent whose denominator stays within
/// `max_denominator`.
inline Rational rationalize(const Rational& x, const mpz_class& max_denominator) {
    if (x.get_den() <= max_denominator) return x;
    mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    mpz_class num = x.get_num(), den = x.get_den();
    while (den != 0) {
        mpz_class a;
        mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        mpz_class q2 = a * q1 + q0;
        if (q2 > max_denominator) break;
        mpz_class p2 = a * p1 + p0;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        mpz_class rem = num - a * den;
        num = den;
        den = rem;
    }
    Rational r(p1, q1);
    r.canonicalize();
    return r;
}

inline Rational rationalize(double x, const mpz_class& max_denominator) {
    return rationalize(from_double(x), max_denominator);
}

inline const mpz_class& default_denominator_cap() {
    static const mpz_class cap("1000000000000", 10);
    return cap;
}

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline Rational max_abs(const RationalVector& v) {
    Rational m = 0;
    for (const auto& x : v)
        if (abs(x) > m) m = abs(x);
    return m;
}

inline Rational sum(const RationalVector& v) {
    Rational s = 0;
    for (const auto& x : v) s += x;
    return s;
}

}  // namespace zerofiber
