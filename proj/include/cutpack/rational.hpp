#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace cutpack {

/// Exact rational number. All weights, lengths and loads are carried exactly.
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// Serializes as "p/q" (always with a denominator, "3/1" for integers).
inline std::string to_string(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

/// Accepts "p/q" or a bare integer "p".
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    if (s.empty()) {
        throw std::invalid_argument("empty rational");
    }
    auto slash = s.find('/');
    mpz_class num;
    mpz_class den = 1;
    if (num.set_str(s.substr(0, slash), 10) != 0) {
        throw std::invalid_argument("bad rational numerator: " + s);
    }
    if (slash != std::string::npos) {
        if (den.set_str(s.substr(slash + 1), 10) != 0 || den == 0) {
            throw std::invalid_argument("bad rational denominator: " + s);
        }
    }
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline mpz_class ceil_to_integer(const Rational& r) {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

inline long ceil_to_long(const Rational& r) {
    mpz_class q = ceil_to_integer(r);
    if (!q.fits_slong_p()) {
        throw std::overflow_error("rational ceiling does not fit in long");
    }
    return q.get_si();
}

inline double to_double(const Rational& r) { return r.get_d(); }

} // namespace cutpack
