#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cubelab {

// Exact arithmetic lives on GMP. `Int` and `Rat` are value types with the
// usual operators; all certification paths in the library use them.
using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(const Int& num, const Int& den) {
    if (den == 0) throw std::domain_error("make_rat: zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline Rat make_rat(long num, long den) { return make_rat(Int(num), Int(den)); }

inline Int binom(long n, long k) {
    if (k < 0 || k > n) return Int(0);
    Int r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

// (2r+1)!! = 1*3*5*...*(2r+1)
inline Int odd_double_factorial(long r) {
    Int acc(1);
    for (long j = 0; j <= r; ++j) acc *= 2 * j + 1;
    return acc;
}

inline Int int_pow(const Int& base, long e) {
    if (e < 0) throw std::domain_error("int_pow: negative exponent");
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(e));
    return r;
}

inline Rat rat_pow(const Rat& base, long e) {
    if (e < 0) {
        if (base == 0) throw std::domain_error("rat_pow: 0^negative");
        return make_rat(int_pow(Int(base.get_den()), -e), int_pow(Int(base.get_num()), -e));
    }
    return Rat(int_pow(Int(base.get_num()), e), int_pow(Int(base.get_den()), e));
}

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

inline int rat_sign(const Rat& q) { return sgn(q); }

inline double to_double(const Rat& q) { return q.get_d(); }

// Serialized form is "p" or "p/q"; lossless round trip.
inline std::string rat_str(const Rat& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Rat parse_rat(const std::string& s) {
    Rat q;
    if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0)
        throw std::invalid_argument("parse_rat: bad rational '" + s + "'");
    q.canonicalize();
    return q;
}

// Exact rational from a binary64 value (doubles are dyadic rationals).
inline Rat rat_from_double(double x) {
    Rat q;
    mpq_set_d(q.get_mpq_t(), x);
    return q;
}

}  // namespace cubelab
