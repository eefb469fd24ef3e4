#pragma once

#include <cmath>
#include <stdexcept>

#include "cubelab/rational.hpp"

namespace cubelab {

// Exact scalar of the form  coef * sqrt(root) * pi^(pi_half/2)  with coef
// rational and root a positive integer. This is the closure needed by the
// witness pipeline: mode values contribute sqrt(C(n,d)), Gamma at
// half-integers contributes sqrt(pi), and normalization cancels both.
//
// Addition is only defined between values sharing the same radical part
// (or with zero); the algebra in this library never needs more.
struct Radical {
    Rat coef{0};
    Int root{1};
    int pi_half = 0;

    static Radical of(const Rat& q) { return Radical{q, Int(1), 0}; }

    bool is_zero() const { return coef == 0; }

    Radical normalized() const {
        if (coef == 0) return Radical{Rat(0), Int(1), 0};
        return *this;
    }

    Radical times(const Radical& o) const {
        Radical r;
        r.coef = coef * o.coef;
        if (r.coef == 0) return Radical{Rat(0), Int(1), 0};
        // sqrt(a)*sqrt(b) = g*sqrt((a/g)(b/g)) with g = gcd(a,b); this fully
        // rationalizes the equal-root products the library produces.
        Int g;
        mpz_gcd(g.get_mpz_t(), root.get_mpz_t(), o.root.get_mpz_t());
        r.coef *= g;
        r.root = (root / g) * (o.root / g);
        r.pi_half = pi_half + o.pi_half;
        if (r.pi_half >= 2) {
            // pi^(2/2) = pi stays transcendental; keep the exponent but fold
            // nothing. Callers in this library only ever see pi_half in {0,1}.
            // (Kept general for products formed transiently in tests.)
        }
        return r;
    }

    Radical plus(const Radical& o) const {
        if (is_zero()) return o.normalized();
        if (o.is_zero()) return normalized();
        if (root != o.root || pi_half != o.pi_half)
            throw std::domain_error("Radical::plus: incompatible radical parts");
        Radical r{coef + o.coef, root, pi_half};
        return r.normalized();
    }

    // True iff the value is an exact rational (no surd, no pi).
    bool is_rational() const { return coef == 0 || (root == 1 && pi_half == 0); }

    Rat rational() const {
        if (!is_rational()) throw std::domain_error("Radical::rational: value is irrational");
        return coef;
    }

    double value() const {
        double v = to_double(coef) * std::sqrt(root.get_d());
        if (pi_half != 0) v *= std::pow(M_PI, pi_half / 2.0);
        return v;
    }

    bool operator==(const Radical& o) const {
        if (is_zero() && o.is_zero()) return true;
        return coef == o.coef && root == o.root && pi_half == o.pi_half;
    }
};

// Gamma at integer or half-integer argument a = twice_a/2 > 0, expressed
// exactly: Gamma(j) = (j-1)!, Gamma(j+1/2) = (2j-1)!!/2^j * sqrt(pi).
inline Radical gamma_half(long twice_a) {
    if (twice_a <= 0) throw std::domain_error("gamma_half: argument must be positive");
    if (twice_a % 2 == 0) {
        long j = twice_a / 2;
        Int f(1);
        for (long t = 2; t < j; ++t) f *= t;
        return Radical{Rat(f), Int(1), 0};
    }
    long j = (twice_a - 1) / 2;  // Gamma(j + 1/2)
    Int num(1);
    for (long t = 1; t <= j; ++t) num *= 2 * t - 1;
    return Radical{make_rat(num, int_pow(Int(2), j)), Int(1), 1};
}

}  // namespace cubelab
