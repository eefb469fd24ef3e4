#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace cubelab {

// Thin wrapper over std::mt19937_64 that derives everything from raw 64-bit
// words. std::uniform_int_distribution is not pinned across standard
// libraries; these helpers are, which keeps seeded reports byte-identical.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t word() { return eng_(); }

    // Unbiased uniform draw from {0, ..., bound-1} by rejection.
    uint64_t below(uint64_t bound) {
        if (bound == 0) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t w;
        do {
            w = eng_();
        } while (w >= limit);
        return w % bound;
    }

    // Uniform in [0,1) with 53 random bits.
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform sign vector as the low n bits of one word (n <= 64); bit set
    // means the coordinate is -1.
    uint64_t sign_mask(int n) {
        uint64_t w = eng_();
        return n >= 64 ? w : (w & ((uint64_t(1) << n) - 1));
    }

    std::vector<int8_t> sign_vector(int n) {
        std::vector<int8_t> u(n);
        uint64_t w = 0;
        int have = 0;
        for (int i = 0; i < n; ++i) {
            if (have == 0) {
                w = eng_();
                have = 64;
            }
            u[i] = (w & 1) ? int8_t(-1) : int8_t(1);
            w >>= 1;
            --have;
        }
        return u;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace cubelab
