#include "cubelab/cube.hpp"

#include <bit>
#include <cassert>

#include "cubelab/errors.hpp"

namespace cubelab {

NoiseParam NoiseParam::from_sigma(const Rat& sigma) {
    if (!(sigma > 0 && sigma < make_rat(1, 2)))
        throw std::domain_error("NoiseParam: sigma must lie in (0, 1/2)");
    return NoiseParam{sigma, 1 - 2 * sigma};
}

NoiseParam NoiseParam::from_rho(const Rat& rho) {
    if (!(rho > 0 && rho < 1)) throw std::domain_error("NoiseParam: rho must lie in (0,1)");
    return NoiseParam{(1 - rho) / 2, rho};
}

namespace {

// v_d = sum_l c_l K_l(d;n): the sqrt(C(n,l)) of the mode and the 1/sqrt of
// the normalization cancel into the integer Krawtchouk value.
std::vector<Rat> values_from_reduced(int n, const std::vector<Rat>& c, const KrawtchoukTable& K) {
    std::vector<Rat> v(n + 1, Rat(0));
    for (int d = 0; d <= n; ++d)
        for (int l = 0; l <= n; ++l) {
            if (c[l] == 0) continue;
            v[d] += c[l] * Rat(K.at(l, d));
        }
    return v;
}

// c_l = 2^-n sum_d C(n,d) v_d K_l(d;n) / C(n,l)
std::vector<Rat> reduced_from_values(int n, const std::vector<Rat>& v, const KrawtchoukTable& K) {
    std::vector<Rat> c(n + 1, Rat(0));
    const Int two_n = int_pow(Int(2), n);
    for (int l = 0; l <= n; ++l) {
        Rat acc(0);
        for (int d = 0; d <= n; ++d) {
            if (v[d] == 0) continue;
            acc += Rat(binom(n, d)) * v[d] * Rat(K.at(l, d));
        }
        c[l] = acc / (Rat(two_n) * Rat(binom(n, l)));
    }
    return c;
}

}  // namespace

SymmetricFn SymmetricFn::from_reduced_levels(int n, std::vector<Rat> reduced) {
    if (n < 1) throw std::domain_error("SymmetricFn: n >= 1 required");
    if (static_cast<int>(reduced.size()) != n + 1)
        throw std::domain_error("SymmetricFn: level vector must have n+1 entries");
    KrawtchoukTable K(n);
    auto values = values_from_reduced(n, reduced, K);
    return SymmetricFn(n, std::move(reduced), std::move(values));
}

SymmetricFn SymmetricFn::from_values(int n, std::vector<Rat> values) {
    if (n < 1) throw std::domain_error("SymmetricFn: n >= 1 required");
    if (static_cast<int>(values.size()) != n + 1)
        throw std::domain_error("SymmetricFn: value vector must have n+1 entries");
    KrawtchoukTable K(n);
    auto reduced = reduced_from_values(n, values, K);
    return SymmetricFn(n, std::move(reduced), std::move(values));
}

Radical SymmetricFn::level(int d) const {
    return Radical{reduced_.at(d), binom(n_, d), 0}.normalized();
}

Parity SymmetricFn::parity() const {
    bool even_ok = true, odd_ok = true;
    for (int d = 0; d <= n_; ++d) {
        if (reduced_[d] == 0) continue;
        if (d % 2) even_ok = false;
        else odd_ok = false;
    }
    if (odd_ok && even_ok) return Parity::even;  // zero function
    if (odd_ok) return Parity::odd;
    if (even_ok) return Parity::even;
    return Parity::none;
}

Rat SymmetricFn::norm2_sq() const {
    Rat acc(0);
    for (int d = 0; d <= n_; ++d) acc += reduced_[d] * reduced_[d] * Rat(binom(n_, d));
    return acc;
}

Rat SymmetricFn::l1_norm() const {
    Rat acc(0);
    for (int d = 0; d <= n_; ++d) acc += Rat(binom(n_, d)) * rat_abs(values_[d]);
    return acc / Rat(int_pow(Int(2), n_));
}

nlohmann::ordered_json SymmetricFn::to_json() const {
    nlohmann::ordered_json j;
    j["n"] = n_;
    j["basis"] = "values";
    nlohmann::ordered_json data = nlohmann::ordered_json::array();
    for (const auto& v : values_) data.push_back(rat_str(v));
    j["data"] = data;
    return j;
}

SymmetricFn SymmetricFn::from_json(const nlohmann::json& j) {
    const int n = j.at("n").get<int>();
    const std::string basis = j.at("basis").get<std::string>();
    std::vector<Rat> data;
    for (const auto& e : j.at("data")) {
        if (e.is_string()) data.push_back(parse_rat(e.get<std::string>()));
        else data.push_back(rat_from_double(e.get<double>()));
    }
    if (basis == "values") return from_values(n, std::move(data));
    if (basis == "levels") return from_reduced_levels(n, std::move(data));
    throw std::invalid_argument("SymmetricFn::from_json: basis must be 'levels' or 'values'");
}

Radical psi_mode_value(int d, int n, int s) {
    if (d < 0 || d > n) throw std::domain_error("psi_mode_value: 0 <= d <= n required");
    if (s < -n || s > n || ((s % 2) + 2) % 2 != n % 2)
        throw std::domain_error("psi_mode_value: coordinate sum must satisfy |s| <= n, s = n mod 2");
    const int h = (n - s) / 2;  // Hamming profile index
    return Radical{make_rat(krawtchouk(d, h, n), binom(n, d)), binom(n, d), 0}.normalized();
}

SymmetricFn noise_apply(const Rat& rho, const SymmetricFn& f) {
    if (rho < 0 || rho > 1) throw std::domain_error("noise_apply: rho in [0,1] required");
    std::vector<Rat> c = f.reduced_levels();
    Rat p(1);
    for (int d = 0; d <= f.n(); ++d) {
        c[d] *= p;
        p *= rho;
    }
    return SymmetricFn::from_reduced_levels(f.n(), std::move(c));
}

SymmetricFn noise_apply_flip_oracle(const Rat& rho, const SymmetricFn& f) {
    const int n = f.n();
    const Rat p_flip = (1 - rho) / 2;
    const Rat p_keep = (1 + rho) / 2;
    // Powers of the two probabilities up to n.
    std::vector<Rat> pf(n + 1), pk(n + 1);
    pf[0] = pk[0] = Rat(1);
    for (int t = 1; t <= n; ++t) {
        pf[t] = pf[t - 1] * p_flip;
        pk[t] = pk[t - 1] * p_keep;
    }
    std::vector<Rat> out(n + 1, Rat(0));
    for (int h = 0; h <= n; ++h) {
        // x has h coordinates at -1. A flip pattern toggling a of those and
        // b of the others lands on a point with h - a + b minus-coordinates.
        Rat acc(0);
        for (int a = 0; a <= h; ++a)
            for (int b = 0; b <= n - h; ++b) {
                const Rat weight = Rat(binom(h, a) * binom(n - h, b)) * pf[a + b] * pk[n - a - b];
                acc += weight * f.value(h - a + b);
            }
        out[h] = acc;
    }
    return SymmetricFn::from_values(n, std::move(out));
}

SymmetricFn majority_levels(int n) {
    if (n < 1 || n % 2 == 0) throw std::domain_error("majority_levels: n must be odd");
    const int N = (n - 1) / 2;
    const Rat central = make_rat(binom(2 * N, N), int_pow(Int(4), N));
    std::vector<Rat> c(n + 1, Rat(0));
    for (int r = 0; r <= N; ++r) {
        Rat v = make_rat(binom(N, r), binom(2 * N, 2 * r)) * central;
        c[2 * r + 1] = (r % 2) ? Rat(-v) : v;
    }
    return SymmetricFn::from_reduced_levels(n, std::move(c));
}

std::vector<int64_t> elementary_symmetric_signs(uint32_t mask, int n) {
    std::vector<int64_t> e(n + 1, 0);
    e[0] = 1;
    for (int i = 0; i < n; ++i) {
        const int64_t xi = (mask >> i) & 1u ? -1 : 1;
        for (int d = std::min(i + 1, n); d >= 1; --d) e[d] += xi * e[d - 1];
    }
    return e;
}

SymmetricFn brute_force_levels(const std::function<Rat(uint32_t)>& f, int n) {
    if (n < 1 || n > 20) throw std::domain_error("brute_force_levels: 1 <= n <= 20 required");
    const uint32_t size = uint32_t(1) << n;

    // Symmetry: the value must depend on the Hamming weight only.
    std::vector<Rat> profile(n + 1);
    std::vector<bool> seen(n + 1, false);
    std::vector<Rat> acc(n + 1, Rat(0));
    for (uint32_t x = 0; x < size; ++x) {
        const int h = std::popcount(x);
        const Rat val = f(x);
        if (!seen[h]) {
            profile[h] = val;
            seen[h] = true;
        } else if (val != profile[h]) {
            throw std::domain_error("brute_force_levels: input is not symmetric");
        }
        const auto e = elementary_symmetric_signs(x, n);
        for (int l = 0; l <= n; ++l) {
            if (e[l] == 0) continue;
            acc[l] += val * Rat(static_cast<long>(e[l]));
        }
    }
    const Rat two_n = Rat(int_pow(Int(2), n));
    std::vector<Rat> c(n + 1);
    for (int l = 0; l <= n; ++l) c[l] = acc[l] / (two_n * Rat(binom(n, l)));
    return SymmetricFn::from_reduced_levels(n, std::move(c));
}

Rat inner_product(const SymmetricFn& f, const SymmetricFn& g) {
    if (f.n() != g.n()) throw std::domain_error("inner_product: dimension mismatch");
    const int n = f.n();
    Rat by_levels(0);
    for (int d = 0; d <= n; ++d)
        by_levels += f.reduced_level(d) * g.reduced_level(d) * Rat(binom(n, d));
#ifndef NDEBUG
    Rat by_values(0);
    for (int d = 0; d <= n; ++d)
        by_values += Rat(binom(n, d)) * f.value(d) * g.value(d);
    by_values /= Rat(int_pow(Int(2), n));
    assert(by_levels == by_values && "inner_product: level/value formulas disagree");
#endif
    return by_levels;
}

}  // namespace cubelab
