#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "qgs/common.hpp"

namespace qgs {

// Counter-based Philox4x32-10 engine (Salmon et al., SC 2011). Each named
// stream gets its own key, so streams are independent and adding a new one
// never perturbs draws made from existing ones.
class PhiloxEngine {
public:
    using result_type = std::uint64_t;

    explicit PhiloxEngine(std::uint64_t key) : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<std::uint64_t>::max(); }

    result_type operator()() {
        if (idx_ >= 2) {
            next_block();
            idx_ = 0;
        }
        std::uint64_t lo = block_[2 * idx_];
        std::uint64_t hi = block_[2 * idx_ + 1];
        ++idx_;
        return lo | (hi << 32);
    }

    // Jump the counter without generating; handy for tests.
    void skip_blocks(std::uint64_t n) {
        std::uint64_t lo = ctr_[0] + n;
        if (lo < ctr_[0]) bump_high();
        ctr_[0] = static_cast<std::uint32_t>(lo);
        ctr_[1] += static_cast<std::uint32_t>(n >> 32);
        idx_ = 2;
    }

private:
    static void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
        std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(p >> 32);
        lo = static_cast<std::uint32_t>(p);
    }

    void bump_high() {
        if (++ctr_[1] == 0)
            if (++ctr_[2] == 0) ++ctr_[3];
    }

    void next_block() {
        std::uint32_t c0 = ctr_[0], c1 = ctr_[1], c2 = ctr_[2], c3 = ctr_[3];
        std::uint32_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mul_hi_lo(0xD2511F53u, c0, hi0, lo0);
            mul_hi_lo(0xCD9E8D57u, c2, hi1, lo1);
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        block_ = {c0, c1, c2, c3};
        if (++ctr_[0] == 0) bump_high();
    }

    std::array<std::uint32_t, 4> ctr_{0, 0, 0, 0};
    std::array<std::uint32_t, 4> block_{};
    std::array<std::uint32_t, 2> key_;
    int idx_ = 2;
};

// Root of all randomness for one simulation run: stream("arr/n1/PMU") etc.
class RngStreams {
public:
    explicit RngStreams(std::uint64_t root_seed) : root_(root_seed) {}

    PhiloxEngine stream(std::string_view name) const {
        return PhiloxEngine(splitmix64(root_ ^ fnv1a64(name)));
    }

    std::uint64_t root() const { return root_; }

private:
    std::uint64_t root_;
};

// ---- samplers ------------------------------------------------------------
// Self-contained so results do not depend on the standard library's
// distribution internals.

template <typename Engine>
double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

template <typename Engine>
double uniform_range(Engine& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(eng);
}

template <typename Engine>
double exponential_sample(Engine& eng, double mean) {
    double u;
    do {
        u = uniform01(eng);
    } while (u <= 0.0);
    return -mean * std::log(u);
}

// Marsaglia polar method; second deviate is discarded to keep the stream
// position a pure function of the draw count.
template <typename Engine>
double normal01_sample(Engine& eng) {
    for (;;) {
        double u = 2.0 * uniform01(eng) - 1.0;
        double v = 2.0 * uniform01(eng) - 1.0;
        double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

template <typename Engine>
double normal_sample(Engine& eng, double mean, double sigma) {
    return mean + sigma * normal01_sample(eng);
}

template <typename Engine>
double lognormal_sample(Engine& eng, double mu_log, double sigma_log) {
    if (sigma_log == 0.0) return std::exp(mu_log);
    return std::exp(mu_log + sigma_log * normal01_sample(eng));
}

namespace detail {

// Knuth inversion; fine for small means.
template <typename Engine>
std::int64_t poisson_small(Engine& eng, double mean) {
    double limit = std::exp(-mean);
    double prod = uniform01(eng);
    std::int64_t n = 0;
    while (prod > limit) {
        prod *= uniform01(eng);
        ++n;
    }
    return n;
}

// Hoermann's PTRD transformed-rejection sampler for mean >= 10.
template <typename Engine>
std::int64_t poisson_ptrd(Engine& eng, double mean) {
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mu = std::log(mean);

    for (;;) {
        double u = uniform01(eng) - 0.5;
        double v = uniform01(eng);
        double us = 0.5 - std::fabs(u);
        double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        double k = kf;
        double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        double rhs = k * log_mu - mean - std::lgamma(k + 1.0);
        if (lhs <= rhs) return static_cast<std::int64_t>(kf);
    }
}

}  // namespace detail

template <typename Engine>
std::int64_t poisson_sample(Engine& eng, double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 10.0) return detail::poisson_small(eng, mean);
    return detail::poisson_ptrd(eng, mean);
}

}  // namespace qgs
