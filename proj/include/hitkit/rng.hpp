#pragma once

// Per-path random streams. A Philox4x32-10 block keyed by (seed, path index)
// seeds a xoshiro256++ engine, so every path owns an independent stream that
// does not depend on thread count or scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "error.hpp"

namespace hitkit {

namespace detail {

inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t p0 = std::uint64_t(m0) * ctr[0];
        std::uint64_t p1 = std::uint64_t(m1) * ctr[2];
        ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
               std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
        key[0] += w0;
        key[1] += w1;
    }
    return ctr;
}

} // namespace detail

class Xoshiro256pp {
public:
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    explicit Xoshiro256pp(const std::array<std::uint64_t, 4>& s) : s_(s) {
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> s_;
};

class Rng {
public:
    using result_type = std::uint64_t;
    static constexpr result_type min() { return Xoshiro256pp::min(); }
    static constexpr result_type max() { return Xoshiro256pp::max(); }

    // Stream for (seed, path index, sub-stream).
    static Rng for_path(std::uint64_t seed, std::uint64_t path, std::uint32_t stream = 0) {
        std::array<std::uint32_t, 2> key = {std::uint32_t(seed), std::uint32_t(seed >> 32)};
        std::array<std::uint64_t, 4> s{};
        for (std::uint32_t block = 0; block < 2; ++block) {
            auto out = detail::philox4x32_10(
                {std::uint32_t(path), std::uint32_t(path >> 32), stream, block}, key);
            s[2 * block] = (std::uint64_t(out[0]) << 32) | out[1];
            s[2 * block + 1] = (std::uint64_t(out[2]) << 32) | out[3];
        }
        return Rng(s);
    }

    explicit Rng(const std::array<std::uint64_t, 4>& s) : eng_(s) {}

    result_type operator()() { return eng_(); }

    // Uniform on (0, 1), never 0 or 1.
    double uniform() { return (double(eng_() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() { return normal_(eng_); }

    // Inversion for mean < 10, PTRS transformed rejection otherwise (Boost).
    long poisson(double mean) {
        if (!(mean >= 0.0)) throw DomainError("poisson: mean must be nonnegative");
        if (mean == 0.0) return 0;
        boost::random::poisson_distribution<long, double> d(mean);
        return d(eng_);
    }

    // Gamma(shape, 1): Marsaglia-Tsang, with U^{1/shape} boost for shape < 1.
    double gamma(double shape) {
        if (!(shape > 0.0)) throw DomainError("gamma: shape must be positive");
        if (shape < 1.0) {
            double g = gamma(shape + 1.0);
            return g * std::exp(std::log(uniform()) / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            double u = uniform();
            double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    Xoshiro256pp eng_;
    boost::random::normal_distribution<double> normal_;
};

} // namespace hitkit
