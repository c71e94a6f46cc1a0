#pragma once

// Monte Carlo for the Bessel-Brownian diffusion through the two time changes:
// a pair of independent BESQ^(-alpha/2) processes for half-lines and half-spaces,
// a Legendre / hyperbolic Bessel pair for strips.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "bessel_core.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace hitkit {

struct SimConfig {
    std::uint64_t seed = 1;
    long n_paths = 1000;
    double dt = 1e-4;            // Euler step for the strip pair
    int substeps = 64;           // skeleton points K for A_1
    bool bridge_correction = true;
    bool richardson = false;     // A_1 <- 2 A_1(K) - A_1(K/2)
    long horizon_steps = 1000000;

    void validate() const {
        if (!(dt > 0.0)) throw DomainError("SimConfig: dt must be positive");
        if (n_paths < 1) throw DomainError("SimConfig: n_paths must be >= 1");
        if (substeps < 1) throw DomainError("SimConfig: substeps must be >= 1");
        if (richardson && substeps % 2 != 0) throw DomainError("SimConfig: richardson needs even substeps");
        if (horizon_steps < 1) throw DomainError("SimConfig: horizon_steps must be >= 1");
    }
};

struct HitSample {
    std::vector<double> place;
    double time_functional = 0.0;
    bool exact_place = false;
    bool exact_time = false;
    int substeps = 0;
    // A_1 on the nested sub-grids K, K/2, K/4, ... of the same path.
    std::vector<double> time_levels;
};

// tau_G was not reached within the step budget.
struct HorizonError : NumericalError {
    using NumericalError::NumericalError;
};

namespace detail {

struct PairStart {
    double x1, x2;
};

// (z1, z2) -> (x1, x2) with f(x1, x2) = (4 x1 x2, x2 - x1) = (z1^2, z2).
inline PairStart halfline_pair(double z1, double z2) {
    if (!(z1 >= 0.0)) throw DomainError("half-line start needs z1 >= 0");
    double r = std::hypot(z1, z2);
    PairStart p{0.5 * (r - z2), 0.5 * (r + z2)};
    if (z1 == 0.0 && z2 > 0.0) throw DomainError("start lies on the removed half-line");
    if (z1 == 0.0 && z2 < 0.0) p = {-z2, 0.0};
    return p;
}

} // namespace detail

// Exact (tau_H, X_2(tau_H)) draw; returns the exit place on the half-line.
inline HitSample sample_halfline_hit_place(double alpha, double z1, double z2, Rng& rng) {
    detail::require_alpha(alpha);
    auto p = detail::halfline_pair(z1, z2);
    HitSample s;
    s.exact_place = true;
    s.exact_time = false;
    double t = p.x1 > 0.0 ? p.x1 / (2.0 * rng.gamma(0.5 * alpha)) : 0.0;
    double place = besq_sample_transition(BesselLaw::from_alpha(alpha), t, p.x2, rng);
    s.place = {place};
    return s;
}

namespace detail {

// Skeleton of (X_1, X_2) on s_k = T (1 - (1 - k/K)^2), k = 0..K. X_1 given
// tau_H = T is a BESQ bridge to 0 of dimension 2 + alpha, written as
// X_1(s) = (1 - s/T)^2 Z(s T / (T - s)) with Z a forward BESQ^(alpha/2) from x1.
// X_2 runs forward exactly. Returns A_1 = 4 int (X_1 + X_2) on nested grids.
struct Skeleton {
    double place;
    std::vector<double> a_levels;
};

inline Skeleton halfline_skeleton(double alpha, double x1, double x2, double T, int K, Rng& rng) {
    const BesselLaw up = BesselLaw::from_index(0.5 * alpha);
    const BesselLaw law = BesselLaw::from_alpha(alpha);
    std::vector<double> s(K + 1), f(K + 1);
    double z = x1, u_prev = 0.0, y = x2;
    for (int k = 0; k <= K; ++k) {
        double q = 1.0 - double(k) / K;
        s[k] = T * (1.0 - q * q);
        double v1;
        if (k == 0) {
            v1 = x1;
        } else if (k == K) {
            v1 = 0.0;
            s[k] = T;
        } else {
            double u = s[k] * T / (T - s[k]);
            z = besq_sample_transition(up, u - u_prev, z, rng);
            u_prev = u;
            double w = 1.0 - s[k] / T;
            v1 = w * w * z;
        }
        if (k > 0) y = besq_sample_transition(law, s[k] - s[k - 1], y, rng);
        f[k] = v1 + y;
    }
    Skeleton out{y, {}};
    for (int step = 1; step <= K && K % step == 0; step *= 2) {
        double acc = 0.0;
        for (int k = step; k <= K; k += step) acc += 0.5 * (f[k] + f[k - step]) * (s[k] - s[k - step]);
        out.a_levels.push_back(4.0 * acc);
        if (step == K) break;
    }
    return out;
}

} // namespace detail

// Exit place and the time functional A_1(tau_H) from a K-point skeleton. The
// place is exact in law; it is X_2(T) from the skeleton, not the same draw as
// sample_halfline_hit_place.
inline HitSample sample_halfline_hit_with_time(double alpha, double z1, double z2, const SimConfig& cfg,
                                               Rng& rng) {
    detail::require_alpha(alpha);
    cfg.validate();
    auto p = detail::halfline_pair(z1, z2);
    HitSample s;
    s.exact_place = true;
    s.exact_time = false;
    s.substeps = cfg.substeps;
    if (p.x1 == 0.0) {
        s.place = {p.x2};
        s.time_levels = {0.0};
        return s;
    }
    double T = p.x1 / (2.0 * rng.gamma(0.5 * alpha));
    auto sk = detail::halfline_skeleton(alpha, p.x1, p.x2, T, cfg.substeps, rng);
    s.place = {sk.place};
    s.time_levels = sk.a_levels;
    s.time_functional = sk.a_levels[0];
    if (cfg.richardson && sk.a_levels.size() > 1)
        s.time_functional = std::max(0.0, 2.0 * sk.a_levels[0] - sk.a_levels[1]);
    return s;
}

namespace detail {

// (z1, z2) -> (x1, x2) with h(x1, x2) = ((1 - x1^2)(x2^2 - 1), x1 x2) = (z1^2, z2):
// the smaller root is the Legendre coordinate, the larger the hyperbolic one.
inline PairStart strip_pair(double z1, double z2) {
    if (z1 == 0.0 && std::fabs(z2) >= 1.0) throw DomainError("strip start lies on the removed set");
    double a = std::hypot(z1, z2 + 1.0), b = std::hypot(z1, z2 - 1.0);
    PairStart p{0.5 * (a - b), 0.5 * (a + b)};
    p.x1 = std::clamp(p.x1, -1.0, 1.0);
    p.x2 = std::max(p.x2, 1.0);
    double h1 = (1.0 - p.x1 * p.x1) * (p.x2 * p.x2 - 1.0), h2 = p.x1 * p.x2;
    double scale = 1.0 + z1 * z1 + std::fabs(z2);
    if (std::fabs(h1 - z1 * z1) > 1e-9 * scale || std::fabs(h2 - z2) > 1e-9 * scale)
        throw NumericalError("strip_pair: inverse map check failed");
    return p;
}

} // namespace detail

// Euler scheme for the Legendre / hyperbolic Bessel pair,
//   dX1 = sqrt(1 - X1^2) dB1 - (2 - alpha)/2 X1 dt
//   dX2 = sqrt(X2^2 - 1) dB2 + (2 - alpha)/2 X2 dt,
// X2 projected onto [1, inf). Exit when |X1| reaches 1; the place is X1 X2 = +-X2.
// time_functional is A_2 = int (X2^2 - X1^2) by trapezoid.
inline HitSample sample_strip_hit(double alpha, double z1, double z2, const SimConfig& cfg, Rng& rng) {
    detail::require_alpha(alpha);
    cfg.validate();
    auto p = detail::strip_pair(z1, z2);
    const double drift = 0.5 * (2.0 - alpha);
    const double dt = cfg.dt, sdt = std::sqrt(dt);
    double x1 = p.x1, x2 = p.x2;
    double g_old = x2 * x2 - x1 * x1, acc = 0.0;
    HitSample s;
    s.exact_place = false;
    s.exact_time = false;
    if (std::fabs(x1) >= 1.0) {
        s.place = {(x1 > 0 ? 1.0 : -1.0) * x2};
        return s;
    }
    const double c1 = 1.0 - drift * dt, c2 = 1.0 + drift * dt;
    // trapezoid over the accepted points: acc holds g_1 + ... + g_k
    const double g0 = g_old;
    for (long step = 0; step < cfg.horizon_steps; ++step) {
        double n1 = rng.normal(), n2 = rng.normal();
        double v1 = 1.0 - x1 * x1, v2 = x2 * x2 - 1.0;
        double y1 = c1 * x1 + (v1 > 0.0 ? std::sqrt(v1) : 0.0) * sdt * n1;
        double y2 = c2 * x2 + (v2 > 0.0 ? std::sqrt(v2) : 0.0) * sdt * n2;
        if (y2 < 1.0) y2 = 1.0;
        if (std::fabs(y1) >= 1.0) {
            double sign = y1 > 0 ? 1.0 : -1.0;
            double theta = 1.0;
            if (cfg.bridge_correction) theta = (1.0 - std::fabs(x1)) / (std::fabs(y1) - std::fabs(x1));
            double xe2 = x2 + theta * (y2 - x2);
            double g_new = xe2 * xe2 - 1.0;
            // full steps up to x, then the fractional step to the crossing
            double full = dt * (0.5 * g0 + acc - 0.5 * g_old);
            s.place = {sign * xe2};
            s.time_functional = full + 0.5 * (g_old + g_new) * theta * dt;
            return s;
        }
        x1 = y1;
        x2 = y2;
        g_old = x2 * x2 - x1 * x1;
        acc += g_old;
    }
    throw HorizonError("sample_strip_hit: exit not reached within the step budget");
}

// Strip in R^{n+1}: the (Y1, B2) pair exits as in two dimensions, the other
// Brownian coordinates are Gaussian with variance tau. start = (y1, y2, ybar...).
inline HitSample sample_strip_hit_nd(double alpha, const std::vector<double>& start, const SimConfig& cfg,
                                     Rng& rng) {
    if (start.size() < 2) throw DomainError("sample_strip_hit_nd: start needs at least 2 coordinates");
    HitSample s = sample_strip_hit(alpha, start[0], start[1], cfg, rng);
    double sd = std::sqrt(s.time_functional);
    for (std::size_t i = 2; i < start.size(); ++i) s.place.push_back(start[i] + sd * rng.normal());
    return s;
}

// Half-space {y1 = 0, y2 > 0}^c in R^{n+1}, start y = (y1, y2, ..., y_{n+1}).
// Stage one runs BES^(-alpha/2) to 0 exactly; if B2 >= 0 there the path exits.
// Otherwise stage two restarts on the boundary with the half-line skeleton
// sampler and moves the other n - 1 Brownian coordinates by its duration.
inline HitSample sample_halfspace_hit_nd(double alpha, int n, const std::vector<double>& y, const SimConfig& cfg,
                                         Rng& rng) {
    detail::require_alpha(alpha);
    if (n < 1 || y.size() != std::size_t(n) + 1) throw DomainError("sample_halfspace_hit_nd: need n >= 1, n+1 coordinates");
    if (!(y[0] >= 0.0)) throw DomainError("sample_halfspace_hit_nd: y1 must be nonnegative");
    std::vector<double> b(y.begin() + 1, y.end());
    double t1 = 0.0;
    if (y[0] > 0.0) {
        t1 = bes_hit_zero_sample(alpha, y[0], rng);
        double sd = std::sqrt(t1);
        for (auto& v : b) v += sd * rng.normal();
    }
    HitSample s;
    s.substeps = cfg.substeps;
    if (b[0] >= 0.0) {
        if (y[0] == 0.0 && b[0] > 0.0) throw DomainError("sample_halfspace_hit_nd: start lies on the removed half-space");
        s.place = b;
        s.time_functional = t1;
        s.exact_place = true;
        s.exact_time = true;
        return s;
    }
    HitSample h = sample_halfline_hit_with_time(alpha, 0.0, b[0], cfg, rng);
    double sd = std::sqrt(h.time_functional);
    s.place = {h.place[0]};
    for (int i = 1; i < n; ++i) s.place.push_back(b[i] + sd * rng.normal());
    s.time_functional = t1 + h.time_functional;
    s.exact_place = (n == 1);
    s.exact_time = false;
    return s;
}

// Complement of {y1 = y2 = 0, y3 > 0} in R^{n+1}, 1 < alpha < 2.
// Z = sqrt(Y1^2 + B2^2) is BES^((1-alpha)/2), so this is the half-space problem
// in R^n with index alpha - 1 started at (|(y1, y2)|, y3, ..., y_{n+1}).
inline HitSample sample_halfline_complement_hit(double alpha, const std::vector<double>& y, const SimConfig& cfg,
                                                Rng& rng) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("sample_halfline_complement_hit: needs 1 < alpha < 2");
    if (y.size() < 3) throw DomainError("sample_halfline_complement_hit: start needs at least 3 coordinates");
    std::vector<double> w;
    w.push_back(std::hypot(y[0], y[1]));
    w.insert(w.end(), y.begin() + 2, y.end());
    return sample_halfspace_hit_nd(alpha - 1.0, int(y.size()) - 2, w, cfg, rng);
}

// Number of worker threads: HITKIT_THREADS if set, else hardware concurrency.
inline unsigned thread_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HITKIT_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return unsigned(std::min<long>(v, 1024));
    }
    return hw;
}

// Runs fn(path_index, rng) for paths first_path, ..., first_path + n_paths - 1
// with the per-path stream of (seed, path_index). Results come back in path
// order whatever the threading.
template <class Result, class Fn>
std::vector<Result> run_paths(long n_paths, std::uint64_t seed, Fn fn, unsigned threads = 0, long first_path = 0) {
    if (threads == 0) threads = thread_count();
    threads = unsigned(std::min<long>(threads, std::max<long>(1, n_paths)));
    std::vector<Result> out(std::size_t(std::max<long>(0, n_paths)));
    std::vector<std::exception_ptr> errors(threads);
    auto work = [&](unsigned id) {
        long lo = n_paths * long(id) / long(threads), hi = n_paths * long(id + 1) / long(threads);
        try {
            for (long i = lo; i < hi; ++i) {
                Rng rng = Rng::for_path(seed, std::uint64_t(first_path + i));
                out[std::size_t(i)] = fn(first_path + i, rng);
            }
        } catch (...) {
            errors[id] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned id = 0; id < threads; ++id) pool.emplace_back(work, id);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

} // namespace hitkit
