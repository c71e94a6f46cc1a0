#pragma once

// Gamma function family (Lanczos, g = 7, nine coefficients).

#include <cmath>
#include <complex>
#include <numbers>

#include "error.hpp"

namespace hitkit::sf {

inline constexpr double pi = std::numbers::pi;

namespace detail {

inline constexpr double lanczos_g = 7.0;
inline constexpr double lanczos_c[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

template <class T>
T lanczos_sum(T z) { // z = x - 1
    T s = T(lanczos_c[0]);
    for (int i = 1; i < 9; ++i) s += lanczos_c[i] / (z + double(i));
    return s;
}

inline bool is_nonpositive_integer(double x) {
    return x <= 0.0 && x == std::nearbyint(x);
}

} // namespace detail

// sin(pi x) with the argument reduced first, exact zeros at integers.
inline double sinpi(double x) {
    if (x == std::nearbyint(x)) return 0.0;
    double r = std::remainder(x, 2.0); // r in [-1, 1]
    if (r > 0.5) return std::sin(pi * (1.0 - r));
    if (r < -0.5) return -std::sin(pi * (1.0 + r));
    return std::sin(pi * r);
}

inline double cospi(double x) { return sinpi(x + 0.5); }

// log|Gamma(x)|, x not a pole.
inline double log_abs_gamma(double x) {
    if (detail::is_nonpositive_integer(x)) throw PoleError("log_abs_gamma: pole");
    if (x < 0.5) return std::log(pi / std::fabs(sinpi(x))) - log_abs_gamma(1.0 - x);
    double z = x - 1.0;
    double t = z + detail::lanczos_g + 0.5;
    return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t +
           std::log(detail::lanczos_sum(z));
}

inline double gamma_sign(double x) {
    if (x > 0.0) return 1.0;
    if (detail::is_nonpositive_integer(x)) return NAN;
    // Gamma alternates sign between consecutive negative integers.
    return (static_cast<long long>(std::floor(x)) % 2 == 0) ? 1.0 : -1.0;
}

inline double gamma(double x) {
    if (detail::is_nonpositive_integer(x)) throw PoleError("gamma: pole at nonpositive integer");
    if (x < 0.5) return pi / (sinpi(x) * gamma(1.0 - x));
    if (x > 171.6) throw OverflowError("gamma: overflow");
    double z = x - 1.0;
    double t = z + detail::lanczos_g + 0.5;
    if (x < 140.0)
        return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) *
               detail::lanczos_sum(z);
    return std::exp(log_abs_gamma(x));
}

// 1/Gamma(x), zero at the poles.
inline double rgamma(double x) {
    if (detail::is_nonpositive_integer(x)) return 0.0;
    if (x > 171.6) return gamma_sign(x) * std::exp(-log_abs_gamma(x));
    if (x < -170.0) return gamma_sign(x) * std::exp(-log_abs_gamma(x));
    return 1.0 / gamma(x);
}

// log Gamma(z) on the principal branch for complex z.
inline std::complex<double> log_gamma(std::complex<double> z) {
    using C = std::complex<double>;
    if (z.real() < 0.5) {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return std::log(C(pi)) - std::log(std::sin(pi * z)) - log_gamma(1.0 - z);
    }
    C w = z - 1.0;
    C t = w + detail::lanczos_g + 0.5;
    return 0.5 * std::log(2.0 * pi) + (w + 0.5) * std::log(t) - t +
           std::log(detail::lanczos_sum(w));
}

// |Gamma(x + i y)|^2
inline double abs_gamma_sq(double x, double y) {
    if (y == 0.0) {
        double g = gamma(x);
        return g * g;
    }
    return std::exp(2.0 * log_gamma({x, y}).real());
}

inline double beta(double a, double b) {
    if (a > 0 && b > 0 && a + b < 170.0) return gamma(a) * gamma(b) / gamma(a + b);
    return gamma_sign(a) * gamma_sign(b) * gamma_sign(a + b) *
           std::exp(log_abs_gamma(a) + log_abs_gamma(b) - log_abs_gamma(a + b));
}

} // namespace hitkit::sf
