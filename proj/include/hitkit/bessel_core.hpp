#pragma once

// Squared Bessel processes: transition densities, exact transition sampling,
// hitting-time laws and Laplace transforms of additive functionals.

#include <cmath>

#include "error.hpp"
#include "gamma.hpp"
#include "rng.hpp"
#include "specfun.hpp"

namespace hitkit {

struct BesselLaw {
    double nu; // index, nu = delta/2 - 1

    static BesselLaw from_index(double nu) { return {nu}; }
    static BesselLaw from_dimension(double delta) { return {0.5 * delta - 1.0}; }
    static BesselLaw from_alpha(double alpha) { return {-0.5 * alpha}; }

    double delta() const { return 2.0 * nu + 2.0; }
    bool valid() const { return nu > -1.0; }
    // -1 < nu < 0: the origin is instantaneously reflecting.
    bool is_reflecting_regime() const { return nu > -1.0 && nu < 0.0; }
};

namespace detail {

inline void require_law(const BesselLaw& law) {
    if (!law.valid()) throw DomainError("BESQ law needs nu > -1");
}

inline void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0, 2)");
}

// log sinh(u) for u > 0 without overflow.
inline double log_sinh(double u) {
    if (u > 20.0) return u + std::log1p(-std::exp(-2.0 * u)) - std::log(2.0);
    return std::log(std::sinh(u));
}

inline double coth(double u) { return 1.0 / std::tanh(u); }

} // namespace detail

// Density of X(t) in y (Lebesgue) for X a BESQ^(nu) started at x.
//   x > 0: (1/2t) (y/x)^{nu/2} exp(-(x+y)/2t) I_nu(sqrt(xy)/t)
//   x = 0: (2t)^{-(nu+1)} y^nu exp(-y/2t) / Gamma(nu+1)
inline double besq_transition_density(const BesselLaw& law, double t, double x, double y) {
    detail::require_law(law);
    if (!(t > 0.0)) throw DomainError("besq_transition_density: t must be positive");
    if (!(x >= 0.0)) throw DomainError("besq_transition_density: x must be nonnegative");
    if (!(y > 0.0)) return 0.0;
    const double nu = law.nu;
    if (x == 0.0) {
        double lg = -(nu + 1.0) * std::log(2.0 * t) + nu * std::log(y) - y / (2.0 * t) -
                    sf::log_abs_gamma(nu + 1.0);
        return std::exp(lg);
    }
    const double z = std::sqrt(x * y) / t;
    const double d = std::sqrt(x) - std::sqrt(y);
    // exp(-(x+y)/2t) I(z) = exp(-(sqrt x - sqrt y)^2 / 2t) e^{-z} I(z)
    return 0.5 / t * std::pow(y / x, 0.5 * nu) * std::exp(-d * d / (2.0 * t)) *
           sf::bessel_i_scaled(nu, z);
}

// Exact draw of X(t): Poisson(x/2t) mixture of Gamma(nu+1+N) scaled by 2t.
inline double besq_sample_transition(const BesselLaw& law, double t, double x, Rng& rng) {
    detail::require_law(law);
    if (!(t >= 0.0) || !(x >= 0.0)) throw DomainError("besq_sample_transition: bad arguments");
    if (t == 0.0) return x;
    long n = x > 0.0 ? rng.poisson(x / (2.0 * t)) : 0;
    return 2.0 * t * rng.gamma(law.nu + 1.0 + double(n));
}

// Density of the first hitting time of 0 by BES^(-alpha/2) started at y1:
//   y1^alpha / (2^{alpha/2} Gamma(alpha/2) t^{1+alpha/2}) exp(-y1^2/2t)
inline double bes_hit_zero_density(double alpha, double y1, double t) {
    detail::require_alpha(alpha);
    if (!(y1 > 0.0)) throw DomainError("bes_hit_zero_density: start must be positive");
    if (!(t > 0.0)) return 0.0;
    double lg = alpha * std::log(y1) - 0.5 * alpha * std::log(2.0) - sf::log_abs_gamma(0.5 * alpha) -
                (1.0 + 0.5 * alpha) * std::log(t) - y1 * y1 / (2.0 * t);
    return std::exp(lg);
}

// T = y1^2 / (2G), G ~ Gamma(alpha/2). A start at 0 is hit at once.
inline double bes_hit_zero_sample(double alpha, double y1, Rng& rng) {
    detail::require_alpha(alpha);
    if (!(y1 >= 0.0)) throw DomainError("bes_hit_zero_sample: start must be nonnegative");
    if (y1 == 0.0) return 0.0;
    return y1 * y1 / (2.0 * rng.gamma(0.5 * alpha));
}

// E^x[exp(-lambda^2/2 int_0^t X); X(t) in dr] / dr.
//   x > 0: (r/x)^{nu/2} lambda/(2 sinh t lambda) exp(-lambda (x+r) coth(t lambda)/2)
//          * I_nu(sqrt(xr) lambda / sinh(t lambda))
//   x = 0: r^nu lambda^{nu+1} / (2 sinh t lambda)^{nu+1} exp(-lambda r coth(t lambda)/2) / Gamma(nu+1)
// lambda = 0 is the transition density.
inline double besq_bridge_laplace_density(const BesselLaw& law, double lambda, double t, double x,
                                          double r) {
    detail::require_law(law);
    if (!(t > 0.0) || !(x >= 0.0) || !(lambda >= 0.0))
        throw DomainError("besq_bridge_laplace_density: bad arguments");
    if (!(r > 0.0)) return 0.0;
    if (lambda == 0.0) return besq_transition_density(law, t, x, r);
    const double nu = law.nu;
    const double u = t * lambda;
    const double lsh = detail::log_sinh(u);
    const double cth = detail::coth(u);
    if (x == 0.0) {
        double lg = nu * std::log(r) + (nu + 1.0) * std::log(lambda) - (nu + 1.0) * (std::log(2.0) + lsh) -
                    0.5 * lambda * r * cth - sf::log_abs_gamma(nu + 1.0);
        return std::exp(lg);
    }
    const double z = std::sqrt(x * r) * lambda * std::exp(-lsh);
    double lg = 0.5 * nu * std::log(r / x) + std::log(0.5 * lambda) - lsh - 0.5 * lambda * (x + r) * cth + z;
    return std::exp(lg) * sf::bessel_i_scaled(nu, z);
}

// E^x[exp(-gamma tau_0 - lambda^2/2 int_0^{tau_0} X)] for -1 < nu < 0:
//   Gamma((1 - nu + gamma/lambda)/2) / (lambda^{(nu+1)/2} Gamma(|nu|))
//   * x^{-(nu+1)/2} W_{-gamma/2lambda, |nu|/2}(lambda x)
// The constant is the b -> 0 limit of the level-b ratio below, taken with the
// small-z law of W: W_{k,m}(z) ~ Gamma(2m)/Gamma(1/2 - k + m) z^{1/2 - m}.
inline double besq_hit_laplace(const BesselLaw& law, double gamma, double lambda, double x) {
    if (!law.is_reflecting_regime()) throw DomainError("besq_hit_laplace: needs -1 < nu < 0");
    if (!(gamma >= 0.0) || !(lambda > 0.0) || !(x > 0.0))
        throw DomainError("besq_hit_laplace: needs gamma >= 0, lambda > 0, x > 0");
    const double nu = law.nu, mu = 0.5 * std::fabs(nu), kappa = -gamma / (2.0 * lambda);
    double lc = sf::log_abs_gamma(0.5 * (1.0 - nu + gamma / lambda)) - 0.5 * (nu + 1.0) * std::log(lambda) -
                sf::log_abs_gamma(std::fabs(nu)) - 0.5 * (nu + 1.0) * std::log(x);
    return std::exp(lc) * sf::whittaker_w(kappa, mu, lambda * x);
}

// Same transform for the first hitting time of a level 0 < b <= x, any nu > -1.
inline double besq_hit_laplace_level(const BesselLaw& law, double gamma, double lambda, double x, double b) {
    detail::require_law(law);
    if (!(gamma >= 0.0) || !(lambda > 0.0) || !(b > 0.0) || !(x >= b))
        throw DomainError("besq_hit_laplace_level: needs gamma >= 0, lambda > 0, x >= b > 0");
    if (x == b) return 1.0;
    const double nu = law.nu, mu = 0.5 * std::fabs(nu), kappa = -gamma / (2.0 * lambda);
    double num = sf::whittaker_w(kappa, mu, lambda * x);
    double den = sf::whittaker_w(kappa, mu, lambda * b);
    return std::pow(x / b, -0.5 * (nu + 1.0)) * num / den;
}

// w(t, x) = E^x[exp(-lambda^2/2 int_0^{tau_0} X); tau_0 in dt] / dt, nu = -alpha/2:
//   x^{alpha/2} lambda^{1+alpha/2} / (2^{alpha/2} Gamma(alpha/2) sinh^{1+alpha/2}(t lambda))
//   * exp(-x lambda coth(t lambda) / 2)
// lambda = 0 gives the hitting density of BESQ, y1 = sqrt(x) in the BES law.
inline double besq_hit_time_density(double alpha, double lambda, double x, double t) {
    detail::require_alpha(alpha);
    if (!(lambda >= 0.0) || !(x > 0.0)) throw DomainError("besq_hit_time_density: bad arguments");
    if (!(t > 0.0)) return 0.0;
    const double a2 = 0.5 * alpha;
    double lg = a2 * std::log(x) - a2 * std::log(2.0) - sf::log_abs_gamma(a2);
    if (lambda == 0.0) {
        lg += -(1.0 + a2) * std::log(t) - x / (2.0 * t);
    } else {
        const double u = t * lambda;
        lg += (1.0 + a2) * std::log(lambda) - (1.0 + a2) * detail::log_sinh(u) - 0.5 * x * lambda * detail::coth(u);
    }
    return std::exp(lg);
}

// Generalised Bessel diffusions on [-1, 1] and [1, inf): s'(x) and m(x).
inline double scale_density(double alpha, double x) {
    detail::require_alpha(alpha);
    double q = std::fabs(1.0 - x * x);
    if (q == 0.0) throw DomainError("scale_density: singular at |x| = 1");
    return std::pow(q, 0.5 * alpha - 1.0);
}

inline double speed_density(double alpha, double x) {
    detail::require_alpha(alpha);
    double q = std::fabs(1.0 - x * x);
    if (q == 0.0) throw DomainError("speed_density: singular at |x| = 1");
    return 2.0 * std::pow(q, -0.5 * alpha);
}

} // namespace hitkit
