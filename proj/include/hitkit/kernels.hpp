#pragma once

// Closed-form hitting kernels, resolvents and the interval series machinery.
// Coordinates: the distinguished coordinate (the one whose sign separates the
// start from the target set) always comes first in a point vector.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "bessel_core.hpp"
#include "diffusion_sim.hpp"
#include "error.hpp"
#include "gamma.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace hitkit {

struct StabilityParams {
    double alpha = 1.0;
    double mass = 0.0;
    double lambda = 0.0;

    void validate() const {
        detail::require_alpha(alpha);
        if (!(mass >= 0.0)) throw DomainError("StabilityParams: mass must be nonnegative");
        if (!(lambda >= 0.0)) throw DomainError("StabilityParams: lambda must be nonnegative");
    }
    // Laplace parameter matching a relativistic mass.
    static double lambda_for_mass(double alpha, double m) { return std::pow(m, 1.0 / alpha); }
};

namespace detail {

inline double dist(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DomainError("dist: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

// lambda^nu K_nu(lambda d) / d^nu; at lambda = 0 the limit 2^{nu-1} Gamma(nu) / d^{2 nu} (nu > 0).
inline double lk_ratio(double nu, double lambda, double d) {
    if (!(d > 0.0)) throw DomainError("lk_ratio: distance must be positive");
    if (lambda == 0.0) {
        if (!(nu > 0.0)) throw DomainError("lk_ratio: lambda = 0 needs a positive order");
        return std::exp((nu - 1.0) * std::log(2.0) + sf::log_abs_gamma(nu) - 2.0 * nu * std::log(d));
    }
    double x = lambda * d;
    if (x > 745.0 + 50.0) return 0.0;
    return std::exp(nu * (std::log(lambda) - std::log(d)) - x) * sf::bessel_k_scaled(nu, x);
}

inline void require_lambda(double lambda) {
    if (!(lambda >= 0.0)) throw DomainError("lambda must be nonnegative");
}

// Half-space hitting kernel from the boundary, lambda >= 0. ratio = -y/sigma.
inline double h_kernel(double alpha, int n, double lambda, double ratio, double d) {
    double c = 2.0 * std::sin(sf::pi * alpha / 2.0) /
               (std::pow(2.0, 0.5 * n) * std::pow(sf::pi, 0.5 * (n + 2)));
    return c * std::pow(ratio, 0.5 * alpha) * lk_ratio(0.5 * n, lambda, d);
}

// First-stage kernel P_lambda, d = |y - z~| with y1 included.
inline double p_kernel(double alpha, int n, double lambda, double y1, double d) {
    double lc = std::log(2.0) + alpha * std::log(y1) - 0.5 * n * std::log(2.0 * sf::pi) -
                0.5 * alpha * std::log(2.0) - sf::log_abs_gamma(0.5 * alpha);
    return std::exp(lc) * lk_ratio(0.5 * (n + alpha), lambda, d);
}

// Integral of f over the real line with the mass concentrated near a and b.
template <class F>
double integrate_line(F&& f, double a, double b, const quad::QuadSpec& spec, double& err) {
    if (a > b) std::swap(a, b);
    auto left = quad::integrate_exp_sinh([&](double w) { return f(a - w); }, spec);
    auto right = quad::integrate_exp_sinh([&](double w) { return f(b + w); }, spec);
    double v = left.value + right.value;
    err += left.err_est + right.err_est;
    if (b > a) {
        auto mid = quad::integrate_tanh_sinh(f, a, b, spec);
        v += mid.value;
        err += mid.err_est;
    }
    return v;
}

} // namespace detail

// (sin(pi a/2)/pi) (-u/r)^{a/2} e^{-lambda (r - u)} / (r - u): exit density on
// the half-line {0} x (0, inf) from (0, u), u < 0, weighted by e^{-lambda^2 tau/2}.
inline double halfline2d_boundary_kernel(double alpha, double lambda, double u, double r) {
    detail::require_alpha(alpha);
    detail::require_lambda(lambda);
    if (!(u < 0.0) || !(r > 0.0)) throw DomainError("halfline2d_boundary_kernel: needs u < 0 < r");
    return std::sin(sf::pi * alpha / 2.0) / sf::pi * std::pow(-u / r, 0.5 * alpha) *
           std::exp(-lambda * (r - u)) / (r - u);
}

// General start (z1 > 0, z2):
//   (|z|+z2)^{a/4} (|z|-z2)^{a/2} / (2^{3a/4} Gamma(a/2) r^{a/4})
//   * int_lambda^inf e^{-(|z|+r)s} (s^2-lambda^2)^{a/4} I_{-a/2}(k sqrt(s^2-lambda^2)) ds,
// k = sqrt(2r(|z|+z2)). For lambda > 0 the substitution s = lambda cosh v leaves
// an analytic integrand; for lambda = 0 the integral runs over s directly.
inline quad::QuadResult halfline2d_laplace_kernel_q(double alpha, double lambda, double z1, double z2, double r,
                                                    const quad::QuadSpec& q = {}) {
    detail::require_alpha(alpha);
    detail::require_lambda(lambda);
    if (!(z1 > 0.0) || !(r > 0.0)) throw DomainError("halfline2d_laplace_kernel: needs z1 > 0, r > 0");
    const double a = alpha, nz = std::hypot(z1, z2);
    const double c = nz + r;
    const double k = std::sqrt(2.0 * r * (nz + z2));
    // |z| - z2 loses digits when z2 >> z1 > 0
    const double nz_minus = z2 > 0.0 ? z1 * z1 / (nz + z2) : nz - z2;
    double lpre = 0.25 * a * std::log(nz + z2) + 0.5 * a * std::log(nz_minus) - 0.75 * a * std::log(2.0) -
                  sf::log_abs_gamma(0.5 * a) - 0.25 * a * std::log(r);
    // g(x) = x^{a/2} I_{-a/2}(x) e^{-x}, finite at x = 0
    auto g = [a](double x) {
        if (x == 0.0) return std::pow(2.0, 0.5 * a) * sf::rgamma(1.0 - 0.5 * a);
        return std::pow(x, 0.5 * a) * sf::bessel_i_scaled(-0.5 * a, x);
    };
    const double kfac = std::pow(k, -0.5 * a);
    quad::QuadResult res;
    if (lambda > 0.0) {
        auto f = [&](double v) {
            double sh = std::sinh(v), ch = std::cosh(v);
            double x = k * lambda * sh;
            double e = -lambda * (c * ch - k * sh);
            return lambda * sh * kfac * g(x) * std::exp(e);
        };
        res = quad::integrate_semi_infinite(f, 0.0, q, 1.0);
    } else {
        auto f = [&](double s) { return kfac * g(k * s) * std::exp(-(c - k) * s); };
        double h = std::hypot(z1, r - z2);
        double scale = (c + k) / h / h;
        res = quad::integrate_semi_infinite(f, 0.0, q, scale);
    }
    double pre = std::exp(lpre);
    return {pre * res.value, pre * res.err_est, res.evaluations};
}

inline double halfline2d_laplace_kernel(double alpha, double lambda, double z1, double z2, double r,
                                        const quad::QuadSpec& q = {}) {
    return halfline2d_laplace_kernel_q(alpha, lambda, z1, z2, r, q).value;
}

// Joint density of (tau, place) from y = (0, y2, ..., y_{n+1}), y2 < 0, at
// sigma~ = (sigma2, ..., sigma_{n+1}), sigma2 > 0:
//   sin(pi a/2)/(2^{n/2} pi^{1+n/2}) (-y2/sigma2)^{a/2} t^{-1-n/2} exp(-|sigma~ - y~|^2/2t)
inline double halfspace_joint_density(double alpha, int n, const std::vector<double>& y_tilde, double t,
                                      const std::vector<double>& sigma_tilde) {
    detail::require_alpha(alpha);
    if (n < 1 || y_tilde.size() != std::size_t(n) || sigma_tilde.size() != std::size_t(n))
        throw DomainError("halfspace_joint_density: needs n >= 1 and n coordinates");
    if (!(y_tilde[0] < 0.0) || !(sigma_tilde[0] > 0.0))
        throw DomainError("halfspace_joint_density: needs y2 < 0 < sigma2");
    if (!(t > 0.0)) return 0.0;
    double d = detail::dist(y_tilde, sigma_tilde);
    double lg = std::log(std::sin(sf::pi * alpha / 2.0)) - 0.5 * n * std::log(2.0) -
                (1.0 + 0.5 * n) * std::log(sf::pi) + 0.5 * alpha * std::log(-y_tilde[0] / sigma_tilde[0]) -
                (1.0 + 0.5 * n) * std::log(t) - d * d / (2.0 * t);
    return std::exp(lg);
}

// H_lambda(y~, sigma~) from a boundary start, lambda > 0:
//   2 sin(pi a/2) lambda^{n/2} / (2^{n/2} pi^{(n+2)/2}) (-y2/sigma2)^{a/2} K_{n/2}(lambda d)/d^{n/2}
inline double halfspace_H_lambda(double alpha, int n, double lambda, const std::vector<double>& y_tilde,
                                 const std::vector<double>& sigma_tilde) {
    detail::require_alpha(alpha);
    if (!(lambda > 0.0)) throw DomainError("halfspace_H_lambda: needs lambda > 0");
    if (n < 1 || y_tilde.size() != std::size_t(n) || sigma_tilde.size() != std::size_t(n))
        throw DomainError("halfspace_H_lambda: needs n >= 1 and n coordinates");
    if (!(y_tilde[0] < 0.0) || !(sigma_tilde[0] > 0.0)) throw DomainError("halfspace_H_lambda: needs y2 < 0 < sigma2");
    return detail::h_kernel(alpha, n, lambda, -y_tilde[0] / sigma_tilde[0], detail::dist(y_tilde, sigma_tilde));
}

// Stable Poisson kernel of the half-space {x1 < 0} in R^n:
//   sin(pi a/2) Gamma(n/2) / pi^{(n+2)/2} (-y1/sigma1)^{a/2} |y - sigma|^{-n}
inline double halfspace_poisson_stable(double alpha, int n, const std::vector<double>& y,
                                       const std::vector<double>& sigma) {
    detail::require_alpha(alpha);
    if (n < 1 || y.size() != std::size_t(n) || sigma.size() != std::size_t(n))
        throw DomainError("halfspace_poisson_stable: needs n >= 1 and n coordinates");
    if (!(y[0] < 0.0) || !(sigma[0] > 0.0)) throw DomainError("halfspace_poisson_stable: needs y1 < 0 < sigma1");
    double d = detail::dist(y, sigma);
    return std::sin(sf::pi * alpha / 2.0) * sf::gamma(0.5 * n) / std::pow(sf::pi, 0.5 * (n + 2)) *
           std::pow(-y[0] / sigma[0], 0.5 * alpha) * std::pow(d, -n);
}

// m-Poisson kernel of the half-space for the relativistic process, m > 0:
// H_lambda with lambda = m^{1/a}.
inline double halfspace_poisson_relativistic(double alpha, double m, int n, const std::vector<double>& y,
                                             const std::vector<double>& sigma) {
    if (!(m > 0.0)) throw DomainError("halfspace_poisson_relativistic: needs m > 0");
    detail::require_alpha(alpha);
    return halfspace_H_lambda(alpha, n, StabilityParams::lambda_for_mass(alpha, m), y, sigma);
}

// P_lambda(y, z~) = E[e^{-lambda^2 T/2}; B^n(T) in dz~], T the first zero of Y1:
//   2 y1^a lambda^{(n+a)/2} / ((2 pi)^{n/2} 2^{a/2} Gamma(a/2)) K_{(n+a)/2}(lambda |y - z~|)/|y - z~|^{(n+a)/2}
// y = (y1, y2, ..., y_{n+1}), y1 > 0; z~ in R^n. lambda = 0 is the limit.
inline double halfspace_P_lambda(double alpha, int n, double lambda, const std::vector<double>& y,
                                 const std::vector<double>& z_tilde) {
    detail::require_alpha(alpha);
    detail::require_lambda(lambda);
    if (n < 1 || y.size() != std::size_t(n) + 1 || z_tilde.size() != std::size_t(n))
        throw DomainError("halfspace_P_lambda: needs n >= 1, n+1 start and n target coordinates");
    if (!(y[0] > 0.0)) throw DomainError("halfspace_P_lambda: needs y1 > 0");
    double s = y[0] * y[0];
    for (int i = 0; i < n; ++i) s += (y[i + 1] - z_tilde[i]) * (y[i + 1] - z_tilde[i]);
    return detail::p_kernel(alpha, n, lambda, y[0], std::sqrt(s));
}

struct CompositionOptions {
    bool force_qmc = false;
    int qmc_log2_points = 16;
};

// E^y[e^{-lambda^2 tau/2}; Y(tau) in d sigma~] for a general start y1 > 0:
//   int_{z2<0} P_lambda(y, z~) H_lambda(z~, sigma~) dz~ + P_lambda(y, sigma~).
// n = 1, 2, 3 by nested quadrature, higher n (or force_qmc) by a rank-1
// lattice rule over a Cauchy-type map of the half-space.
inline quad::QuadResult halfspace_laplace_kernel_q(double alpha, int n, double lambda, const std::vector<double>& y,
                                                   const std::vector<double>& sigma_tilde,
                                                   const quad::QuadSpec& q = {}, CompositionOptions opt = {}) {
    detail::require_alpha(alpha);
    detail::require_lambda(lambda);
    if (n < 1 || y.size() != std::size_t(n) + 1 || sigma_tilde.size() != std::size_t(n))
        throw DomainError("halfspace_laplace_kernel: needs n >= 1, n+1 start and n target coordinates");
    if (!(sigma_tilde[0] > 0.0)) throw DomainError("halfspace_laplace_kernel: needs sigma2 > 0");
    if (!(y[0] >= 0.0)) throw DomainError("halfspace_laplace_kernel: needs y1 >= 0");
    if (y[0] == 0.0) {
        std::vector<double> yt(y.begin() + 1, y.end());
        if (!(yt[0] < 0.0)) throw DomainError("halfspace_laplace_kernel: start lies on the removed set");
        double d = detail::dist(yt, sigma_tilde);
        return {detail::h_kernel(alpha, n, lambda, -yt[0] / sigma_tilde[0], d), 0.0, 1};
    }
    const double y1 = y[0];
    const double direct = halfspace_P_lambda(alpha, n, lambda, y, sigma_tilde);

    // integrand at z~ = (-w, zbar)
    std::vector<double> zt(n);
    auto integrand = [&](double w) {
        double dp = y1 * y1 + (y[1] + w) * (y[1] + w), dh = (sigma_tilde[0] + w) * (sigma_tilde[0] + w);
        for (int i = 1; i < n; ++i) {
            dp += (y[i + 1] - zt[i]) * (y[i + 1] - zt[i]);
            dh += (sigma_tilde[i] - zt[i]) * (sigma_tilde[i] - zt[i]);
        }
        return detail::p_kernel(alpha, n, lambda, y1, std::sqrt(dp)) *
               detail::h_kernel(alpha, n, lambda, w / sigma_tilde[0], std::sqrt(dh));
    };

    if (n <= 3 && !opt.force_qmc) {
        quad::QuadSpec inner = q;
        inner.tol = q.tol * 0.1;
        double err = 0.0;
        long evals = 0;
        std::function<double(int, double)> level = [&](int i, double w) -> double {
            if (i == n) {
                ++evals;
                return integrand(w);
            }
            return detail::integrate_line(
                [&](double zi) {
                    zt[i] = zi;
                    return level(i + 1, w);
                },
                y[i + 1], sigma_tilde[i], inner, err);
        };
        // P_lambda concentrates at w = -y2 on the scale y1: split there
        auto lw = [&](double w) { return level(1, w); };
        const double w0 = -y[1];
        if (!(w0 > 0.0)) {
            auto outer = quad::integrate_exp_sinh(lw, q);
            return {outer.value + direct, outer.err_est + err, evals};
        }
        auto head = quad::integrate_tanh_sinh(lw, 0.0, w0, q);
        auto tail = quad::integrate_exp_sinh([&](double v) { return level(1, w0 + v); }, q);
        return {head.value + tail.value + direct, head.err_est + tail.err_est + err, evals};
    }

    // Rank-1 lattice (Kronecker, R_d sequence) with a random-free shift of 1/2.
    const int dim = n;
    double phi = 2.0;
    for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
    std::vector<double> gen(dim);
    for (int j = 0; j < dim; ++j) gen[j] = std::fmod(std::pow(1.0 / phi, j + 1), 1.0);
    const double sw = std::hypot(y1, y[1]) + sigma_tilde[0];
    auto estimate = [&](long npts) {
        double acc = 0.0;
        for (long k = 0; k < npts; ++k) {
            double jac = 1.0;
            double u0 = std::fmod(0.5 + gen[0] * double(k + 1), 1.0);
            double w = sw * std::tan(0.5 * sf::pi * u0);
            double c0 = std::cos(0.5 * sf::pi * u0);
            jac *= sw * 0.5 * sf::pi / (c0 * c0);
            for (int j = 1; j < dim; ++j) {
                double u = std::fmod(0.5 + gen[j] * double(k + 1), 1.0);
                double centre = 0.5 * (y[j + 1] + sigma_tilde[j]);
                double sc = sw + 0.5 * std::fabs(y[j + 1] - sigma_tilde[j]);
                double cj = std::cos(sf::pi * (u - 0.5));
                zt[j] = centre + sc * std::tan(sf::pi * (u - 0.5));
                jac *= sc * sf::pi / (cj * cj);
            }
            if (!std::isfinite(jac) || !std::isfinite(w)) continue;
            acc += integrand(w) * jac;
        }
        return acc / double(npts);
    };
    long npts = 1L << opt.qmc_log2_points;
    double full = estimate(npts), half = estimate(npts / 2);
    return {full + direct, std::fabs(full - half), npts + npts / 2};
}

inline double halfspace_laplace_kernel(double alpha, int n, double lambda, const std::vector<double>& y,
                                       const std::vector<double>& sigma_tilde, const quad::QuadSpec& q = {},
                                       CompositionOptions opt = {}) {
    return halfspace_laplace_kernel_q(alpha, n, lambda, y, sigma_tilde, q, opt).value;
}

namespace detail {

// interval exit density at r = 1 + u, u > 0, written in u to keep digits near r = 1
inline double interval_density_u(double alpha, double z2, double u) {
    double q = (1.0 - z2) * (1.0 + z2) / (u * (2.0 + u));
    return std::sin(sf::pi * alpha / 2.0) / sf::pi * std::pow(q, 0.5 * alpha) / (1.0 + u - z2);
}

} // namespace detail

// Exit density on {|r| > 1} for the strip {|y2| < 1} from (0, z2), lambda = 0:
//   (sin(pi a/2)/pi) ((1 - z2^2)/(r^2 - 1))^{a/2} / |r - z2|
// The r < -1 branch follows from the reflection z2 -> -z2, r -> -r.
inline double interval_poisson(double alpha, double z2, double r) {
    detail::require_alpha(alpha);
    if (!(std::fabs(z2) < 1.0) || !(std::fabs(r) > 1.0)) throw DomainError("interval_poisson: needs |z2| < 1 < |r|");
    if (r < 0.0) {
        r = -r;
        z2 = -z2;
    }
    return detail::interval_density_u(alpha, z2, r - 1.0);
}

// Probability of the interval exit landing in (lo, hi), 1 <= lo < hi <= inf or
// the mirror image; integrable endpoint singularity at |r| = 1.
inline double interval_poisson_mass(double alpha, double z2, double lo, double hi, const quad::QuadSpec& q = {}) {
    detail::require_alpha(alpha);
    if (!(std::fabs(z2) < 1.0)) throw DomainError("interval_poisson_mass: needs |z2| < 1");
    if (hi <= -1.0) return interval_poisson_mass(alpha, -z2, -hi, -lo, q);
    if (!(lo >= 1.0) || !(hi > lo)) throw DomainError("interval_poisson_mass: needs 1 <= lo < hi");
    auto f = [&](double u) { return detail::interval_density_u(alpha, z2, u); };
    if (std::isinf(hi)) return quad::integrate_exp_sinh([&](double w) { return f(lo - 1.0 + w); }, q).value;
    return quad::integrate_tanh_sinh_ends([&](double da, double) { return f(lo - 1.0 + da); }, 0.0, hi - lo, q).value;
}

namespace detail {

struct ThetaExponent {
    bool complex;
    double re; // A for the real branch, 1/2 otherwise
    double im; // q with A = 1/2 + i q
};

inline ThetaExponent theta_exponent(double alpha, double theta) {
    double disc = (1.0 - alpha) * (1.0 - alpha) - 8.0 * theta;
    if (disc >= 0.0) return {false, 0.5 + 0.5 * std::sqrt(disc), 0.0};
    return {true, 0.5, 0.5 * std::sqrt(-disc)};
}

} // namespace detail

// m_theta(x) for the Legendre-type equation
//   (1 - x^2) y'' - (2 - a) x y' - 2 theta y = 0,  y(-1) = 0, y(1) = 1:
//   ((1+x)/2)^{a/2} Gamma(a/2 + A) Gamma(1 + a/2 - A) / (Gamma(a/2) Gamma(1 + a/2))
//   * 2F1(A, 1 - A; 1 + a/2; (1+x)/2),   A = 1/2 + sqrt((1-a)^2 - 8 theta)/2.
// For 8 theta > (1-a)^2 the pair (A, 1-A) is complex conjugate and the value is real.
inline double m_theta(double alpha, double theta, double x) {
    detail::require_alpha(alpha);
    if (!(x >= -1.0 && x <= 1.0)) throw DomainError("m_theta: x must lie in [-1, 1]");
    auto ex = detail::theta_exponent(alpha, theta);
    const double a2 = 0.5 * alpha;
    double t = 0.5 * (1.0 + x);
    if (t == 0.0) return 0.0;
    double gprod, f;
    if (!ex.complex) {
        double A = ex.re;
        double g2 = 1.0 + a2 - A;
        if (g2 <= 0.0 && std::fabs(g2 - std::nearbyint(g2)) < 1e-12 * std::max(1.0, std::fabs(g2)))
            throw PoleError("m_theta: Gamma(1 + a/2 - A) has a pole at this theta");
        gprod = sf::gamma(a2 + A) * sf::gamma(g2);
        f = sf::hyp2f1(A, 1.0 - A, 1.0 + a2, t);
    } else {
        gprod = sf::abs_gamma_sq(a2 + 0.5, ex.im);
        f = sf::hyp2f1_conj(0.5, ex.im, 1.0 + a2, t);
    }
    return std::pow(t, a2) * gprod / (sf::gamma(a2) * sf::gamma(1.0 + a2)) * f;
}

// Coefficient a_n(r) of 1/(r - x) = sum a_n(r) C_n^{(rho)}(x), rho = (1+a)/2:
//   (2n + a + 1) 2^{a/2} Gamma((1+a)/2) / sqrt(pi) (r^2-1)^{a/4} Gamma(n+1)/Gamma(n+1+a) Q_{n+a/2}^{a/2}(r)
// Q is the real convention of legendre_q; the complex phase e^{-i a pi/2} of the
// textbook integral cancels against the phase carried by Q^{a/2} there.
inline double gegenbauer_coeff_a(double alpha, int n, double r) {
    detail::require_alpha(alpha);
    if (n < 0) throw DomainError("gegenbauer_coeff_a: n must be nonnegative");
    if (!(r > 1.0)) throw DomainError("gegenbauer_coeff_a: needs r > 1");
    double lc = std::log(2.0 * n + alpha + 1.0) + 0.5 * alpha * std::log(2.0) +
                sf::log_abs_gamma(0.5 * (1.0 + alpha)) - 0.5 * std::log(sf::pi) +
                0.25 * alpha * std::log((r - 1.0) * (r + 1.0)) + sf::log_abs_gamma(n + 1.0) -
                sf::log_abs_gamma(n + 1.0 + alpha);
    return std::exp(lc) * sf::legendre_q(n + 0.5 * alpha, 0.5 * alpha, r);
}

// Partial sum sum_{n<=N} a_n(r) C_n^{(rho)}(x).
inline double cauchy_gegenbauer_expansion(double alpha, double r, double x, int N) {
    if (!(std::fabs(x) <= 1.0)) throw DomainError("cauchy_gegenbauer_expansion: needs |x| <= 1");
    const double rho = 0.5 * (1.0 + alpha);
    double s = 0.0;
    for (int k = 0; k <= N; ++k) s += gegenbauer_coeff_a(alpha, k, r) * sf::gegenbauer_c(k, rho, x);
    return s;
}

// Boundary start (0, y2), y2 < 0, for the complement of the half-line
// {0} x {0} x (0, inf) in R^3, 1 < a < 2: the half-line kernel with index a - 1
// and Laplace parameter m^{1/a}, distance r - y2.
inline double halfline_complement_boundary(double alpha, double m, double y2, double r) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("halfline_complement_boundary: needs 1 < alpha < 2");
    if (!(m >= 0.0)) throw DomainError("halfline_complement_boundary: needs m >= 0");
    if (!(y2 < 0.0) || !(r > 0.0)) throw DomainError("halfline_complement_boundary: needs y2 < 0 < r");
    double a1 = alpha - 1.0;
    return std::sin(sf::pi * a1 / 2.0) / sf::pi * std::pow(-y2 / r, 0.5 * a1) *
           std::exp(-StabilityParams::lambda_for_mass(alpha, m) * (r - y2)) / (r - y2);
}

// General start (y1, y2), y1 != 0.
inline quad::QuadResult halfline_complement_kernel_q(double alpha, double m, double y1, double y2, double r,
                                                     const quad::QuadSpec& q = {}) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("halfline_complement_kernel: needs 1 < alpha < 2");
    if (!(m >= 0.0)) throw DomainError("halfline_complement_kernel: needs m >= 0");
    if (y1 == 0.0) {
        if (!(y2 < 0.0)) throw DomainError("halfline_complement_kernel: start lies on the removed set");
        return {halfline_complement_boundary(alpha, m, y2, r), 0.0, 1};
    }
    return halfline2d_laplace_kernel_q(alpha - 1.0, StabilityParams::lambda_for_mass(alpha, m), std::fabs(y1), y2,
                                       r, q);
}

inline double halfline_complement_kernel(double alpha, double m, double y1, double y2, double r,
                                         const quad::QuadSpec& q = {}) {
    return halfline_complement_kernel_q(alpha, m, y1, y2, r, q).value;
}

// Complement of {x1 = 0, x2 > 0} in R^n from y~ = (0, y2, ..., yn), y2 < 0, at
// sigma_bar = (sigma2, ..., sigman), sigma2 > 0:
//   m > 0: 2 sin(pi(a-1)/2) m^{(n-1)/(2a)} / (2^{(n-1)/2} pi^{(n+1)/2}) (-y2/sigma2)^{(a-1)/2}
//          K_{(n-1)/2}(m^{1/a} d) / d^{(n-1)/2}
//   m = 0: sin(pi(a-1)/2) Gamma((n-1)/2) / pi^{(n+1)/2} (-y2/sigma2)^{(a-1)/2} d^{1-n}
inline double halfline_complement_nd(double alpha, double m, int n, const std::vector<double>& y_tilde,
                                     const std::vector<double>& sigma_bar) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("halfline_complement_nd: needs 1 < alpha < 2");
    if (!(m >= 0.0)) throw DomainError("halfline_complement_nd: needs m >= 0");
    if (n < 2 || y_tilde.size() != std::size_t(n) || sigma_bar.size() != std::size_t(n) - 1)
        throw DomainError("halfline_complement_nd: needs n >= 2, n start and n-1 target coordinates");
    if (y_tilde[0] != 0.0 || !(y_tilde[1] < 0.0) || !(sigma_bar[0] > 0.0))
        throw DomainError("halfline_complement_nd: needs y1 = 0, y2 < 0 < sigma2");
    std::vector<double> yb(y_tilde.begin() + 1, y_tilde.end());
    double d = detail::dist(yb, sigma_bar);
    return detail::h_kernel(alpha - 1.0, n - 1, StabilityParams::lambda_for_mass(alpha, m), -yb[0] / sigma_bar[0], d);
}

// lambda^2/2-resolvent of the Bessel-Brownian diffusion in R^{n+1}, density in y
// with respect to m(dy1) dy~, m(dy1) = 2 y1^{1-a} dy1; x1 = 0 or y1 = 0:
//   (lambda/2)^{(n-a)/2} / (pi^{n/2} Gamma(1 - a/2)) K_{(n-a)/2}(lambda d) / d^{(n-a)/2}
inline double resolvent_U_lambda(double alpha, int n, double lambda, const std::vector<double>& x,
                                 const std::vector<double>& y) {
    detail::require_alpha(alpha);
    if (!(lambda > 0.0)) throw DomainError("resolvent_U_lambda: needs lambda > 0");
    if (n < 1 || x.size() != std::size_t(n) + 1 || y.size() != std::size_t(n) + 1)
        throw DomainError("resolvent_U_lambda: needs n+1 coordinates");
    if (x[0] != 0.0 && y[0] != 0.0) throw DomainError("resolvent_U_lambda: closed form needs x1 = 0 or y1 = 0");
    if (x[0] < 0.0 || y[0] < 0.0) throw DomainError("resolvent_U_lambda: first coordinates must be nonnegative");
    double nu = 0.5 * (n - alpha);
    double d = detail::dist(x, y);
    return std::pow(0.5, nu) / (std::pow(sf::pi, 0.5 * n) * sf::gamma(1.0 - 0.5 * alpha)) *
           detail::lk_ratio(nu, lambda, d);
}

enum class DensityConvention { speed_measure, lebesgue };

// a = 1 (reflected Brownian first coordinate), any x1, y1 >= 0:
//   (1/pi)(lambda/2pi)^{(n-1)/2} [K(lambda|x-y|)/|x-y|^{(n-1)/2} + K(lambda|x-y*|)/|x-y*|^{(n-1)/2}]
// with y* = (-y1, y~). As printed this is the density in dy1 (Lebesgue); the
// speed measure at a = 1 is 2 dy1, so the speed-measure density is half of it.
inline double resolvent_refbm(int n, double lambda, const std::vector<double>& x, const std::vector<double>& y,
                              DensityConvention conv = DensityConvention::speed_measure) {
    if (!(lambda > 0.0)) throw DomainError("resolvent_refbm: needs lambda > 0");
    if (n < 1 || x.size() != std::size_t(n) + 1 || y.size() != std::size_t(n) + 1)
        throw DomainError("resolvent_refbm: needs n+1 coordinates");
    if (x[0] < 0.0 || y[0] < 0.0) throw DomainError("resolvent_refbm: first coordinates must be nonnegative");
    std::vector<double> ys = y;
    ys[0] = -y[0];
    double nu = 0.5 * (n - 1);
    double c = 1.0 / sf::pi * std::pow(2.0 * sf::pi, -nu);
    double v = c * (detail::lk_ratio(nu, lambda, detail::dist(x, y)) + detail::lk_ratio(nu, lambda, detail::dist(x, ys)));
    return conv == DensityConvention::speed_measure ? 0.5 * v : v;
}

// U^m_m for the relativistic process in R^n:
//   2^{1-(n+a)/2} / (Gamma(a/2) pi^{n/2}) m^{(n-a)/(2a)} K_{(n-a)/2}(m^{1/a} d) / d^{(n-a)/2}
inline double resolvent_relativistic_d(double alpha, int n, double m, double d) {
    detail::require_alpha(alpha);
    if (!(m > 0.0)) throw DomainError("resolvent_relativistic: needs m > 0");
    if (n < 1) throw DomainError("resolvent_relativistic: needs n >= 1");
    double c = std::pow(2.0, 1.0 - 0.5 * (n + alpha)) / (sf::gamma(0.5 * alpha) * std::pow(sf::pi, 0.5 * n));
    return c * detail::lk_ratio(0.5 * (n - alpha), StabilityParams::lambda_for_mass(alpha, m), d);
}

inline double resolvent_relativistic(double alpha, int n, double m, const std::vector<double>& x,
                                     const std::vector<double>& y) {
    if (x.size() != std::size_t(n) || y.size() != std::size_t(n))
        throw DomainError("resolvent_relativistic: needs n coordinates");
    return resolvent_relativistic_d(alpha, n, m, detail::dist(x, y));
}

// c_a = Gamma(1 - a/2) 2^{1-a} / Gamma(a/2), so that U^m_m(x~, y~) = c_a U_{m^{1/a}}((0,x~), (0,y~)).
inline double resolvent_bridge_constant(double alpha) {
    detail::require_alpha(alpha);
    return sf::gamma(1.0 - 0.5 * alpha) * std::pow(2.0, 1.0 - alpha) / sf::gamma(0.5 * alpha);
}

struct SweepingResult {
    double swept;    // int_F U^m_m(z, y) P^m(x, dz)
    double direct;   // U^m_m(x, y)
    double residual; // swept - direct
    double err_est;
};

// Balance of the m-resolvent against the m-harmonic measure of {x1 < 0} in R^n
// (n = 1, 2), F = {z1 >= 0}; x1 < 0, y1 >= 0.
inline SweepingResult sweeping_check(double alpha, double m, int n, const std::vector<double>& x,
                                     const std::vector<double>& y, const quad::QuadSpec& q = {}) {
    detail::require_alpha(alpha);
    if (!(m > 0.0)) throw DomainError("sweeping_residual: needs m > 0");
    if (n != 1 && n != 2) throw DomainError("sweeping_residual: quadrature covers n = 1, 2");
    if (x.size() != std::size_t(n) || y.size() != std::size_t(n)) throw DomainError("sweeping_residual: needs n coordinates");
    if (!(x[0] < 0.0) || !(y[0] >= 0.0)) throw DomainError("sweeping_residual: needs x1 < 0 <= y1");
    const double lambda = StabilityParams::lambda_for_mass(alpha, m);
    const double direct = resolvent_relativistic(alpha, n, m, x, y);
    // same for the edge factor z1^{-a/2}
    auto pk = [&](double z1, double dxz) {
        return z1 < 1e-200 ? 0.0 : detail::h_kernel(alpha, n, lambda, -x[0] / z1, dxz);
    };
    // near the pole U ~ d^{a-n}: the part below 1e-150 is far beneath any tolerance,
    // while the separate factors there overflow
    auto uk = [&](double dzy) { return dzy < 1e-150 ? 0.0 : resolvent_relativistic_d(alpha, n, m, dzy); };
    double swept = 0.0, err = 0.0;
    if (n == 1) {
        const double x1 = x[0], y1 = y[0];
        auto right = quad::integrate_exp_sinh([&](double w) { return pk(y1 + w, y1 + w - x1) * uk(w); }, q);
        swept = right.value;
        err = right.err_est;
        if (y1 > 0.0) {
            auto left = quad::integrate_tanh_sinh_ends(
                [&](double da, double db) { return pk(da, da - x1) * uk(db); }, 0.0, y1, q);
            swept += left.value;
            err += left.err_est;
        }
    } else {
        quad::QuadSpec inner = q;
        inner.tol = 0.1 * q.tol;
        double ierr = 0.0;
        // polar coordinates around y: z = y + rho (cos phi, sin phi)
        auto radial = [&](double phi) {
            double c = std::cos(phi), s = std::sin(phi);
            auto f = [&](double rho, double z1) {
                double dx = std::hypot(y[0] + rho * c - x[0], y[1] + rho * s - x[1]);
                return rho * pk(z1, dx) * uk(rho);
            };
            if (c >= 0.0 || y[0] == 0.0) {
                auto r = quad::integrate_exp_sinh([&](double rho) { return f(rho, y[0] + rho * c); }, inner);
                ierr += r.err_est;
                return r.value;
            }
            double rmax = y[0] / -c;
            auto r = quad::integrate_tanh_sinh_ends([&](double da, double db) { return f(da, -c * db); }, 0.0, rmax,
                                                    inner);
            ierr += r.err_est;
            return r.value;
        };
        auto front = quad::integrate_tanh_sinh(radial, -0.5 * sf::pi, 0.5 * sf::pi, q);
        swept = front.value;
        err = front.err_est;
        if (y[0] > 0.0) {
            auto back = quad::integrate_tanh_sinh(radial, 0.5 * sf::pi, 1.5 * sf::pi, q);
            swept += back.value;
            err += back.err_est;
        }
        err += ierr * 1e-3;
    }
    return {swept, direct, swept - direct, err};
}

inline double sweeping_residual(double alpha, double m, int n, const std::vector<double>& x,
                                const std::vector<double>& y, const quad::QuadSpec& q = {}) {
    return sweeping_check(alpha, m, n, x, y, q).residual;
}

// Total mass of the half-space kernel from y (y1 < 0) over {sigma1 > 0}, n = 1, 2.
// m = 0 is the stable kernel.
inline double halfspace_kernel_mass(double alpha, double m, int n, const std::vector<double>& y,
                                    const quad::QuadSpec& q = {}) {
    detail::require_alpha(alpha);
    if (n != 1 && n != 2) throw DomainError("halfspace_kernel_mass: covers n = 1, 2");
    if (y.size() != std::size_t(n) || !(y[0] < 0.0)) throw DomainError("halfspace_kernel_mass: needs y1 < 0");
    auto kern = [&](const std::vector<double>& s) {
        return m > 0.0 ? halfspace_poisson_relativistic(alpha, m, n, y, s) : halfspace_poisson_stable(alpha, n, y, s);
    };
    if (n == 1) return quad::integrate_exp_sinh([&](double s1) { return kern({s1}); }, q).value;
    quad::QuadSpec inner = q;
    inner.tol = 0.1 * q.tol;
    // polar coordinates around y: sigma = y + rho (cos phi, sin phi), rho = rho0 (1 + u),
    // rho0 = -y1 / cos phi, so that sigma1 = -y1 u
    auto ray = [&](double phi) {
        double c = std::cos(phi), s = std::sin(phi);
        if (!(c > 0.0)) return 0.0;
        double rho0 = -y[0] / c;
        auto r = quad::integrate_exp_sinh(
            [&](double u) {
                if (u > 1e100) return 0.0; // tail mass below u^{-a/2} ~ 1e-50 a
                double rho = rho0 * (1.0 + u);
                return rho0 * rho * kern({-y[0] * u, y[1] + rho * s});
            },
            inner);
        return r.value;
    };
    return quad::integrate_tanh_sinh(ray, -0.5 * sf::pi, 0.5 * sf::pi, q).value;
}

struct StripFtResult {
    std::complex<double> lhs;
    double lhs_se;
    double rhs;
    double rhs_se;
    long paths;
};

// Both sides of the strip Fourier relation in R^3 for the sigma2-bin (lo, hi):
//   lhs = E^y[e^{-lambda^2 tau/2} e^{i (B3(tau) - y3) w}; B2(tau) in bin]
//   rhs = E^{(0,y2)}[e^{-lambda'^2 tau/2}; B2(tau) in bin],  lambda'^2 = |w|^2 + lambda^2,
// w = zbar - ybar, phases measured from ybar. The lhs uses the three-dimensional
// strip sampler, the rhs independent planar strip paths (stream 1).
inline StripFtResult strip_ft_check(double alpha, double lambda, double y2, double y3, double lo, double hi,
                                    double zbar, const SimConfig& cfg) {
    detail::require_alpha(alpha);
    detail::require_lambda(lambda);
    if (!(std::fabs(y2) < 1.0)) throw DomainError("strip_ft_check: needs |y2| < 1");
    if (!(hi > lo) || !(std::fabs(lo) >= 1.0 && std::fabs(hi) >= 1.0) || (lo < 0.0 && hi > 0.0))
        throw DomainError("strip_ft_check: bin must lie in |sigma2| >= 1");
    cfg.validate();
    const double w = zbar - y3;
    const double lam2 = w * w + lambda * lambda;
    struct Pair {
        double re, im, rhs;
    };
    auto draws = run_paths<Pair>(cfg.n_paths, cfg.seed, [&](long, Rng& rng) {
        HitSample s = sample_strip_hit_nd(alpha, {0.0, y2, y3}, cfg, rng);
        Pair p{0.0, 0.0, 0.0};
        double b2 = s.place[0];
        if (b2 > lo && b2 < hi) {
            double wt = std::exp(-0.5 * lambda * lambda * s.time_functional);
            double ph = (s.place[1] - y3) * w;
            p.re = wt * std::cos(ph);
            p.im = wt * std::sin(ph);
        }
        return p;
    });
    auto rhs_draws = run_paths<double>(cfg.n_paths, cfg.seed ^ 0x9e3779b97f4a7c15ULL, [&](long, Rng& rng) {
        HitSample s = sample_strip_hit(alpha, 0.0, y2, cfg, rng);
        double b2 = s.place[0];
        return (b2 > lo && b2 < hi) ? std::exp(-0.5 * lam2 * s.time_functional) : 0.0;
    });
    auto mean_se = [](const std::vector<double>& v) {
        double m = 0.0, m2 = 0.0;
        for (double x : v) m += x;
        m /= double(v.size());
        for (double x : v) m2 += (x - m) * (x - m);
        double se = v.size() > 1 ? std::sqrt(m2 / double(v.size() - 1) / double(v.size())) : INFINITY;
        return std::pair<double, double>(m, se);
    };
    std::vector<double> re(draws.size()), im(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) {
        re[i] = draws[i].re;
        im[i] = draws[i].im;
    }
    auto [mre, sre] = mean_se(re);
    auto [mim, sim] = mean_se(im);
    auto [mr, sr] = mean_se(rhs_draws);
    StripFtResult out{{mre, mim}, std::hypot(sre, sim), mr, sr, cfg.n_paths};
    if (!(std::abs(out.lhs) > 0.0) || out.lhs_se > 0.2 * std::abs(out.lhs) || !(mr > 0.0) || sr > 0.2 * mr)
        throw NumericalError("strip_ft_check: standard error exceeds 20% of the estimate, more samples needed");
    return out;
}

} // namespace hitkit
