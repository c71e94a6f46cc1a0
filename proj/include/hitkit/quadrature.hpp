#pragma once

// Deterministic one-dimensional quadrature.
//   integrate               adaptive Gauss-Kronrod 15 on [a, b]
//   integrate_semi_infinite doubling panels on [a, inf) for decaying integrands
//   integrate_mapped        [a, inf) through x = a + s t/(1-t), for algebraic tails
//   integrate_tanh_sinh     endpoint singularities of unknown type
//   integrate_finite_singular  Gauss-Jacobi with known endpoint exponents

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "gamma.hpp"

namespace hitkit::quad {

struct QuadSpec {
    double tol = 1e-8;               // relative
    int max_subdivisions = 2000;
    double tail_cutoff_ratio = 1e-16; // of the running total
    double abs_tol = 0.0;            // optional absolute floor
};

struct QuadResult {
    double value = 0.0;
    double err_est = 0.0;
    long evaluations = 0;
};

namespace detail {

inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, err, absval;
};

template <class F>
Panel gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double rk = fc * wgk[7], rg = fc * wg[3], ra = std::fabs(fc) * wgk[7];
    for (int j = 0; j < 7; ++j) {
        double dx = h * xgk[j];
        double f1 = f(c - dx), f2 = f(c + dx);
        rk += wgk[j] * (f1 + f2);
        ra += wgk[j] * (std::fabs(f1) + std::fabs(f2));
        if (j % 2 == 1) rg += wg[j / 2] * (f1 + f2);
    }
    return {a, b, rk * h, std::fabs((rk - rg) * h), ra * std::fabs(h)};
}

inline bool heap_less(const Panel& x, const Panel& y) { return x.err < y.err; }

} // namespace detail

// Adaptive GK15 with dyadic bisection of the worst panel. Deterministic.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadSpec& spec = {}) {
    if (!(std::isfinite(a) && std::isfinite(b))) throw DomainError("integrate: finite limits required");
    if (a == b) return {0.0, 0.0, 0};
    std::vector<detail::Panel> heap;
    heap.reserve(64);
    heap.push_back(detail::gk15(f, a, b));
    long evals = 15;
    double total = heap[0].value, err = heap[0].err, absval = heap[0].absval;
    const double eps = std::numeric_limits<double>::epsilon();
    int subdivisions = 0;
    double frozen_err = 0.0; // panels too small to split
    while (true) {
        double target = std::max({spec.tol * std::fabs(total), spec.abs_tol, 50.0 * eps * absval});
        if (err + frozen_err <= target || heap.empty()) break;
        if (subdivisions >= spec.max_subdivisions)
            throw NonConvergence("integrate: subdivision budget exhausted", total, err + frozen_err);
        std::pop_heap(heap.begin(), heap.end(), detail::heap_less);
        detail::Panel p = heap.back();
        heap.pop_back();
        double mid = 0.5 * (p.a + p.b);
        if (!(mid > std::min(p.a, p.b) && mid < std::max(p.a, p.b)) ||
            std::fabs(p.b - p.a) < 1e3 * eps * std::max(std::fabs(p.a), std::fabs(p.b))) {
            frozen_err += p.err;
            err -= p.err;
            continue;
        }
        detail::Panel l = detail::gk15(f, p.a, mid), r = detail::gk15(f, mid, p.b);
        evals += 30;
        ++subdivisions;
        total += l.value + r.value - p.value;
        err += l.err + r.err - p.err;
        absval += l.absval + r.absval - p.absval;
        heap.push_back(l);
        std::push_heap(heap.begin(), heap.end(), detail::heap_less);
        heap.push_back(r);
        std::push_heap(heap.begin(), heap.end(), detail::heap_less);
        if (subdivisions % 64 == 0) { // resum to shed accumulated rounding
            total = 0.0;
            err = 0.0;
            absval = 0.0;
            for (auto& q : heap) {
                total += q.value;
                err += q.err;
                absval += q.absval;
            }
        }
    }
    return {total, err + frozen_err, evals};
}

// Panels [a, a+L], [a+L, a+3L], ... of doubling width until the latest panel is
// below tail_cutoff_ratio of the running total.
template <class F>
QuadResult integrate_semi_infinite(F&& f, double a, const QuadSpec& spec = {}, double scale = 1.0) {
    if (!(scale > 0)) throw DomainError("integrate_semi_infinite: scale must be positive");
    QuadResult out;
    double lo = a, width = scale;
    int quiet = 0;
    for (int k = 0; k < 200; ++k) {
        double hi = lo + width;
        QuadSpec ps = spec;
        ps.abs_tol = std::max(spec.abs_tol, 0.1 * spec.tol * std::fabs(out.value));
        QuadResult p = integrate(f, lo, hi, ps);
        out.value += p.value;
        out.err_est += p.err_est;
        out.evaluations += p.evaluations;
        double mag = std::fabs(p.value);
        if (k >= 1 && mag <= spec.tail_cutoff_ratio * std::fabs(out.value)) {
            out.err_est += mag;
            return out;
        }
        if (mag == 0.0 && out.value == 0.0 && ++quiet >= 8) return out;
        lo = hi;
        width *= 2.0;
        if (!std::isfinite(lo)) break;
    }
    throw NonConvergence("integrate_semi_infinite: tail did not decay", out.value, out.err_est);
}

// [a, inf) through x = a + scale * t / (1 - t). Suited to algebraic tails.
template <class F>
QuadResult integrate_mapped(F&& f, double a, const QuadSpec& spec = {}, double scale = 1.0) {
    auto g = [&](double t) {
        double u = 1.0 - t;
        if (u <= 0.0) return 0.0;
        double x = a + scale * t / u;
        double v = f(x);
        return v == 0.0 ? 0.0 : v * scale / (u * u);
    };
    return integrate(g, 0.0, 1.0, spec);
}

// Whole line, split at c.
template <class F>
QuadResult integrate_real_line(F&& f, double c, const QuadSpec& spec = {}, double scale = 1.0) {
    QuadResult r = integrate_semi_infinite(f, c, spec, scale);
    QuadResult l = integrate_semi_infinite([&](double s) { return f(2.0 * c - s); }, c, spec, scale);
    return {r.value + l.value, r.err_est + l.err_est, r.evaluations + l.evaluations};
}

// Double-exponential rule on [a, b]. f is evaluated at a + d and b - d with d
// computed directly, so a singular endpoint at a = 0 is resolved to tiny d.
template <class F>
QuadResult integrate_tanh_sinh(F&& f, double a, double b, const QuadSpec& spec = {}) {
    if (a == b) return {0.0, 0.0, 0};
    const double half = 0.5 * (b - a);
    const double tmax = 6.5;
    long evals = 0;
    auto node = [&](double t, double& wsum) {
        // x - a = 2 half / (1 + exp(-pi sinh t)), weight dx/dt
        double s = 0.5 * sf::pi * std::sinh(t);
        double ch = std::cosh(s);
        double w = half * 0.5 * sf::pi * std::cosh(t) / (ch * ch);
        double d = 2.0 * half / (1.0 + std::exp(2.0 * std::fabs(s))); // distance to the near end
        if (!(std::fabs(d) > 0.0) || w == 0.0) return;
        double x = t < 0 ? a + d : b - d;
        if (x == (t < 0 ? a : b) && t > 0) return; // lost to rounding at b
        double v = f(x);
        ++evals;
        if (!std::isfinite(v)) {
            if (std::fabs(d) < 1e-200) return;
            throw NumericalError("integrate_tanh_sinh: non-finite integrand");
        }
        wsum += w * v;
    };
    double h = 1.0;
    double sum = 0.0;
    node(0.0, sum);
    for (double t = h; t <= tmax; t += h) {
        node(t, sum);
        node(-t, sum);
    }
    double prev = sum * h;
    for (int level = 1; level <= 10; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (double t = h; t <= tmax; t += 2.0 * h) {
            node(t, add);
            node(-t, add);
        }
        sum += add;
        double cur = sum * h;
        double diff = std::fabs(cur - prev);
        if (level >= 3 && (diff <= spec.tol * std::fabs(cur) || diff <= spec.abs_tol))
            return {cur, diff, evals};
        prev = cur;
    }
    throw NonConvergence("integrate_tanh_sinh: no convergence", prev, NAN);
}

// Double-exponential rule on [a, b] for integrands written in terms of the
// distances to both ends: g(da, db) with da + db = b - a. Singular endpoints
// away from the origin keep full relative resolution this way.
template <class G>
QuadResult integrate_tanh_sinh_ends(G&& g, double a, double b, const QuadSpec& spec = {}) {
    if (!(b > a)) throw DomainError("integrate_tanh_sinh_ends: need a < b");
    const double len = b - a;
    const double tmax = 6.5;
    long evals = 0;
    auto node = [&](double t, double& wsum) {
        double s = 0.5 * sf::pi * std::sinh(t);
        double ch = std::cosh(s);
        double w = 0.5 * len * 0.5 * sf::pi * std::cosh(t) / (ch * ch);
        double d = len / (1.0 + std::exp(2.0 * std::fabs(s)));
        if (!(d > 0.0) || w == 0.0) return;
        double v = t < 0 ? g(d, len - d) : g(len - d, d);
        ++evals;
        if (!std::isfinite(v)) throw NumericalError("integrate_tanh_sinh_ends: non-finite integrand");
        wsum += w * v;
    };
    double h = 1.0, sum = 0.0;
    node(0.0, sum);
    for (double t = h; t <= tmax; t += h) {
        node(t, sum);
        node(-t, sum);
    }
    double prev = sum * h;
    for (int level = 1; level <= 10; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (double t = h; t <= tmax; t += 2.0 * h) {
            node(t, add);
            node(-t, add);
        }
        sum += add;
        double cur = sum * h;
        double diff = std::fabs(cur - prev);
        if (level >= 3 && (diff <= spec.tol * std::fabs(cur) || diff <= spec.abs_tol))
            return {cur, diff, evals};
        prev = cur;
    }
    throw NonConvergence("integrate_tanh_sinh_ends: no convergence", prev, NAN);
}

// Exp-sinh rule for int_0^inf g(x) dx, x = exp(pi/2 sinh t). Handles an
// integrable singularity at 0 and algebraic decay at infinity.
template <class G>
QuadResult integrate_exp_sinh(G&& g, const QuadSpec& spec = {}) {
    const double tmax = 6.8;
    long evals = 0;
    auto node = [&](double t, double& wsum) {
        double s = 0.5 * sf::pi * std::sinh(t);
        if (s > 700.0 || s < -700.0) return;
        double x = std::exp(s);
        double w = x * 0.5 * sf::pi * std::cosh(t);
        double v = g(x);
        ++evals;
        if (!std::isfinite(v)) throw NumericalError("integrate_exp_sinh: non-finite integrand");
        wsum += w * v;
    };
    double h = 0.5, sum = 0.0;
    node(0.0, sum);
    for (double t = h; t <= tmax; t += h) {
        node(t, sum);
        node(-t, sum);
    }
    double prev = sum * h;
    for (int level = 1; level <= 10; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (double t = h; t <= tmax; t += 2.0 * h) {
            node(t, add);
            node(-t, add);
        }
        sum += add;
        double cur = sum * h;
        double diff = std::fabs(cur - prev);
        if (level >= 3 && (diff <= spec.tol * std::fabs(cur) || diff <= spec.abs_tol))
            return {cur, diff, evals};
        prev = cur;
    }
    throw NonConvergence("integrate_exp_sinh: no convergence", prev, NAN);
}

// Gauss-Jacobi nodes and weights on [-1, 1] for (1-x)^alpha (1+x)^beta.
struct JacobiRule {
    std::vector<double> x, w;
};

inline JacobiRule gauss_jacobi(int n, double alpha, double beta) {
    if (n < 1 || !(alpha > -1.0) || !(beta > -1.0)) throw DomainError("gauss_jacobi: bad parameters");
    static std::mutex mu;
    static std::map<std::tuple<int, double, double>, JacobiRule> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find({n, alpha, beta});
        if (it != cache.end()) return it->second;
    }
    const double ab = alpha + beta;
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
    for (int k = 0; k < n; ++k) {
        double s = 2.0 * k + ab;
        diag(k) = (k == 0) ? (beta - alpha) / (ab + 2.0)
                           : (beta * beta - alpha * alpha) / (s * (s + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        double s = 2.0 * k + ab;
        double b2;
        if (k == 1)
            b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        else
            b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
        sub(k - 1) = std::sqrt(b2);
    }
    JacobiRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + sf::log_abs_gamma(alpha + 1.0) +
                                sf::log_abs_gamma(beta + 1.0) - sf::log_abs_gamma(ab + 2.0));
    if (n == 1) {
        rule.x[0] = diag(0);
        rule.w[0] = mu0;
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
        for (int i = 0; i < n; ++i) {
            rule.x[i] = es.eigenvalues()(i);
            double v = es.eigenvectors()(0, i);
            rule.w[i] = mu0 * v * v;
        }
    }
    std::lock_guard<std::mutex> lock(mu);
    if (cache.size() > 256) cache.clear();
    cache.emplace(std::make_tuple(n, alpha, beta), rule);
    return rule;
}

// Integral of f over [a, b] where f(x) ~ (x-a)^p near a and ~ (b-x)^q near b.
// f is the full integrand; the Jacobi weight is divided out at the nodes.
// Node count doubles from 8 until two successive rules agree.
template <class F>
QuadResult integrate_finite_singular(F&& f, double a, double b, double p, double q,
                                     const QuadSpec& spec = {}) {
    if (!(b > a)) throw DomainError("integrate_finite_singular: need a < b");
    if (!(p > -1.0) || !(q > -1.0)) throw DomainError("integrate_finite_singular: exponents must exceed -1");
    const double h = 0.5 * (b - a);
    long evals = 0;
    double absval = 0.0;
    auto rule_sum = [&](int n) {
        JacobiRule r = gauss_jacobi(n, q, p);
        double s = 0.0, sa = 0.0;
        for (int i = 0; i < n; ++i) {
            double dl = h * (1.0 + r.x[i]), dr = h * (1.0 - r.x[i]);
            double x = a + dl;
            double wt = std::pow(dl, p) * std::pow(dr, q);
            double t = r.w[i] * f(x) / wt;
            s += t;
            sa += std::fabs(t);
        }
        evals += n;
        double scale = std::pow(h, p + q + 1.0);
        absval = sa * scale;
        return s * scale;
    };
    double prev = rule_sum(8);
    for (int n = 16; n <= 1024; n *= 2) {
        double cur = rule_sum(n);
        double diff = std::fabs(cur - prev);
        double floor = 1e2 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(cur), absval);
        if (diff <= std::max(spec.tol * std::fabs(cur), spec.abs_tol) || diff <= floor) return {cur, diff, evals};
        prev = cur;
    }
    throw NonConvergence("integrate_finite_singular: no convergence", prev, NAN);
}

} // namespace hitkit::quad
