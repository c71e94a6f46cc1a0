#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hitkit/bessel_core.hpp"
#include "hitkit/diffusion_sim.hpp"
#include "hitkit/quadrature.hpp"

using namespace hitkit;
namespace bm = boost::math;
constexpr double pi = std::numbers::pi;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

quad::QuadSpec tight(double tol = 1e-11) {
    quad::QuadSpec q;
    q.tol = tol;
    return q;
}

double density_mass(const BesselLaw& law, double t, double x) {
    return quad::integrate_exp_sinh([&](double y) { return besq_transition_density(law, t, x, y); }, tight()).value;
}

} // namespace

TEST(Law, Parametrisations) {
    EXPECT_DOUBLE_EQ(BesselLaw::from_alpha(1.0).nu, -0.5);
    EXPECT_DOUBLE_EQ(BesselLaw::from_dimension(1.0).nu, -0.5);
    EXPECT_DOUBLE_EQ(BesselLaw::from_alpha(1.5).delta(), 0.5);
    EXPECT_TRUE(BesselLaw::from_alpha(0.5).is_reflecting_regime());
    EXPECT_FALSE(BesselLaw::from_index(0.3).is_reflecting_regime());
    EXPECT_THROW(besq_transition_density(BesselLaw::from_index(-1.0), 1, 1, 1), DomainError);
}

TEST(Transition, Normalisation) {
    EXPECT_LT(std::fabs(density_mass(BesselLaw::from_index(-0.5), 1.0, 0.0) - 1.0), 1e-9);
    for (double nu : {-0.75, -0.25, 0.5})
        for (double x : {0.3, 2.0}) EXPECT_LT(std::fabs(density_mass(BesselLaw::from_index(nu), 0.7, x) - 1.0), 1e-9);
}

TEST(Transition, StartAtZeroValue) {
    // reflected Brownian motion squared: Y = B^2, B ~ N(0, 1)
    double want = std::pow(2.0, -0.5) / std::tgamma(0.5) * std::exp(-0.5);
    EXPECT_LT(rel(besq_transition_density(BesselLaw::from_index(-0.5), 1, 0, 1), want), 1e-14);
    EXPECT_NEAR(want, 0.24197072451914337, 1e-15);
}

TEST(Transition, Scaling) {
    // c^{-1} X(ct) started at x/c has the law of X: p_{ct}(cx, cy) c = p_t(x, y)
    auto law = BesselLaw::from_index(-0.3);
    double c = 2.0, t = 1, x = 1, y = 1;
    EXPECT_LT(rel(c * besq_transition_density(law, c * t, c * x, c * y), besq_transition_density(law, t, x, y)), 1e-13);
}

TEST(Transition, ChapmanKolmogorov) {
    auto law = BesselLaw::from_index(-0.5);
    auto r = quad::integrate_exp_sinh(
        [&](double z) { return besq_transition_density(law, 0.5, 1.0, z) * besq_transition_density(law, 0.5, z, 2.0); },
        tight());
    EXPECT_LT(rel(r.value, besq_transition_density(law, 1.0, 1.0, 2.0)), 1e-6);
}

TEST(Sampler, MeansMatchDrift) {
    auto check = [](double nu, double t, double x, std::uint64_t seed) {
        auto law = BesselLaw::from_index(nu);
        auto rng = Rng::for_path(seed, 0);
        const int n = 1000000;
        double s = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
            double v = besq_sample_transition(law, t, x, rng);
            s += v;
            s2 += v * v;
        }
        double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
        EXPECT_LT(std::fabs(mean - (x + law.delta() * t)), 3 * se) << nu << " " << x;
    };
    check(-0.5, 1.0, 0.0, 1);
    check(-0.25, 0.5, 4.0, 2);
}

TEST(Sampler, ChiSquaredAgainstDensity) {
    struct Point {
        double nu, t, x;
    };
    const int n = 1000000, bins = 40;
    std::uint64_t seed = 10;
    for (Point p : {Point{-0.5, 1.0, 0.0}, Point{-0.25, 0.5, 4.0}, Point{-0.75, 2.0, 1.0}, Point{0.5, 1.0, 3.0}}) {
        auto law = BesselLaw::from_index(p.nu);
        // bins of equal expected mass, located on the exact CDF
        auto cdf = [&](double y) {
            return quad::integrate_tanh_sinh([&](double u) { return besq_transition_density(law, p.t, p.x, u); }, 0.0, y,
                                             tight(1e-10))
                .value;
        };
        std::vector<double> edges{0.0};
        double hi = 1.0;
        for (int k = 1; k < bins; ++k) {
            double target = double(k) / bins, lo = edges.back();
            while (cdf(hi) < target) hi *= 2;
            double a = lo, b = hi;
            for (int it = 0; it < 60; ++it) {
                double m = 0.5 * (a + b);
                (cdf(m) < target ? a : b) = m;
            }
            edges.push_back(0.5 * (a + b));
        }
        std::vector<long> counts(bins, 0);
        auto rng = Rng::for_path(seed++, 0);
        for (int i = 0; i < n; ++i) {
            double v = besq_sample_transition(law, p.t, p.x, rng);
            counts[std::upper_bound(edges.begin(), edges.end(), v) - edges.begin() - 1]++;
        }
        double chi2 = 0, e = double(n) / bins;
        for (long c : counts) chi2 += (c - e) * (c - e) / e;
        double crit = bm::quantile(bm::complement(bm::chi_squared(bins - 1), 0.01));
        EXPECT_LT(chi2, crit) << p.nu << " " << p.t << " " << p.x;
    }
}

TEST(HitZero, DensityNormalisesAndMatchesLevy) {
    for (double a : {0.5, 1.0, 1.5}) {
        auto r = quad::integrate_exp_sinh([&](double t) { return bes_hit_zero_density(a, 1.0, t); }, tight());
        EXPECT_LT(std::fabs(r.value - 1.0), 1e-9) << a;
    }
    for (double t : {0.1, 1.0, 5.0})
        EXPECT_LT(rel(bes_hit_zero_density(1.0, 1.0, t), std::pow(2 * pi, -0.5) * std::pow(t, -1.5) * std::exp(-0.5 / t)),
                  1e-14);
}

TEST(HitZero, KolmogorovSmirnov) {
    const int n = 100000;
    auto rng = Rng::for_path(20, 0);
    std::vector<double> v(n);
    for (auto& x : v) x = bes_hit_zero_sample(1.0, 1.0, rng);
    std::sort(v.begin(), v.end());
    double d = 0;
    for (int i = 0; i < n; ++i) {
        // P(T <= t) = P(G >= 1/(2t)), G ~ Gamma(1/2)
        double F = bm::gamma_q(0.5, 0.5 / v[i]);
        d = std::max({d, std::fabs(F - double(i) / n), std::fabs(F - double(i + 1) / n)});
    }
    EXPECT_LT(d, 0.006);
}

TEST(HitZero, QuantileScaling) {
    const int n = 100000;
    auto r1 = Rng::for_path(21, 0), r2 = Rng::for_path(22, 0);
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
        a[i] = bes_hit_zero_sample(0.8, 1.0, r1);
        b[i] = bes_hit_zero_sample(0.8, 2.0, r2);
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (double p : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        double qa = a[std::size_t(p * n)], qb = b[std::size_t(p * n)];
        // standard error of a sample quantile, for the relative difference of two
        double se = std::sqrt(2 * p * (1 - p) / n) / (bes_hit_zero_density(0.8, 1.0, qa) * qa);
        EXPECT_LT(std::fabs(qb / (4 * qa) - 1), 4 * se) << p;
    }
}

TEST(Bridge, ZeroLambdaContinuity) {
    auto law = BesselLaw::from_index(-0.5);
    double q = besq_transition_density(law, 1, 1, 1);
    EXPECT_EQ(besq_bridge_laplace_density(law, 0.0, 1, 1, 1), q);
    EXPECT_LT(rel(besq_bridge_laplace_density(law, 1e-6, 1, 1, 1), q), 1e-8);
    EXPECT_LT(rel(besq_bridge_laplace_density(law, 1e-6, 1, 0, 1), besq_transition_density(law, 1, 0, 1)), 1e-8);
}

TEST(Bridge, WeightLowersDensity) {
    auto law = BesselLaw::from_index(-0.3);
    for (double x : {0.0, 0.5, 2.0})
        for (double r : {0.1, 1.0, 4.0})
            EXPECT_LT(besq_bridge_laplace_density(law, 1.0, 1.0, x, r), besq_bridge_laplace_density(law, 0.0, 1.0, x, r));
}

TEST(Bridge, StartAtZeroTotalMass) {
    auto law = BesselLaw::from_index(-0.5);
    auto r = quad::integrate_exp_sinh([&](double y) { return besq_bridge_laplace_density(law, 1.0, 1.0, 0.0, y); }, tight());
    EXPECT_LT(rel(r.value, std::pow(std::cosh(1.0), -0.5)), 1e-9);
}

TEST(Bridge, PositiveStartTotalMass) {
    // E^x[exp(-l^2/2 int_0^t X)] = cosh(lt)^{-(nu+1)} exp(-x l tanh(lt) / 2)
    auto law = BesselLaw::from_index(-0.25);
    double l = 0.8, t = 1.3, x = 1.7;
    auto r = quad::integrate_exp_sinh([&](double y) { return besq_bridge_laplace_density(law, l, t, x, y); }, tight());
    double want = std::pow(std::cosh(l * t), -0.75) * std::exp(-0.5 * x * l * std::tanh(l * t));
    EXPECT_LT(rel(r.value, want), 1e-9);
}

TEST(HitLaplace, Limits) {
    auto law = BesselLaw::from_alpha(1.0);
    EXPECT_LT(std::fabs(besq_hit_laplace(law, 0.0, 1e-8, 1.0) - 1.0), 1e-3);
    EXPECT_EQ(besq_hit_laplace_level(law, 0.4, 1.0, 2.0, 2.0), 1.0);
    double v = besq_hit_laplace(law, 0.5, 1.0, 1.0);
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_THROW(besq_hit_laplace(BesselLaw::from_index(0.2), 0, 1, 1), DomainError);
}

TEST(HitLaplace, LevelTendsToZeroLevel) {
    auto law = BesselLaw::from_alpha(1.2);
    double base = besq_hit_laplace(law, 0.3, 0.9, 1.5);
    EXPECT_LT(rel(besq_hit_laplace_level(law, 0.3, 0.9, 1.5, 1e-9), base), 1e-4);
}

TEST(HitTime, ZeroLambdaIsGetoorSharpe) {
    for (double a : {0.5, 1.0, 1.5})
        for (double t : {0.2, 1.0, 3.0}) {
            double x = 2.0;
            double want = bes_hit_zero_density(a, std::sqrt(x), t);
            EXPECT_LT(rel(besq_hit_time_density(a, 0.0, x, t), want), 1e-13);
            EXPECT_LT(rel(besq_hit_time_density(a, 1e-7, x, t), want), 1e-9);
        }
}

TEST(HitTime, LaplacePairGrid) {
    for (double a : {1.0, 1.5}) {
        auto law = BesselLaw::from_alpha(a);
        for (double g : {0.0, 0.5, 2.0})
            for (double l : {0.5, 1.0, 2.0}) {
                auto r = quad::integrate_exp_sinh(
                    [&](double t) { return besq_hit_time_density(a, l, 1.0, t) * std::exp(-g * t); }, tight());
                EXPECT_LT(rel(r.value, besq_hit_laplace(law, g, l, 1.0)), 1e-6) << a << " " << g << " " << l;
            }
    }
    auto r = quad::integrate_exp_sinh([&](double t) { return besq_hit_time_density(1.0, 1.0, 1.0, t); }, tight());
    EXPECT_LT(r.value, 1.0);
}

TEST(HitTime, WeightedHistogramByPathSimulation) {
    // X to tau_0 from x = 1: tau_0 = x/(2G); given tau_0 = T the path is
    // X(s) = (1 - s/T)^2 Z(sT/(T-s)), Z a BESQ of index alpha/2 from x.
    const double a = 1.0, l = 1.0, x = 1.0;
    const int K = 64;
    const long n = 400000;
    const int bins = 12;
    // bins of equal exact mass on [0.05, 3]
    auto mass = [&](double lo, double hi) {
        return quad::integrate([&](double t) { return besq_hit_time_density(a, l, x, t); }, lo, hi, tight(1e-10)).value;
    };
    const double total = mass(0.05, 3.0);
    std::vector<double> edges{0.05};
    for (int i = 1; i < bins; ++i) {
        double lo = edges.back(), hi = 3.0;
        for (int it = 0; it < 60; ++it) {
            double m = 0.5 * (lo + hi);
            (mass(0.05, m) < total * i / bins ? lo : hi) = m;
        }
        edges.push_back(0.5 * (lo + hi));
    }
    edges.push_back(3.0);
    struct Draw {
        double T, weight;
    };
    auto draws = run_paths<Draw>(n, 31, [&](long, Rng& rng) {
        const BesselLaw up = BesselLaw::from_index(0.5 * a);
        double T = x / (2.0 * rng.gamma(0.5 * a));
        double z = x, u_prev = 0, acc = 0, prev_s = 0, prev_v = x;
        for (int k = 1; k <= K; ++k) {
            double q = 1.0 - double(k) / K, s = T * (1 - q * q), v = 0.0;
            if (k < K) {
                double u = s * T / (T - s);
                z = besq_sample_transition(up, u - u_prev, z, rng);
                u_prev = u;
                v = (1 - s / T) * (1 - s / T) * z;
            } else {
                s = T;
            }
            acc += 0.5 * (v + prev_v) * (s - prev_s);
            prev_s = s;
            prev_v = v;
        }
        return Draw{T, std::exp(-0.5 * l * l * acc)};
    });
    std::vector<double> sum(bins, 0.0), sum2(bins, 0.0);
    for (auto& d : draws) {
        auto it = std::upper_bound(edges.begin(), edges.end(), d.T);
        if (it == edges.begin() || it == edges.end()) continue;
        int b = int(it - edges.begin()) - 1;
        sum[b] += d.weight;
        sum2[b] += d.weight * d.weight;
    }
    double sup = 0;
    for (int b = 0; b < bins; ++b) {
        double exact = mass(edges[b], edges[b + 1]);
        double mc = sum[b] / n;
        double se = std::sqrt(sum2[b] / n - mc * mc) / std::sqrt(double(n));
        EXPECT_LT(std::fabs(mc - exact), 4 * se + 0.01 * exact) << b;
        sup = std::max(sup, std::fabs(mc / exact - 1));
    }
    EXPECT_LT(sup, 0.03);
}

TEST(ScaleSpeed, Values) {
    EXPECT_DOUBLE_EQ(scale_density(1.0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(speed_density(1.0, 0.0), 2.0);
    for (double x : {0.3, 0.9, 1.5, 4.0}) {
        EXPECT_EQ(scale_density(0.6, x), scale_density(0.6, -x));
        EXPECT_GT(speed_density(1.4, x), 0.0);
    }
    EXPECT_THROW(scale_density(1.0, 1.0), DomainError);
}

TEST(ScaleSpeed, ScaleIntegrableAtTheEnd) {
    for (double a : {0.3, 1.0, 1.7}) {
        auto r = quad::integrate_finite_singular([&](double x) { return scale_density(a, x); }, 0.0, 0.999, 0.0, 0.0,
                                                 tight(1e-9));
        double upto_one = quad::integrate_finite_singular([&](double x) { return scale_density(a, x); }, 0.0, 1.0, 0.0,
                                                          0.5 * a - 1.0, tight(1e-11))
                              .value;
        // int_0^1 (1-x^2)^{a/2-1} dx = B(1/2, a/2)/2
        EXPECT_LT(rel(upto_one, 0.5 * bm::beta(0.5, 0.5 * a)), 1e-10) << a;
        EXPECT_TRUE(std::isfinite(r.value));
        EXPECT_LT(r.value, upto_one);
    }
}
