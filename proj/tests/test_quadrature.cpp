#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "hitkit/quadrature.hpp"

using namespace hitkit;
namespace bm = boost::math;
constexpr double pi = std::numbers::pi;

namespace {
double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }
} // namespace

TEST(SemiInfinite, Exponential) {
    auto r = quad::integrate_semi_infinite([](double s) { return std::exp(-s); }, 0.0);
    EXPECT_LT(std::fabs(r.value - 1.0), 1e-12);
    EXPECT_LE(r.err_est, 1e-8 * r.value);
}

TEST(SemiInfinite, GammaIntegral) {
    quad::QuadSpec q;
    q.tol = 1e-11;
    auto r = quad::integrate_semi_infinite([](double s) { return std::pow(s, 0.25) * std::exp(-2 * s); }, 0.0, q);
    EXPECT_LT(rel(r.value, bm::tgamma(1.25) / std::pow(2.0, 1.25)), 1e-10);
}

TEST(SemiInfinite, CoshSubstitutionMatchesDirectPanels) {
    quad::QuadSpec q;
    q.tol = 1e-12;
    auto direct = quad::integrate_semi_infinite(
        [](double s) { return std::exp(-s) * std::pow(s * s - 1, 0.25); }, 1.0, q);
    auto sub = quad::integrate_semi_infinite(
        [](double v) { return std::exp(-std::cosh(v)) * std::pow(std::sinh(v), 1.5); }, 0.0, q);
    EXPECT_LT(rel(direct.value, sub.value), 1e-9);
    // int_1^inf e^{-s} (s^2-1)^{nu-1/2} ds = Gamma(nu+1/2) 2^nu K_nu(1) / sqrt(pi), nu = 3/4
    double want = bm::tgamma(1.25) * std::pow(2.0, 0.75) * bm::cyl_bessel_k(0.75, 1.0) / std::sqrt(pi);
    EXPECT_LT(rel(sub.value, want), 1e-10);
}

TEST(SemiInfinite, NonDecayingTailReportsNonConvergence) {
    EXPECT_THROW(quad::integrate_semi_infinite([](double) { return 1.0; }, 0.0), NonConvergence);
}

TEST(FiniteSingular, Arcsine) {
    auto r = quad::integrate_finite_singular([](double x) { return 1.0 / std::sqrt(1 - x * x); }, -1.0, 1.0, -0.5, -0.5);
    EXPECT_LT(rel(r.value, pi), 1e-12);
}

TEST(FiniteSingular, Beta) {
    auto r = quad::integrate_finite_singular(
        [](double x) { return std::pow(x, -0.6) * std::pow(1 - x, -0.3); }, 0.0, 1.0, -0.6, -0.3);
    EXPECT_LT(rel(r.value, bm::beta(0.4, 0.7)), 1e-12);
}

TEST(FiniteSingular, ConstantIsJacobiMoment) {
    // int_a^b (x-a)^p (b-x)^q dx = (b-a)^{p+q+1} B(p+1, q+1)
    double a = -0.5, b = 2.0, p = -0.25, qq = 0.6;
    auto r = quad::integrate_finite_singular(
        [&](double x) { return std::pow(x - a, p) * std::pow(b - x, qq); }, a, b, p, qq);
    EXPECT_LT(rel(r.value, std::pow(b - a, p + qq + 1) * bm::beta(p + 1, qq + 1)), 1e-12);
}

TEST(FiniteSingular, Domain) {
    auto f = [](double) { return 1.0; };
    EXPECT_THROW(quad::integrate_finite_singular(f, 0.0, 1.0, -1.0, 0.0), DomainError);
    EXPECT_THROW(quad::integrate_finite_singular(f, 1.0, 0.0, 0.0, 0.0), DomainError);
}

TEST(Determinism, RepeatedCallsAreBitwiseEqual) {
    auto f = [](double x) { return std::exp(-x) * std::sin(3 * x) * std::sqrt(x); };
    auto a = quad::integrate(f, 0.0, 10.0);
    auto b = quad::integrate(f, 0.0, 10.0);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.err_est, b.err_est);
    EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(Gauss, JacobiRuleMoments) {
    // nodes and weights integrate polynomials of degree 2n-1 against (1-x)^a (1+x)^b
    double al = 0.3, be = -0.4;
    auto rule = quad::gauss_jacobi(12, al, be);
    for (int k = 0; k < 23; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * std::pow((1 + rule.x[i]) / 2, k);
        // int_{-1}^1 ((1+x)/2)^k (1-x)^a (1+x)^b dx = 2^{a+b+1} B(k+b+1, a+1)
        double want = std::pow(2.0, al + be + 1) * bm::beta(k + be + 1, al + 1);
        EXPECT_LT(rel(s, want), 1e-12) << k;
    }
}

TEST(Honesty, GoldenSuite) {
    struct Case {
        std::string name;
        std::function<quad::QuadResult()> run;
        double exact;
    };
    const double e = std::exp(1.0);
    std::vector<Case> cases = {
        {"poly", [] { return quad::integrate([](double x) { return x * x * x - x; }, 0.0, 2.0); }, 2.0},
        {"exp", [] { return quad::integrate([](double x) { return std::exp(x); }, 0.0, 1.0); }, e - 1},
        {"sin", [] { return quad::integrate([](double x) { return std::sin(x); }, 0.0, pi); }, 2.0},
        {"runge", [] { return quad::integrate([](double x) { return 1 / (1 + 25 * x * x); }, -1.0, 1.0); },
         0.4 * std::atan(5.0)},
        {"sqrt", [] { return quad::integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0); }, 2.0 / 3},
        {"log", [] { return quad::integrate([](double x) { return std::log(x); }, 0.0, 1.0); }, -1.0},
        {"peak", [] { return quad::integrate([](double x) { return 1e-4 / ((x - 0.3) * (x - 0.3) + 1e-8); }, 0.0, 1.0); },
         1e-4 * 1e4 * (std::atan(0.7e4) + std::atan(0.3e4))},
        {"kink", [] { return quad::integrate([](double x) { return std::fabs(x - 1.0 / 3); }, 0.0, 1.0); },
         (1.0 / 9 + 4.0 / 9) / 2},
        {"oscill", [] { return quad::integrate([](double x) { return std::cos(20 * x); }, 0.0, 1.0); },
         std::sin(20.0) / 20},
        {"gauss_tail", [] { return quad::integrate_semi_infinite([](double x) { return std::exp(-x * x); }, 0.0); },
         std::sqrt(pi) / 2},
        {"gamma3", [] { return quad::integrate_semi_infinite([](double x) { return x * x * std::exp(-x); }, 0.0); },
         2.0},
        {"lorentz", [] { return quad::integrate_mapped([](double x) { return 1 / (1 + x * x); }, 0.0); }, pi / 2},
        {"alg_tail", [] { return quad::integrate_mapped([](double x) { return std::pow(1 + x, -2.5); }, 0.0); },
         1 / 1.5},
        {"es_gamma", [] { return quad::integrate_exp_sinh([](double x) { return std::pow(x, -0.5) * std::exp(-x); }); },
         std::sqrt(pi)},
        {"es_alg", [] { return quad::integrate_exp_sinh([](double x) { return 1 / ((1 + x) * std::sqrt(x)); }); },
         pi},
        {"ts_log", [] { return quad::integrate_tanh_sinh([](double x) { return std::log(x) * std::log(1 - x); }, 0.0, 1.0); },
         2 - pi * pi / 6},
        {"ts_arcsine", [] { return quad::integrate_tanh_sinh([](double x) { return 1 / std::sqrt(1 - x * x); }, 0.0, 1.0); },
         pi / 2},
        {"fs_weight", [] {
             return quad::integrate_finite_singular(
                 [](double x) { return std::cos(x) * std::pow(1 - x * x, -0.25); }, -1.0, 1.0, -0.25, -0.25);
         },
         // Poisson integral for J_{1/4}
         std::sqrt(pi) * bm::tgamma(0.75) * std::pow(2.0, 0.25) * bm::cyl_bessel_j(0.25, 1.0)},
        {"fs_beta", [] {
             return quad::integrate_finite_singular(
                 [](double x) { return std::pow(x, 0.7) * std::pow(2 - x, -0.8); }, 0.0, 2.0, 0.7, -0.8);
         },
         std::pow(2.0, 0.9) * bm::beta(1.7, 0.2)},
        {"line", [] { return quad::integrate_real_line([](double x) { return std::exp(-std::fabs(x - 1)); }, 1.0); },
         2.0},
    };
    ASSERT_EQ(cases.size(), 20u);
    const double floor = 4 * std::numeric_limits<double>::epsilon();
    for (auto& c : cases) {
        auto r = c.run();
        double err = std::fabs(r.value - c.exact);
        EXPECT_LE(err, 3 * r.err_est + floor * std::fabs(c.exact)) << c.name << " err " << err << " est " << r.err_est;
        EXPECT_LT(err, 1e-7 * std::fabs(c.exact)) << c.name;
    }
}
