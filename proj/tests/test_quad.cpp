#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "jcap/quad.hpp"
#include "jcap/specfun.hpp"

namespace q = jcap::quad;

TEST(IntegrateInterval, Constant) {
    const auto r = q::integrate_interval([](double) { return 1.0; }, -3.0, 3.0);
    EXPECT_NEAR(r.value, 6.0, 1e-14);
    EXPECT_LE(r.err_est, 1e-12);
}

TEST(IntegrateInterval, GaussianMass) {
    const auto r = q::integrate_interval(jcap::specfun::gauss_pdf, -8.0, 8.0);
    EXPECT_NEAR(r.value, 1.0 - 2.0 * jcap::specfun::gauss_q(8.0), 1e-12);
}

TEST(IntegrateInterval, EndpointSingularity) {
    const auto r = q::integrate_interval([](double t) { return 1.0 / std::sqrt(t); }, 0.0, 1.0);
    EXPECT_NEAR(r.value, 2.0, 1e-8);
}

TEST(IntegrateInterval, EmptyAndInvalid) {
    EXPECT_EQ(q::integrate_interval([](double) { return 1.0; }, 2.0, 2.0).value, 0.0);
    EXPECT_THROW(q::integrate_interval([](double) { return 1.0; }, 2.0, 1.0), jcap::DomainError);
    q::QuadRule bad;
    bad.abs_tol = 0.0;
    EXPECT_THROW(q::integrate_interval([](double) { return 1.0; }, 0.0, 1.0, bad), jcap::DomainError);
}

TEST(IntegrateInterval, ToleranceFailureCarriesEstimate) {
    q::QuadRule rule;
    rule.max_subdivisions = 10;
    rule.rel_tol = 1e-14;
    rule.abs_tol = 1e-16;
    try {
        q::integrate_interval([](double t) { return std::sin(1.0 / (t + 1e-3)); }, 0.0, 1.0, rule);
        FAIL() << "expected ToleranceError";
    } catch (const jcap::ToleranceError& e) {
        EXPECT_TRUE(std::isfinite(e.best_value()));
        EXPECT_GT(e.best_error(), 0.0);
    }
}

TEST(IntegrateInterval, NonFiniteIntegrandIsReported) {
    EXPECT_THROW(q::integrate_interval([](double t) { return t > 0.5 ? NAN : 1.0; }, 0.0, 1.0),
                 jcap::NumericalError);
}

TEST(IntegrateSemiInf, Exponentials) {
    EXPECT_NEAR(q::integrate_semiinf([](double t) { return std::exp(-t); }, 0.0).value, 1.0, 1e-10);
    EXPECT_NEAR(q::integrate_semiinf([](double t) { return t * std::exp(-t); }, 0.0).value, 1.0, 1e-10);
    const double e1 = q::integrate_semiinf([](double t) { return std::exp(-t) / t; }, 1.0).value;
    EXPECT_NEAR(e1 / jcap::specfun::exp_integral_e1(1.0), 1.0, 1e-10);
}

TEST(Integrate, DispatchOnKind) {
    q::QuadRule semi;
    semi.kind = q::QuadKind::TransformedSemiInfinite;
    EXPECT_NEAR(q::integrate([](double t) { return std::exp(-t); }, 0.0, INFINITY, semi).value, 1.0, 1e-10);
    EXPECT_THROW(q::integrate([](double t) { return t; }, 0.0, 1.0, semi), jcap::DomainError);
    EXPECT_NEAR(q::integrate([](double t) { return t; }, 0.0, 1.0).value, 0.5, 1e-14);
}

TEST(IntegrateInterval, LinearityAndAdditivity) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const q::QuadRule rule;
    for (int trial = 0; trial < 20; ++trial) {
        const double a1 = u(rng), a2 = u(rng), b1 = u(rng), b2 = u(rng);
        const double alpha = u(rng), beta = u(rng);
        auto f = [&](double x) { return std::sin(a1 * x + b1) * std::exp(-0.3 * x * x); };
        auto g = [&](double x) { return std::cos(a2 * x) + b2 * x * x; };
        auto h = [&](double x) { return alpha * f(x) + beta * g(x); };
        const double lo = -1.5, hi = 2.5, c = 0.3;
        const double i_f = q::integrate_interval(f, lo, hi).value;
        const double i_g = q::integrate_interval(g, lo, hi).value;
        const double i_h = q::integrate_interval(h, lo, hi).value;
        const double tol = [&](double v) { return 2.0 * std::max(rule.abs_tol, rule.rel_tol * std::abs(v)); }(i_h) +
                           2.0 * rule.rel_tol * (std::abs(alpha * i_f) + std::abs(beta * i_g));
        EXPECT_NEAR(i_h, alpha * i_f + beta * i_g, tol);
        const double split = q::integrate_interval(f, lo, c).value + q::integrate_interval(f, c, hi).value;
        EXPECT_NEAR(split, i_f, 2.0 * std::max(rule.abs_tol, rule.rel_tol * std::abs(i_f)) + 2e-12);
    }
}
