#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "jcap/channels.hpp"
#include "jcap/quad.hpp"

using jcap::Channel;
namespace sf = jcap::specfun;

namespace {

/// Σ_y (∂θ p)²/p with central differences of the pmf.
double brute_force_discrete_fisher(const Channel& ch, double theta, double h = 1e-5) {
    const auto lo = ch.space().lo;
    const auto hi = ch.space().hi;
    const double tp = std::min(theta + h, hi);
    const double tm = std::max(theta - h, lo);
    const auto pp = ch.output_pmf(tp);
    const auto pm = ch.output_pmf(tm);
    const auto p0 = ch.output_pmf(theta);
    double j = 0.0;
    for (std::size_t y = 0; y < p0.size(); ++y) {
        if (p0[y] <= 0.0) continue;
        const double dp = (pp[y] - pm[y]) / (tp - tm);
        j += dp * dp / p0[y];
    }
    return j;
}

std::vector<double> theta_grid(const Channel& ch, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) {
        g.push_back(ch.space().lo + (ch.space().hi - ch.space().lo) * (i + 0.5) / n);
    }
    return g;
}

}  // namespace

TEST(Awgn, FisherIsExactlyOne) {
    const auto ch = Channel::awgn(2.0);
    for (double t : {0.0, 2.0, -1.0}) EXPECT_EQ(ch.fisher(t), 1.0);
    EXPECT_THROW(ch.fisher(2.5), jcap::DomainError);
    EXPECT_EQ(jcap::fisher_awgn(0.3), 1.0);
}

TEST(Awgn, NoiseVarianceScalesFisher) {
    EXPECT_DOUBLE_EQ(Channel::awgn(1.0, 3.0).fisher(0.2), 1.0 / 3.0);
}

TEST(Clipped, LargeClipRecoversAwgn) {
    EXPECT_NEAR(Channel::clipped_awgn(1.0, 10.0).fisher(0.0), 1.0, 1e-6);
}

TEST(Clipped, Symmetric) {
    const auto ch = Channel::clipped_awgn(1.0, 1.0);
    EXPECT_NEAR(ch.fisher(0.7), ch.fisher(-0.7), 1e-15);
}

TEST(Clipped, MatchesNumericalFisherOracle) {
    // Independent oracle: finite-difference score of the mixed density
    // (atoms at ±B, Gaussian in between) integrated against that density.
    const double B = 1.0;
    const double h = 1e-5;
    auto atom_hi = [B](double t) { return 0.5 * std::erfc((B - t) / std::sqrt(2.0)); };
    auto atom_lo = [B](double t) { return 0.5 * std::erfc((B + t) / std::sqrt(2.0)); };
    for (double theta : {0.0, 0.4, -0.9, 1.0}) {
        double j = 0.0;
        for (auto atom : {+1, -1}) {
            auto p = [&](double t) { return atom > 0 ? atom_hi(t) : atom_lo(t); };
            const double s = (std::log(p(theta + h)) - std::log(p(theta - h))) / (2 * h);
            j += p(theta) * s * s;
        }
        auto interior = [&](double y) {
            auto lp = [&](double t) { return -0.5 * (y - t) * (y - t); };
            const double s = (lp(theta + h) - lp(theta - h)) / (2 * h);
            return std::exp(-0.5 * (y - theta) * (y - theta)) / std::sqrt(2 * std::numbers::pi) * s * s;
        };
        j += jcap::quad::integrate_interval(interior, -B, B).value;
        const double got = Channel::clipped_awgn(1.0, B).fisher(theta);
        EXPECT_NEAR(got, j, 1e-7) << theta;
        EXPECT_GT(got, 0.0);
        EXPECT_LT(got, 1.0);
    }
}

TEST(Clipped, NeverExceedsAwgn) {
    for (double B : {0.1, 0.5, 1.0, 3.0, 8.0}) {
        const auto ch = Channel::clipped_awgn(2.0, B);
        for (double t : theta_grid(ch, 41)) {
            const double j = ch.fisher(t);
            EXPECT_LE(j, 1.0);
            EXPECT_GT(j, 0.0);
        }
    }
}

TEST(Clipped, LogDensityDerivative) {
    const auto ch = Channel::clipped_awgn(1.0, 0.8);
    const double h = 1e-6;
    for (double y : {-0.8, -0.3, 0.5, 0.8}) {
        const double t = 0.35;
        const double fd = (ch.log_density(y, t + h).value - ch.log_density(y, t - h).value) / (2 * h);
        EXPECT_NEAR(ch.log_density(y, t).dtheta, fd, 1e-7);
    }
}

TEST(Quantized, OneBitAtZero) {
    EXPECT_NEAR(Channel::one_bit(1.0).fisher(0.0), 2.0 / std::numbers::pi, 1e-15);
    const auto ch = Channel::one_bit(2.0);
    EXPECT_NEAR(brute_force_discrete_fisher(ch, 0.0), 2.0 / std::numbers::pi, 1e-9);
    EXPECT_NEAR(ch.fisher(1.3), ch.fisher(-1.3), 1e-15);
}

TEST(Quantized, FineQuantizerApproachesAwgn) {
    std::vector<double> t;
    const int L = 4096;
    for (int i = 1; i < L; ++i) t.push_back(-8.0 + 16.0 * i / L);
    EXPECT_NEAR(jcap::fisher_quantized_awgn(0.0, t), 1.0, 1e-4);
}

TEST(Quantized, RejectsUnsortedThresholds) {
    EXPECT_THROW(Channel::quantized_awgn(1.0, {0.5, 0.1}), jcap::DomainError);
    EXPECT_THROW(Channel::quantized_awgn(1.0, {}), jcap::DomainError);
    EXPECT_THROW(Channel::quantized_awgn(1.0, {0.1, 0.1}), jcap::DomainError);
}

TEST(Quantized, RefinementNeverLosesInformation) {
    for (double t : {-1.7, -0.2, 0.0, 0.9, 1.5}) {
        double prev = 0.0;
        for (std::size_t L : {2, 4, 8, 16, 32, 64}) {
            // Dyadic cells on [-2, 2]: each threshold set contains the previous one.
            std::vector<double> th;
            for (std::size_t i = 1; i < L; ++i) th.push_back(-2.0 + 4.0 * i / L);
            const double j = jcap::fisher_quantized_awgn(t, th);
            EXPECT_GE(j, prev - 1e-15) << "L = " << L << " θ = " << t;
            prev = j;
        }
    }
}

TEST(Quantized, ExtremeOffsetsStayFinite) {
    const double j = jcap::fisher_quantized_awgn(60.0, {0.0});
    EXPECT_TRUE(std::isfinite(j));
    EXPECT_GE(j, 0.0);
    EXPECT_TRUE(std::isfinite(jcap::fisher_quantized_awgn(45.0, {-1.0, 0.0, 1.0})));
}

TEST(OutputPmf, Examples) {
    const auto one = Channel::one_bit(1.0).output_pmf(0.0);
    EXPECT_EQ(one.size(), 2u);
    EXPECT_NEAR(one[0], 0.5, 1e-16);
    EXPECT_NEAR(one[1], 0.5, 1e-16);

    const auto four = Channel::quantized_awgn(1.0, {-1.0, 0.0, 1.0}).output_pmf(0.0);
    const double q1 = sf::gauss_q(1.0);
    ASSERT_EQ(four.size(), 4u);
    EXPECT_NEAR(four[0], q1, 1e-15);
    EXPECT_NEAR(four[1], 0.5 - q1, 1e-15);
    EXPECT_NEAR(four[2], 0.5 - q1, 1e-15);
    EXPECT_NEAR(four[3], q1, 1e-15);

    const auto d = Channel::dithered_1bit(1.0, {{-1.0, 1.0}, {0.5, 0.5}}).output_pmf(0.0);
    ASSERT_EQ(d.size(), 4u);
    // s = -1: y = -1 needs z < -1, y = +1 needs z > -1.
    EXPECT_NEAR(d[0], 0.5 * sf::gauss_q(1.0), 1e-15);
    EXPECT_NEAR(d[1], 0.5 * sf::gauss_q(-1.0), 1e-15);
    EXPECT_NEAR(d[2], 0.5 * sf::gauss_q(-1.0), 1e-15);
    EXPECT_NEAR(d[3], 0.5 * sf::gauss_q(1.0), 1e-15);

    EXPECT_THROW(Channel::awgn(1.0).output_pmf(0.0), jcap::ContractError);
    EXPECT_THROW(jcap::output_pmf_finite(Channel::noncoherent(1.0, 0.5), 0.3), jcap::ContractError);
}

TEST(OutputPmf, NormalizedAndMatchesFisher) {
    const std::vector<Channel> finite = {
        Channel::one_bit(2.0),
        Channel::uniform_adc(1.0, 4),
        Channel::uniform_adc(3.0, 8),
        Channel::quantized_awgn(2.0, {-1.3, -0.2, 0.4, 1.9}),
        Channel::dithered_1bit(1.0, jcap::DitherSet::uniform(3, 1.0)),
        Channel::dithered_1bit(2.0, {{-1.0, 0.3, 1.2}, {0.2, 0.5, 0.3}}),
    };
    for (const auto& ch : finite) {
        for (double t : theta_grid(ch, 33)) {
            const auto p = ch.output_pmf(t);
            double s = 0.0;
            for (double v : p) {
                EXPECT_GE(v, 0.0);
                s += v;
            }
            EXPECT_NEAR(s, 1.0, 1e-12);
            const double j = ch.fisher(t);
            EXPECT_NEAR(brute_force_discrete_fisher(ch, t) / j, 1.0, 1e-4) << ch.kind_name() << " θ=" << t;
        }
    }
}

TEST(EnergyDetection, ZeroAtOrigin) {
    EXPECT_EQ(Channel::energy_detection(2.0).fisher(0.0), 0.0);
}

TEST(EnergyDetection, MatchesMonteCarloOracle) {
    // 10^7 draws of ỹ = 2|1 + z|², z ~ CN(0, 1); score by central differences of
    // the log-density written out with unscaled Bessel functions.
    const double theta = 1.0;
    const double h = 1e-4;
    auto logp = [](double yt, double t) {
        return std::log(0.5) - 0.5 * (yt + 2 * t * t) + std::log(std::cyl_bessel_i(0.0, t * std::sqrt(2 * yt)));
    };
    std::mt19937_64 rng(20240601);
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    const int draws = 10'000'000;
    double sum = 0.0, sum2 = 0.0;
    for (int k = 0; k < draws; ++k) {
        const double re = theta + n(rng);
        const double im = n(rng);
        const double yt = 2.0 * (re * re + im * im);
        const double s = (logp(yt, theta + h) - logp(yt, theta - h)) / (2 * h);
        sum += s * s;
        sum2 += s * s * s * s;
    }
    const double mean = sum / draws;
    const double se = std::sqrt((sum2 / draws - mean * mean) / draws);
    const double j = Channel::energy_detection(2.0).fisher(theta);
    EXPECT_GT(j, 0.0);
    EXPECT_LT(std::abs(j - mean), 3.0 * se) << "J=" << j << " mc=" << mean << " se=" << se;
}

TEST(EnergyDetection, NondecreasingNearOrigin) {
    const auto ch = Channel::energy_detection(2.0);
    double prev = -1.0;
    for (int i = 0; i <= 20; ++i) {
        const double j = ch.fisher(0.5 * i / 20.0);
        EXPECT_GE(j, prev);
        prev = j;
    }
}

TEST(EnergyDetection, LogDensityDerivative) {
    const auto ch = Channel::energy_detection(3.0);
    const double h = 1e-6;
    for (double yt : {0.1, 2.0, 30.0, 400.0}) {
        for (double t : {0.2, 1.5, 3.0 - 2e-6}) {
            const double fd = (ch.log_density(yt, t + h).value - ch.log_density(yt, t - h).value) / (2 * h);
            EXPECT_NEAR(ch.log_density(yt, t).dtheta, fd, 1e-5 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST(Mimo, ClosedFormValues) {
    EXPECT_NEAR(jcap::mimo_sqrt_det_fisher(0.0, 3, 0.2), std::pow(2 * 0.8, 3), 1e-14);
    EXPECT_NEAR(jcap::mimo_sqrt_det_fisher(1.7, 2, 1e-12), 4.0, 1e-10);
    EXPECT_THROW(jcap::mimo_sqrt_det_fisher(0.5, 2, 1.0), jcap::DomainError);
    EXPECT_THROW(jcap::mimo_sqrt_det_fisher(0.5, 2, 0.0), jcap::DomainError);
}

TEST(Mimo, MatchesDenseDeterminant) {
    const int nt = 4;
    const double s2 = 0.1;
    const int d = 2 * nt;
    for (double r : {0.0, 0.5, 1.0, 2.0}) {
        Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
        theta(0) = r;
        const double v = 1.0 + s2 * r * r;
        const Eigen::MatrixXd gamma = (1.0 - s2) * Eigen::MatrixXd::Identity(d, d);
        const Eigen::MatrixXd j = (2.0 / v) * gamma + (4.0 * s2 * s2 / (v * v)) * theta * theta.transpose();
        const double want = std::sqrt(j.determinant());
        EXPECT_NEAR(jcap::mimo_sqrt_det_fisher(r, nt, s2) / want, 1.0, 1e-12);
        const auto ch = Channel::mimo_imperfect_csi(2.0, nt, s2);
        EXPECT_NEAR(std::sqrt(ch.fisher_matrix(theta).determinant()) / want, 1.0, 1e-12);
        EXPECT_NEAR(ch.sqrt_det_fisher(r) / want, 1.0, 1e-12);
    }
    // Direction does not matter.
    const auto ch = Channel::mimo_imperfect_csi(2.0, nt, s2);
    Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(d, -1.0, 2.0);
    u *= 1.3 / u.norm();
    EXPECT_NEAR(std::sqrt(ch.fisher_matrix(u).determinant()), ch.sqrt_det_fisher(1.3), 1e-12);
}

TEST(Mimo, BallParameterSpace) {
    const auto ch = Channel::mimo_imperfect_csi(2.0, 4, 0.1);
    EXPECT_EQ(ch.dim(), 8);
    EXPECT_TRUE(ch.space().isotropic);
    EXPECT_THROW(ch.fisher(0.5), jcap::UnsupportedError);
    EXPECT_THROW(ch.sqrt_det_fisher(2.5), jcap::DomainError);
    // Surface area of the unit sphere in R^8 is π⁴/3.
    EXPECT_NEAR(ch.space().unit_sphere_surface(), std::pow(std::numbers::pi, 4) / 3.0, 1e-12);
}

TEST(Noncoherent, Values) {
    const auto ch = Channel::noncoherent(3.0, 1.0);
    EXPECT_EQ(ch.fisher(0.0), 0.0);
    EXPECT_NEAR(ch.fisher(1.0), 1.0, 1e-15);
    // Grid search for the maximum.
    double best = 0.0, arg = 0.0;
    for (int i = 0; i <= 3000; ++i) {
        const double t = 3.0 * i / 3000.0;
        if (ch.fisher(t) > best) {
            best = ch.fisher(t);
            arg = t;
        }
    }
    EXPECT_NEAR(best, 1.0, 1e-12);
    EXPECT_NEAR(arg, 1.0, 1e-12);
    EXPECT_NEAR(ch.sqrt_det_fisher(0.7), std::sqrt(ch.fisher(0.7)), 1e-15);
}

TEST(Poisson, Values) {
    using jcap::DiscreteDistribution;
    const auto one = DiscreteDistribution::point_mass(1.0);
    EXPECT_NEAR(Channel::poisson(5.0, one, one).fisher(0.0), 1.0, 1e-15);
    const double m = 0.3;
    const auto ch = Channel::poisson(5.0, one, DiscreteDistribution::point_mass(m));
    for (double t : {0.0, 0.5, 4.0}) EXPECT_NEAR(ch.fisher(t), 1.0 / (t + m), 1e-15);
    const DiscreteDistribution h{{0.5, 1.5}, {0.5, 0.5}};
    EXPECT_NEAR(Channel::poisson(5.0, h, one).fisher(2.0), 0.34375, 1e-15);
    // Brute force over the joint support.
    double bf = 0.0;
    for (double hv : {0.5, 1.5}) bf += 0.5 * hv * hv / (hv * 2.0 + 1.0);
    EXPECT_NEAR(Channel::poisson(5.0, h, one).fisher(2.0), bf, 1e-15);
    EXPECT_THROW(Channel::poisson(5.0, one, DiscreteDistribution::point_mass(0.0)).fisher(0.0),
                 jcap::DomainError);
}

TEST(Dithered, ReducesToOneBit) {
    const auto d = Channel::dithered_1bit(1.0, {{0.0}, {1.0}});
    EXPECT_NEAR(d.fisher(0.4), Channel::one_bit(1.0).fisher(0.4), 1e-15);
}

TEST(Dithered, ThreePointHandSum) {
    const auto d = Channel::dithered_1bit(1.0, jcap::DitherSet::uniform(3, 1.0));
    const double phi1 = sf::gauss_pdf(1.0);
    const double want = (2.0 * phi1 * phi1 / (sf::gauss_q(1.0) * sf::gauss_q(-1.0)) + 2.0 / std::numbers::pi) / 3.0;
    EXPECT_NEAR(d.fisher(0.0), want, 1e-14);
    EXPECT_NEAR(d.fisher(0.9), d.fisher(-0.9), 1e-15);
}

TEST(Dithered, RejectsDegenerateDither) {
    EXPECT_THROW(Channel::dithered_1bit(1.0, {{0.5, 0.5}, {0.5, 0.5}}), jcap::DomainError);
    EXPECT_THROW(Channel::dithered_1bit(1.0, {{0.0, 0.5}, {0.7, 0.5}}), jcap::DomainError);
}

TEST(Truncated, FisherMatchesQuadrature) {
    const double B = 1.5;
    const auto ch = Channel::truncated_awgn(1.0, B);
    for (double t : {-1.0, -0.3, 0.0, 0.8}) {
        const auto f = [&](double y) {
            const auto ld = ch.log_density(y, t);
            return std::exp(ld.value) * ld.dtheta * ld.dtheta;
        };
        const auto mass = [&](double y) { return std::exp(ch.log_density(y, t).value); };
        EXPECT_NEAR(jcap::quad::integrate_interval(mass, -B, B).value, 1.0, 1e-12);
        EXPECT_NEAR(jcap::quad::integrate_interval(f, -B, B).value, ch.fisher(t), 1e-10);
        EXPECT_LE(ch.fisher(t), 1.0);
    }
}

TEST(ParameterSpace, Invariants) {
    EXPECT_THROW(jcap::ParameterSpace::interval(1.0, 1.0), jcap::DomainError);
    EXPECT_THROW(jcap::ParameterSpace::ball(0, 1.0), jcap::DomainError);
    jcap::ParameterSpace bad{1, jcap::ParameterSpace::Shape::Interval, -1.0, 1.0, true};
    EXPECT_THROW(bad.validate(), jcap::DomainError);
    EXPECT_NEAR(jcap::ParameterSpace::ball(2, 1.0).measure(0.5), std::numbers::pi, 1e-14);
    EXPECT_THROW(Channel::awgn(-1.0), jcap::DomainError);
}
