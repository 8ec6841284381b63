#pragma once

// Tilted Jeffreys priors and the asymptotic capacity
//
//   C(P) ≈ (d/2)·log2(n_r/(2πe)) + log2 JF(λ*),
//   JF(λ) = ∫_Θ 2^{-λ(c(θ)-P)} √det J(θ) dθ,
//
// with λ* the smallest tilt whose prior meets the average-power budget.
// Isotropic ball spaces are integrated radially with the sphere surface
// factor; every integral here is one-dimensional in t (θ or the radius).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "jcap/channels.hpp"
#include "jcap/errors.hpp"
#include "jcap/quad.hpp"

namespace jcap {

/// Quadrature used for the Jeffreys integrals. Tighter than the generic
/// default so closed-form comparisons at 1e-9 have headroom.
inline quad::QuadRule jeffreys_rule() {
    quad::QuadRule r;
    r.abs_tol = 1e-15;
    r.rel_tol = 1e-12;
    return r;
}

namespace detail {

/// 2^{-λ c(t)} √det J(t) · measure(t): the unnormalized tilted prior mass
/// density along the integration variable t.
inline double tilted_weight(const Channel& ch, double lambda, double t) {
    const double s = ch.sqrt_det_fisher(t);
    if (s == 0.0) return 0.0;
    return std::exp2(-lambda * ch.cost(t)) * s * ch.space().measure(t);
}

inline void check_lambda(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("tilt λ must be finite and >= 0");
    }
}

/// ∫ 2^{-λc}√det J (no P shift).
inline double tilted_mass(const Channel& ch, double lambda, const quad::QuadRule& rule) {
    const auto& sp = ch.space();
    return quad::integrate_interval([&](double t) { return tilted_weight(ch, lambda, t); }, sp.lo, sp.hi, rule)
        .value;
}

}  // namespace detail

/// log2 JF(λ) = λP + log2 ∫ 2^{-λc}√det J. Stays finite where JF itself
/// would overflow or underflow.
inline double log2_jeffreys_factor(const Channel& ch, double lambda, double P,
                                   const quad::QuadRule& rule = jeffreys_rule()) {
    detail::check_lambda(lambda);
    const double z = detail::tilted_mass(ch, lambda, rule);
    if (!(z > 0.0)) throw DegenerateChannelError(ch.kind_name() + ": Jeffreys normalization is zero");
    return lambda * P + std::log2(z);
}

inline double jeffreys_factor(const Channel& ch, double lambda, double P,
                              const quad::QuadRule& rule = jeffreys_rule()) {
    detail::check_lambda(lambda);
    const double z = detail::tilted_mass(ch, lambda, rule);
    return std::exp2(lambda * P) * z;
}

/// Normalized tilted Jeffreys prior w_{J,λ}. For ball spaces `density` is the
/// density on R^d at radius t and `radial_density` the marginal of ‖θ‖; the
/// cdf and its inverse always refer to t (θ on an interval, ‖θ‖ on a ball).
class TiltedPrior {
public:
    static constexpr std::size_t kCdfKnots = 64;

    TiltedPrior(Channel channel, double lambda, quad::QuadRule rule = jeffreys_rule())
        : channel_(std::move(channel)), lambda_(lambda), rule_(rule) {
        detail::check_lambda(lambda_);
        const auto& sp = channel_.space();
        if (sp.shape == ParameterSpace::Shape::Ball && !sp.isotropic) {
            throw UnsupportedError("tilted prior: non-isotropic multi-dimensional spaces are not supported");
        }
        // Cumulative mass at equally spaced knots; cdf() integrates only from
        // the nearest knot below.
        knots_.resize(kCdfKnots + 1);
        cum_.resize(kCdfKnots + 1);
        cum_[0] = 0.0;
        for (std::size_t k = 0; k <= kCdfKnots; ++k) {
            knots_[k] = (k == kCdfKnots) ? sp.hi
                                         : sp.lo + (sp.hi - sp.lo) * static_cast<double>(k) /
                                                       static_cast<double>(kCdfKnots);
        }
        for (std::size_t k = 1; k <= kCdfKnots; ++k) {
            cum_[k] = cum_[k - 1] + segment(knots_[k - 1], knots_[k]);
        }
        z_ = cum_.back();
        if (!(z_ > 0.0)) {
            throw DegenerateChannelError(channel_.kind_name() + ": Jeffreys normalization is zero");
        }
        if (!std::isfinite(z_)) throw NumericalError("tilted prior: normalization is not finite");
    }

    const Channel& channel() const { return channel_; }
    double lambda() const { return lambda_; }
    /// Z = ∫_Θ 2^{-λc(θ)} √det J(θ) dθ.
    double normalization() const { return z_; }
    double lo() const { return channel_.space().lo; }
    double hi() const { return channel_.space().hi; }

    /// w_{J,λ}(θ); on a ball, the density on R^d at radius t.
    double density(double t) const {
        return std::exp2(-lambda_ * channel_.cost(t)) * channel_.sqrt_det_fisher(t) / z_;
    }

    /// Density of the integration variable t (equals density() on an interval).
    double radial_density(double t) const { return detail::tilted_weight(channel_, lambda_, t) / z_; }

    double cdf(double t) const {
        if (std::isnan(t)) throw DomainError("prior cdf: argument is NaN");
        if (t <= lo()) return 0.0;
        if (t >= hi()) return 1.0;
        const double pos = (t - lo()) / (hi() - lo()) * static_cast<double>(kCdfKnots);
        auto k = static_cast<std::size_t>(std::min(pos, static_cast<double>(kCdfKnots - 1)));
        while (k > 0 && knots_[k] > t) --k;
        return std::clamp((cum_[k] + segment(knots_[k], t)) / z_, 0.0, 1.0);
    }

    /// Bisection on the monotone cdf to |F(t) - u| < 1e-12.
    double cdf_inverse(double u) const {
        if (!(u >= 0.0 && u <= 1.0)) throw DomainError("prior cdf inverse: u must lie in [0, 1]");
        if (u == 0.0) return lo();
        if (u == 1.0) return hi();
        // Bracket from the knot table.
        std::size_t k = 0;
        while (k + 1 < kCdfKnots && cum_[k + 1] / z_ < u) ++k;
        double a = knots_[k];
        double b = knots_[k + 1];
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (a + b);
            const double f = cdf(m);
            if (std::abs(f - u) < 1e-12) return m;
            if (f < u) {
                a = m;
            } else {
                b = m;
            }
            if (!(m > a || m < b) || b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(m)) break;
        }
        return 0.5 * (a + b);
    }

    /// E_w[c(θ)].
    double mean_cost() const {
        const auto& sp = channel_.space();
        const auto r = quad::integrate_interval(
            [&](double t) { return channel_.cost(t) * detail::tilted_weight(channel_, lambda_, t); }, sp.lo,
            sp.hi, rule_);
        return r.value / z_;
    }

private:
    double segment(double a, double b) const {
        if (!(b > a)) return 0.0;
        return quad::integrate_interval([&](double t) { return detail::tilted_weight(channel_, lambda_, t); },
                                        a, b, rule_)
            .value;
    }

    Channel channel_;
    double lambda_;
    quad::QuadRule rule_;
    std::vector<double> knots_;
    std::vector<double> cum_;
    double z_ = 0.0;
};

inline TiltedPrior tilted_prior(const Channel& ch, double lambda, double /*P*/ = 0.0) {
    return TiltedPrior(ch, lambda);
}

/// M(λ) = E_{w_{J,λ}}[c(θ)]. Independent of P.
inline double average_cost(const Channel& ch, double lambda, double /*P*/ = 0.0,
                           const quad::QuadRule& rule = jeffreys_rule()) {
    detail::check_lambda(lambda);
    const auto& sp = ch.space();
    const double z = detail::tilted_mass(ch, lambda, rule);
    if (!(z > 0.0)) throw DegenerateChannelError(ch.kind_name() + ": Jeffreys normalization is zero");
    const double num =
        quad::integrate_interval([&](double t) { return ch.cost(t) * detail::tilted_weight(ch, lambda, t); },
                                 sp.lo, sp.hi, rule)
            .value;
    return num / z;
}

struct JeffreysSolution {
    double lambda_star = 0.0;
    double jf = 0.0;        ///< JF(λ*)
    double log2_jf = 0.0;   ///< log2 JF(λ*)
    double m_at_star = 0.0; ///< M(λ*)
    double P = 0.0;
    int dim = 1;
    int iterations = 0;     ///< bisection steps taken

    /// (d/2)·log2(n_r/(2πe)) + log2 JF(λ*); the o(1) remainder is not modeled.
    double capacity_bits(double n_r) const {
        if (!(n_r >= 1.0)) throw DomainError("capacity: n_r must be >= 1");
        return 0.5 * dim * std::log2(n_r / (2.0 * std::numbers::pi * std::numbers::e)) + log2_jf;
    }
};

/// Smallest λ >= 0 with M(λ) <= P. M is strictly decreasing, so λ* = 0 when
/// M(0) <= P and bisection finds it otherwise.
inline JeffreysSolution solve_lambda_star(const Channel& ch, double P,
                                          const quad::QuadRule& rule = jeffreys_rule()) {
    if (!(P > 0.0) || !std::isfinite(P)) throw DomainError("solve_lambda_star: P must be finite and > 0");
    JeffreysSolution sol;
    sol.P = P;
    sol.dim = ch.dim();

    auto finish = [&](double lambda, double m) {
        sol.lambda_star = lambda;
        sol.m_at_star = m;
        sol.log2_jf = log2_jeffreys_factor(ch, lambda, P, rule);
        sol.jf = std::exp2(sol.log2_jf);
        return sol;
    };

    // M(0) within the bisection tolerance of P counts as feasible, so ties
    // resolve to λ* = 0 despite quadrature round-off.
    const double m0 = average_cost(ch, 0.0, P, rule);
    if (m0 <= P * (1.0 + 1e-10)) return finish(0.0, m0);

    double lo = 0.0;
    double hi = 1.0 / P;
    double m_hi = average_cost(ch, hi, P, rule);
    int doublings = 0;
    while (m_hi > P) {
        if (++doublings > 60) {
            throw UnboundedTiltError(ch.kind_name() + ": no finite tilt meets P = " + std::to_string(P) +
                                     " (M(λ) stays above P after 60 doublings)");
        }
        lo = hi;
        hi *= 2.0;
        m_hi = average_cost(ch, hi, P, rule);
    }
    double lambda = hi;
    double m = m_hi;
    while (hi - lo >= 1e-12 * std::max(1.0, lo)) {
        const double mid = 0.5 * (lo + hi);
        const double m_mid = average_cost(ch, mid, P, rule);
        ++sol.iterations;
        if (std::abs(m_mid - P) < 1e-10 * P) {
            lambda = mid;
            m = m_mid;
            break;
        }
        if (m_mid > P) {
            lo = mid;
        } else {
            hi = mid;
            m_hi = m_mid;
        }
        lambda = hi;
        m = m_hi;
    }
    return finish(lambda, m);
}

inline double asymptotic_capacity(const Channel& ch, double P, double n_r) {
    if (!(n_r >= 1.0)) throw DomainError("asymptotic_capacity: n_r must be >= 1");
    return solve_lambda_star(ch, P).capacity_bits(n_r);
}

/// Asymptotic rate of an arbitrary positive continuous prior w:
/// C(P) - D(w ‖ w_{J,λ*}) + λ*·E_w[c(θ) - P]   (bits).
/// On a ball, w is the density on R^d evaluated at radius t.
inline double mismatch_rate(const Channel& ch, const std::function<double(double)>& w, double P, double n_r) {
    const auto& sp = ch.space();
    const auto rule = jeffreys_rule();
    // Positivity on the interior.
    constexpr int kCheck = 1025;
    for (int i = 0; i < kCheck; ++i) {
        const double t = sp.lo + (sp.hi - sp.lo) * (i + 0.5) / kCheck;
        const double v = w(t);
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError("mismatch_rate: w must be finite and strictly positive on the interior of Θ (fails at " +
                              std::to_string(t) + ")");
        }
    }
    const double mass =
        quad::integrate_interval([&](double t) { return w(t) * sp.measure(t); }, sp.lo, sp.hi, rule).value;
    if (std::abs(mass - 1.0) > 1e-6) {
        throw DomainError("mismatch_rate: w integrates to " + std::to_string(mass) + ", not 1");
    }
    const auto sol = solve_lambda_star(ch, P);
    const TiltedPrior wj(ch, sol.lambda_star);
    const double kl = quad::integrate_interval(
                          [&](double t) {
                              const double v = w(t);
                              if (v == 0.0) return 0.0;
                              const double ref = wj.density(t);
                              return v * std::log2(v / ref) * sp.measure(t);
                          },
                          sp.lo, sp.hi, rule)
                          .value;
    const double mean_c =
        quad::integrate_interval([&](double t) { return w(t) * ch.cost(t) * sp.measure(t); }, sp.lo, sp.hi, rule)
            .value;
    return sol.capacity_bits(n_r) - kl + sol.lambda_star * (mean_c - P);
}

}  // namespace jcap
