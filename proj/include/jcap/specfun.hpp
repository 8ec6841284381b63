#pragma once

// Scalar special functions used by the channel formulas.
//
// Accuracy target is 1e-12 relative, 1e-10 guaranteed, over the documented
// ranges. Gaussian tails go through erfc (never 1 - cdf), Bessel functions are
// only exposed in exponentially scaled form.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "jcap/errors.hpp"

namespace jcap::specfun {

struct AccuracySpec {
    double rel_tol = 1e-12;
};

/// Documented accuracy of every function in this header.
inline constexpr AccuracySpec kGuaranteedAccuracy{1e-10};

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;
inline constexpr double kLn2 = std::numbers::ln2;

namespace detail {
inline void require_finite(double x, const char* op) {
    if (!std::isfinite(x)) {
        throw DomainError(std::string(op) + ": argument must be finite");
    }
}
}  // namespace detail

/// Standard normal density φ(x).
inline double gauss_pdf(double x) {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

/// Complementary cdf Q(x) = P(Z > x). Relative accuracy holds while Q(x) is a
/// normal double (x < 37.5); beyond that the result is subnormal or zero.
inline double gauss_q(double x) {
    detail::require_finite(x, "gauss_q");
    return 0.5 * std::erfc(x * std::numbers::sqrt2 / 2.0);
}

struct PhiQ {
    double phi;
    double q;
};

inline PhiQ gauss_phi_q(double x) {
    detail::require_finite(x, "gauss_phi_q");
    return {gauss_pdf(x), gauss_q(x)};
}

/// Mills ratio Q(x)/φ(x) for x >= 0. Stays finite where Q and φ both
/// underflow, so ratios such as φ²/Q can be formed for arbitrarily large x.
inline double mills_ratio(double x) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw DomainError("mills_ratio: x must be finite and >= 0");
    }
    if (x < 5.0) {
        return gauss_q(x) / gauss_pdf(x);
    }
    // Laplace continued fraction 1/(x+1/(x+2/(x+3/(x+...)))), modified Lentz.
    constexpr double tiny = 1e-300;
    double f = x;
    double c = x;
    double d = 0.0;
    for (int k = 1; k < 500; ++k) {
        d = x + k * d;
        d = (d == 0.0) ? tiny : d;
        c = x + k / c;
        c = (c == 0.0) ? tiny : c;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 / f;
}

/// ln Q(x), finite for every finite x.
inline double log_gauss_q(double x) {
    detail::require_finite(x, "log_gauss_q");
    if (x < 5.0) return std::log(gauss_q(x));
    return std::log(kInvSqrt2Pi) - 0.5 * x * x + std::log(mills_ratio(x));
}

/// P(a < Z <= b) for a standard normal Z, a <= b, with either bound allowed
/// to be infinite. Picks the tail representation that avoids cancellation.
inline double gauss_interval_prob(double a, double b) {
    if (std::isnan(a) || std::isnan(b) || a > b) {
        throw DomainError("gauss_interval_prob: need a <= b");
    }
    if (a == b) return 0.0;
    auto q = [](double x) {
        if (x == std::numeric_limits<double>::infinity()) return 0.0;
        if (x == -std::numeric_limits<double>::infinity()) return 1.0;
        return 0.5 * std::erfc(x * std::numbers::sqrt2 / 2.0);
    };
    if (a >= 0.0) return q(a) - q(b);
    if (b <= 0.0) return q(-b) - q(-a);
    return 1.0 - q(b) - q(-a);
}

struct BesselScaled {
    double i0s;  ///< e^{-x} I0(x)
    double i1s;  ///< e^{-x} I1(x)
};

/// Exponentially scaled modified Bessel functions of orders 0 and 1.
inline BesselScaled bessel_i01_scaled(double x) {
    if (!(x >= 0.0) || std::isnan(x)) {
        throw DomainError("bessel_i01_scaled: x must be >= 0");
    }
    if (std::isinf(x)) return {0.0, 0.0};
    if (x <= 20.0) {
        // All series terms are positive, so the sum is relatively accurate.
        const double h2 = 0.25 * x * x;
        double t0 = 1.0;
        double t1 = 0.5 * x;
        double s0 = t0;
        double s1 = t1;
        for (int k = 1; k < 200; ++k) {
            t0 *= h2 / (static_cast<double>(k) * k);
            t1 *= h2 / (static_cast<double>(k) * (k + 1));
            s0 += t0;
            s1 += t1;
            if (t0 < 1e-17 * s0 && t1 < 1e-17 * s1) break;
        }
        const double e = std::exp(-x);
        return {e * s0, e * s1};
    }
    // Hankel asymptotic expansion; truncation error is O(e^{-2x}).
    double a0 = 1.0;
    double a1 = 1.0;
    double s0 = 1.0;
    double s1 = 1.0;
    const double inv8x = 1.0 / (8.0 * x);
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double n0 = a0 * (0.0 - odd * odd) * inv8x / k;
        const double n1 = a1 * (4.0 - odd * odd) * inv8x / k;
        if (std::abs(n0) > std::abs(a0) && k > 2) break;
        a0 = n0;
        a1 = n1;
        // I_nu(x) e^{-x} ~ (2πx)^{-1/2} Σ (-1)^k a_k(nu) / x^k
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        s0 += sign * a0;
        s1 += sign * a1;
        if (std::abs(a0) < 1e-17 && std::abs(a1) < 1e-17) break;
    }
    const double pref = 1.0 / std::sqrt(2.0 * std::numbers::pi * x);
    return {pref * s0, pref * s1};
}

/// Exponential integral E1(x) = ∫_x^∞ e^{-t}/t dt, x > 0.
inline double exp_integral_e1(double x) {
    if (!(x > 0.0) || std::isnan(x)) {
        throw DomainError("exp_integral_e1: x must be > 0");
    }
    if (std::isinf(x)) return 0.0;
    constexpr double euler_gamma = std::numbers::egamma;
    if (x <= 1.0) {
        double term = 1.0;
        double sum = 0.0;
        for (int k = 1; k < 100; ++k) {
            term *= -x / k;
            const double t = term / k;
            sum += t;
            if (std::abs(t) < 1e-18 * std::abs(sum)) break;
        }
        return -euler_gamma - std::log(x) - sum;
    }
    // Continued fraction, modified Lentz.
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double delta = c * d;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x);
}

/// ln Γ(x), x > 0.
inline double log_gamma(double x) {
    if (!(x > 0.0) || std::isnan(x)) {
        throw DomainError("log_gamma: x must be > 0");
    }
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

/// Binary entropy in bits.
inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace jcap::specfun
