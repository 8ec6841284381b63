#pragma once

// Adaptive one-dimensional quadrature.
//
// Globally adaptive composite Gauss-Legendre: every panel carries a 15-point
// estimate and the sum of the 15-point estimates on its two halves; the panel
// with the largest disagreement is bisected next. Nodes never touch the panel
// endpoints, so integrable endpoint singularities (1/√θ) are handled by
// repeated bisection toward the endpoint.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "jcap/errors.hpp"

namespace jcap::quad {

enum class QuadKind { AdaptiveInterval, TransformedSemiInfinite };

struct QuadRule {
    QuadKind kind = QuadKind::AdaptiveInterval;
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    std::size_t max_subdivisions = std::size_t{1} << 14;
    std::size_t initial_panels = 8;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
            throw DomainError("QuadRule: tolerances must be > 0");
        }
        if (max_subdivisions < 1 || initial_panels < 1) {
            throw DomainError("QuadRule: max_subdivisions and initial_panels must be >= 1");
        }
    }
};

struct QuadResult {
    double value = 0.0;
    double err_est = 0.0;
};

namespace detail {

inline constexpr int kGaussOrder = 15;

struct GaussLegendre {
    std::array<double, kGaussOrder> nodes{};
    std::array<double, kGaussOrder> weights{};
};

/// 15-point Gauss-Legendre rule on [-1, 1], roots of P_15 by Newton iteration.
inline const GaussLegendre& gauss_legendre_15() {
    static const GaussLegendre rule = [] {
        GaussLegendre gl;
        constexpr int n = kGaussOrder;
        for (int i = 0; i < n; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0;
                double p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-17) break;
            }
            gl.nodes[i] = x;
            gl.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        // The middle root of an odd-order rule is exactly zero.
        gl.nodes[n / 2] = 0.0;
        return gl;
    }();
    return rule;
}

template <class F>
double gauss_panel(F& f, double a, double b) {
    const auto& gl = gauss_legendre_15();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (int i = 0; i < kGaussOrder; ++i) {
        const double fx = f(mid + half * gl.nodes[i]);
        if (!std::isfinite(fx)) {
            throw NumericalError("quadrature: integrand is not finite at x = " +
                                 std::to_string(mid + half * gl.nodes[i]));
        }
        sum += gl.weights[i] * fx;
    }
    return half * sum;
}

struct Panel {
    double a;
    double b;
    double whole;  // 15-point estimate on [a, b]
    double left;   // 15-point estimate on [a, mid]
    double right;  // 15-point estimate on [mid, b]
    double err;

    double value() const { return left + right; }
    bool operator<(const Panel& other) const { return err < other.err; }
};

template <class F>
Panel make_panel(F& f, double a, double b, double whole) {
    const double m = 0.5 * (a + b);
    const double l = gauss_panel(f, a, m);
    const double r = gauss_panel(f, m, b);
    return {a, b, whole, l, r, std::abs(whole - (l + r))};
}

template <class F>
QuadResult adaptive(F& f, double a, double b, const QuadRule& rule) {
    std::priority_queue<Panel> heap;
    const auto n0 = rule.initial_panels;
    const double width = (b - a) / static_cast<double>(n0);
    for (std::size_t i = 0; i < n0; ++i) {
        const double lo = a + width * static_cast<double>(i);
        const double hi = (i + 1 == n0) ? b : a + width * static_cast<double>(i + 1);
        heap.push(make_panel(f, lo, hi, gauss_panel(f, lo, hi)));
    }

    std::vector<Panel> frozen;  // too narrow to split further
    std::size_t subdivisions = n0;

    auto totals = [&] {
        QuadResult r;
        auto std_copy = heap;
        while (!std_copy.empty()) {
            r.value += std_copy.top().value();
            r.err_est += std_copy.top().err;
            std_copy.pop();
        }
        for (const auto& p : frozen) {
            r.value += p.value();
            r.err_est += p.err;
        }
        return r;
    };

    double value = 0.0;
    double err = 0.0;
    {
        const auto t = totals();
        value = t.value;
        err = t.err_est;
    }
    while (true) {
        if (err <= std::max(rule.abs_tol, rule.rel_tol * std::abs(value))) break;
        if (heap.empty()) break;
        if (subdivisions >= rule.max_subdivisions) {
            const auto t = totals();
            throw ToleranceError("quadrature: no convergence within " +
                                     std::to_string(rule.max_subdivisions) +
                                     " subdivisions (estimate " + std::to_string(t.value) +
                                     ", error " + std::to_string(t.err_est) + ")",
                                 t.value, t.err_est);
        }
        Panel worst = heap.top();
        heap.pop();
        const double m = 0.5 * (worst.a + worst.b);
        if (!(m > worst.a && m < worst.b) ||
            (worst.b - worst.a) <= 64.0 * std::numeric_limits<double>::epsilon() *
                                       std::max(std::abs(worst.a), std::abs(worst.b))) {
            frozen.push_back(worst);
            continue;
        }
        Panel lp = make_panel(f, worst.a, m, worst.left);
        Panel rp = make_panel(f, m, worst.b, worst.right);
        value += lp.value() + rp.value() - worst.value();
        err += lp.err + rp.err - worst.err;
        heap.push(lp);
        heap.push(rp);
        ++subdivisions;
        // Running sums drift; resynchronize now and then.
        if (subdivisions % 256 == 0) {
            const auto t = totals();
            value = t.value;
            err = t.err_est;
        }
    }
    return totals();
}

}  // namespace detail

/// ∫_a^b f. Returns the value and an error estimate with
/// err_est <= max(abs_tol, rel_tol·|value|) on success.
template <class F>
QuadResult integrate_interval(F&& f, double a, double b, const QuadRule& rule = {}) {
    rule.validate();
    if (!std::isfinite(a) || !std::isfinite(b) || a > b) {
        throw DomainError("integrate_interval: need finite a <= b");
    }
    if (a == b) return {};
    return detail::adaptive(f, a, b, rule);
}

/// ∫_a^∞ f via t = a + u/(1-u) mapped onto u ∈ [0, 1].
template <class F>
QuadResult integrate_semiinf(F&& f, double a, const QuadRule& rule = {}) {
    rule.validate();
    if (!std::isfinite(a)) {
        throw DomainError("integrate_semiinf: lower limit must be finite");
    }
    auto g = [&f, a](double u) {
        const double one_minus = 1.0 - u;
        const double t = a + u / one_minus;
        const double ft = f(t);
        if (ft == 0.0) return 0.0;
        return ft / (one_minus * one_minus);
    };
    return detail::adaptive(g, 0.0, 1.0, rule);
}

/// Dispatch on rule.kind; the semi-infinite kind requires b = +∞.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadRule& rule = {}) {
    if (rule.kind == QuadKind::TransformedSemiInfinite) {
        if (b != std::numeric_limits<double>::infinity()) {
            throw DomainError("integrate: semi-infinite rule needs b = +inf");
        }
        return integrate_semiinf(std::forward<F>(f), a, rule);
    }
    return integrate_interval(std::forward<F>(f), a, b, rule);
}

}  // namespace jcap::quad
