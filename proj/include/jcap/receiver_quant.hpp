#pragma once

// Quantized receiver: uniform 1-D bins plus an overflow cell, bin
// probabilities in closed form for the Gaussian families, quantized Fisher
// information, the capacity-loss integral e_L, type-based log-likelihoods and
// ML detection, and an empirical e_L-vs-L scaling fit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "jcap/channels.hpp"
#include "jcap/errors.hpp"
#include "jcap/mutual_info.hpp"
#include "jcap/specfun.hpp"

namespace jcap {

/// Bin 0 is the overflow cell {|y| > r}; bins 1..L are [e_{ℓ-1}, e_ℓ).
struct Quantizer1D {
    double r = 0.0;
    std::size_t L = 0;
    std::vector<double> edges;  ///< L+1 edges, -r = e_0 < ... < e_L = r

    std::size_t bins() const { return L + 1; }
    double width() const { return 2.0 * r / static_cast<double>(L); }

    std::size_t bin_of(double y) const {
        if (!(std::abs(y) <= r)) return 0;
        auto it = std::upper_bound(edges.begin(), edges.end(), y);
        const auto idx = static_cast<std::size_t>(it - edges.begin());
        return std::clamp<std::size_t>(idx, 1, L);
    }
};

inline Quantizer1D build_quantizer(double r, std::size_t L) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("build_quantizer: r must be finite and > 0");
    if (L < 1) throw DomainError("build_quantizer: L must be >= 1");
    Quantizer1D q{r, L, {}};
    q.edges.resize(L + 1);
    // r·(2i/L - 1) keeps dyadic refinements exactly nested.
    for (std::size_t i = 0; i <= L; ++i) {
        q.edges[i] = r * (2.0 * static_cast<double>(i) / static_cast<double>(L) - 1.0);
    }
    q.edges.front() = -r;
    q.edges.back() = r;
    return q;
}

/// Histogram of samples over the quantizer cells.
inline TypeIndex make_type(const Quantizer1D& q, const std::vector<double>& samples) {
    TypeIndex t{std::vector<int>(q.bins(), 0)};
    for (double y : samples) {
        if (!std::isfinite(y)) throw DomainError("make_type: samples must be finite");
        ++t.counts[q.bin_of(y)];
    }
    return t;
}

struct BinProbs {
    std::vector<double> p;
    std::vector<double> dp;  ///< ∂θ p_ℓ
};

namespace detail {

/// P(a < θ + σz < b) and its θ-derivative, for a < b (infinite ends allowed).
inline std::pair<double, double> gauss_cell(double a, double b, double theta, double sigma) {
    const double lo = (a - theta) / sigma;
    const double hi = (b - theta) / sigma;
    const double p = specfun::gauss_interval_prob(lo, hi);
    const double pl = std::isfinite(lo) ? specfun::gauss_pdf(lo) : 0.0;
    const double ph = std::isfinite(hi) ? specfun::gauss_pdf(hi) : 0.0;
    return {p, (pl - ph) / sigma};
}

}  // namespace detail

/// Closed-form cell probabilities for `awgn` and `truncated_awgn`.
inline BinProbs bin_probs_and_dtheta(const Channel& ch, const Quantizer1D& q, double theta) {
    const double inf = std::numeric_limits<double>::infinity();
    BinProbs out{std::vector<double>(q.bins(), 0.0), std::vector<double>(q.bins(), 0.0)};
    if (const auto* f = ch.as<channel::Awgn>()) {
        const double s = std::sqrt(f->noise_var);
        const auto [pl, dl] = detail::gauss_cell(-inf, -q.r, theta, s);
        const auto [pr, dr] = detail::gauss_cell(q.r, inf, theta, s);
        out.p[0] = pl + pr;
        out.dp[0] = dl + dr;
        for (std::size_t l = 1; l <= q.L; ++l) {
            std::tie(out.p[l], out.dp[l]) = detail::gauss_cell(q.edges[l - 1], q.edges[l], theta, s);
        }
        return out;
    }
    if (const auto* f = ch.as<channel::TruncatedAwgn>()) {
        const auto [z, dz] = f->normalizer(theta);
        // Mass of [a, b] ∩ [-B, B] under the untruncated output law, then the quotient rule.
        auto cell = [&](double a, double b) -> std::pair<double, double> {
            a = std::max(a, -f->B);
            b = std::min(b, f->B);
            if (!(a < b)) return {0.0, 0.0};
            const auto [g, dg] = detail::gauss_cell(a, b, theta, 1.0);
            return {g / z, (dg * z - g * dz) / (z * z)};
        };
        const auto [pl, dl] = cell(-inf, -q.r);
        const auto [pr, dr] = cell(q.r, inf);
        out.p[0] = pl + pr;
        out.dp[0] = dl + dr;
        for (std::size_t l = 1; l <= q.L; ++l) std::tie(out.p[l], out.dp[l]) = cell(q.edges[l - 1], q.edges[l]);
        return out;
    }
    throw ContractError("bin_probs_and_dtheta: " + ch.kind_name() +
                        " has no closed-form bin probabilities (supported: awgn, truncated_awgn)");
}

/// J_L(θ) = Σ (∂θ p_ℓ)² / p_ℓ over cells with p_ℓ > 0.
inline double quantized_fisher(const Channel& ch, const Quantizer1D& q, double theta) {
    const auto b = bin_probs_and_dtheta(ch, q, theta);
    double j = 0.0;
    for (std::size_t l = 0; l < b.p.size(); ++l) {
        if (b.p[l] > 0.0) j += b.dp[l] * b.dp[l] / b.p[l];
    }
    return j;
}

/// e_L = ∫_Θ ln(J(θ)/J_L(θ)) dθ by the midpoint rule on `grid_size` cells.
/// Returns +∞ when J_L vanishes at a grid point.
inline double capacity_loss_eL(const Channel& ch, const Quantizer1D& q, std::size_t grid_size = 1025) {
    if (grid_size < 1) throw DomainError("capacity_loss_eL: grid_size must be >= 1");
    const auto sp = ch.space();
    if (sp.shape != ParameterSpace::Shape::Interval) {
        throw UnsupportedError("capacity_loss_eL: needs a one-dimensional parameter space");
    }
    const double h = (sp.hi - sp.lo) / static_cast<double>(grid_size);
    double sum = 0.0;
    for (std::size_t i = 0; i < grid_size; ++i) {
        const double t = sp.lo + h * (static_cast<double>(i) + 0.5);
        const double jl = quantized_fisher(ch, q, t);
        if (!(jl > 0.0)) return std::numeric_limits<double>::infinity();
        sum += std::log(ch.fisher(t) / jl);
    }
    return h * sum;
}

/// Σ_k ln p(y_k | θ).
inline double exact_loglik(const Channel& ch, const std::vector<double>& samples, double theta) {
    double s = 0.0;
    for (double y : samples) {
        if (!std::isfinite(y)) throw DomainError("exact_loglik: samples must be finite");
        s += ch.log_density(y, theta).value;
    }
    return s;
}

/// Value returned when an observed cell has zero probability under θ.
inline constexpr double kLogLikNegInf = -std::numeric_limits<double>::infinity();

/// Σ_ℓ counts_ℓ ln p_ℓ = n_r Σ π(ℓ) ln p(ℓ|θ); O(L) regardless of n_r.
inline double approx_loglik_from_probs(const std::vector<double>& p, const TypeIndex& type) {
    if (p.size() != type.counts.size()) throw ContractError("approx_loglik: type size does not match bins");
    double s = 0.0;
    for (std::size_t l = 0; l < p.size(); ++l) {
        if (type.counts[l] < 0) throw DomainError("approx_loglik: negative type count");
        if (type.counts[l] == 0) continue;
        if (!(p[l] > 0.0)) return kLogLikNegInf;
        s += type.counts[l] * std::log(p[l]);
    }
    return s;
}

inline double approx_loglik(const Channel& ch, const Quantizer1D& q, const TypeIndex& type, double theta) {
    return approx_loglik_from_probs(bin_probs_and_dtheta(ch, q, theta).p, type);
}

/// Argmax of the approximate log-likelihood; ties go to the smaller index,
/// and if every candidate is -∞ the result is 0.
inline std::size_t ml_detect(const Channel& ch, const Quantizer1D& q, const TypeIndex& type,
                             const std::vector<double>& constellation) {
    if (constellation.empty()) throw ContractError("ml_detect: empty constellation");
    std::size_t best = 0;
    double best_ll = kLogLikNegInf;
    for (std::size_t j = 0; j < constellation.size(); ++j) {
        const double ll = approx_loglik(ch, q, type, constellation[j]);
        if (ll > best_ll) {
            best_ll = ll;
            best = j;
        }
    }
    return best;
}

struct ScalingPoint {
    std::size_t L;
    double r;
    double e_L;
};

struct ScalingStudy {
    std::vector<ScalingPoint> points;  ///< every requested L, including dropped ones
    double slope = 0.0;                ///< least-squares slope of ln e_L on ln L
    std::vector<std::string> warnings;
};

/// Least-squares slope of y on x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

inline double gaussian_tail_radius(std::size_t L) { return 3.0 + std::sqrt(std::log(static_cast<double>(L))); }

inline ScalingStudy scaling_study(const Channel& ch, const std::function<double(std::size_t)>& r_schedule,
                                  const std::vector<std::size_t>& L_list, std::size_t grid_size = 1025) {
    if (L_list.size() < 4) throw DomainError("scaling_study: need at least 4 values of L");
    const double ratio = static_cast<double>(L_list[1]) / static_cast<double>(L_list[0]);
    if (!(ratio > 1.0)) throw DomainError("scaling_study: L_list must be increasing");
    for (std::size_t i = 1; i < L_list.size(); ++i) {
        const double ri = static_cast<double>(L_list[i]) / static_cast<double>(L_list[i - 1]);
        if (std::abs(ri - ratio) > 1e-12 * ratio) throw DomainError("scaling_study: L_list must be geometric");
    }
    ScalingStudy out;
    std::vector<double> lx, ly;
    for (std::size_t L : L_list) {
        const double r = r_schedule(L);
        const double e = capacity_loss_eL(ch, build_quantizer(r, L), grid_size);
        out.points.push_back({L, r, e});
        if (!(e >= 1e-15) || !std::isfinite(e)) {
            out.warnings.push_back("scaling_study: dropped L = " + std::to_string(L) + " (e_L = " +
                                   std::to_string(e) + ")");
            continue;
        }
        lx.push_back(std::log(static_cast<double>(L)));
        ly.push_back(std::log(e));
    }
    if (lx.size() < 2) throw NumericalError("scaling_study: fewer than two usable e_L values");
    out.slope = ls_slope(lx, ly);
    return out;
}

}  // namespace jcap
