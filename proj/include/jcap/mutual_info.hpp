#pragma once

// Exact mutual information I(X; Y^{n_r}) for finite-output channels with n_r
// i.i.d. antennas. The output type (histogram of the n_r symbols) is a
// sufficient statistic with a multinomial law, so I(X; Y^{n_r}) = I(X; T).
// All mixtures are accumulated in log space with a max shift.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "jcap/channels.hpp"
#include "jcap/errors.hpp"
#include "jcap/jeffreys.hpp"
#include "jcap/quad.hpp"
#include "jcap/specfun.hpp"

namespace jcap {

struct DiscreteInput {
    std::vector<double> points;
    std::vector<double> probs;

    static DiscreteInput uniform(std::vector<double> points) {
        const auto n = points.size();
        return {std::move(points), std::vector<double>(n, 1.0 / static_cast<double>(n))};
    }

    void validate() const {
        if (points.empty() || points.size() != probs.size()) {
            throw DomainError("DiscreteInput: points and probs must be nonempty and equal length");
        }
        double s = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0)) throw DomainError("DiscreteInput: negative probability");
            s += p;
        }
        if (std::abs(s - 1.0) > 1e-12) throw DomainError("DiscreteInput: probabilities must sum to 1");
    }
};

struct TypeIndex {
    std::vector<int> counts;

    int total() const {
        int n = 0;
        for (int c : counts) n += c;
        return n;
    }
};

inline constexpr double kDefaultMiBudget = 1e8;

/// C(n+L-1, L-1): number of types of n symbols over an alphabet of size L.
inline double composition_count(int n, int L) {
    if (n < 0 || L < 1) throw DomainError("composition_count: need n >= 0, L >= 1");
    return std::round(std::exp(specfun::log_gamma(n + L) - specfun::log_gamma(n + 1.0) - specfun::log_gamma(L)));
}

/// Visit every composition of n into L nonnegative parts in colexicographic
/// order without materializing the list.
template <class F>
void for_each_composition(int n, int L, F&& visit) {
    if (n < 0 || L < 1) throw DomainError("for_each_composition: need n >= 0, L >= 1");
    std::vector<int> c(static_cast<std::size_t>(L), 0);
    c[0] = n;
    while (true) {
        visit(static_cast<const std::vector<int>&>(c));
        // Successor: move one unit from the first nonzero part into the next
        // part and sweep the remainder back to the front.
        std::size_t i = 0;
        while (i + 1 < c.size() && c[i] == 0) ++i;
        if (i + 1 >= c.size()) return;
        const int v = c[i];
        c[i] = 0;
        c[i + 1] += 1;
        c[0] = v - 1;
    }
}

namespace detail {

inline double log_sum_exp(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (m == -std::numeric_limits<double>::infinity()) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

/// ln of each channel output probability for every input point (M × L).
inline std::vector<std::vector<double>> log_output_pmfs(const Channel& ch, const DiscreteInput& in) {
    std::vector<std::vector<double>> lp;
    lp.reserve(in.points.size());
    for (double x : in.points) {
        auto p = ch.output_pmf(x);
        for (double& v : p) v = (v > 0.0) ? std::log(v) : -std::numeric_limits<double>::infinity();
        lp.push_back(std::move(p));
    }
    return lp;
}

/// ln P(T = t | x) for the multinomial type t.
inline double log_type_prob(const std::vector<int>& t, const std::vector<double>& log_p, double log_multinom) {
    double s = log_multinom;
    for (std::size_t l = 0; l < t.size(); ++l) {
        if (t[l] == 0) continue;
        if (log_p[l] == -std::numeric_limits<double>::infinity()) return log_p[l];
        s += t[l] * log_p[l];
    }
    return s;
}

inline double log_multinomial(const std::vector<int>& t, double log_n_fact) {
    double s = log_n_fact;
    for (int c : t) s -= specfun::log_gamma(c + 1.0);
    return s;
}

inline void check_budget(int n_r, std::size_t L, std::size_t M, double budget) {
    const double evals = composition_count(n_r, static_cast<int>(L)) * static_cast<double>(M);
    if (evals > budget) {
        throw ResourceError("mutual information: " + std::to_string(evals) +
                            " type-likelihood evaluations exceed the budget of " + std::to_string(budget) +
                            "; reduce L or n_r (Monte-Carlo estimation is not provided)");
    }
}

}  // namespace detail

/// I(X; T) in bits by exhaustive type enumeration.
inline double mi_finite_output(const Channel& ch, const DiscreteInput& in, int n_r, double budget = kDefaultMiBudget) {
    in.validate();
    if (n_r < 1) throw DomainError("mi_finite_output: n_r must be >= 1");
    const std::size_t L = ch.output_size();
    const std::size_t M = in.points.size();
    detail::check_budget(n_r, L, M, budget);
    const auto log_p = detail::log_output_pmfs(ch, in);
    std::vector<double> log_w(M);
    for (std::size_t j = 0; j < M; ++j) {
        log_w[j] = in.probs[j] > 0.0 ? std::log(in.probs[j]) : -std::numeric_limits<double>::infinity();
    }
    const double log_n_fact = specfun::log_gamma(n_r + 1.0);
    std::vector<double> lt(M);
    std::vector<double> joint(M);
    double mi = 0.0;  // nats
    for_each_composition(n_r, static_cast<int>(L), [&](const std::vector<int>& t) {
        const double lm = detail::log_multinomial(t, log_n_fact);
        for (std::size_t j = 0; j < M; ++j) {
            lt[j] = detail::log_type_prob(t, log_p[j], lm);
            joint[j] = log_w[j] + lt[j];
        }
        const double log_mix = detail::log_sum_exp(joint);
        if (log_mix == -std::numeric_limits<double>::infinity()) return;
        for (std::size_t j = 0; j < M; ++j) {
            if (joint[j] == -std::numeric_limits<double>::infinity()) continue;
            mi += std::exp(joint[j]) * (lt[j] - log_mix);
        }
    });
    return std::max(0.0, mi / std::numbers::ln2);
}

/// Binary-output special case computed directly from binomial counts:
/// k = number of "+1" outputs among n_r. An independent code path for L = 2.
inline double mi_binary_output(const Channel& ch, const DiscreteInput& in, int n_r) {
    in.validate();
    if (ch.output_size() != 2) throw ContractError("mi_binary_output: channel must have two outputs");
    if (n_r < 1) throw DomainError("mi_binary_output: n_r must be >= 1");
    const std::size_t M = in.points.size();
    std::vector<double> lq(M), lq1(M);  // ln P(y = second), ln P(y = first)
    for (std::size_t j = 0; j < M; ++j) {
        const auto p = ch.output_pmf(in.points[j]);
        lq1[j] = std::log(p[0]);
        lq[j] = std::log(p[1]);
    }
    double mi = 0.0;
    std::vector<double> terms(M);
    std::vector<double> lk(M);
    for (int k = 0; k <= n_r; ++k) {
        const double lbin =
            specfun::log_gamma(n_r + 1.0) - specfun::log_gamma(k + 1.0) - specfun::log_gamma(n_r - k + 1.0);
        for (std::size_t j = 0; j < M; ++j) {
            const double a = (k == 0) ? 0.0 : k * lq[j];
            const double b = (k == n_r) ? 0.0 : (n_r - k) * lq1[j];
            lk[j] = lbin + a + b;
            terms[j] = std::log(in.probs[j]) + lk[j];
        }
        const double lm = detail::log_sum_exp(terms);
        for (std::size_t j = 0; j < M; ++j) {
            if (std::isinf(terms[j])) continue;
            mi += std::exp(terms[j]) * (lk[j] - lm);
        }
    }
    return std::max(0.0, mi / std::numbers::ln2);
}

/// Discretize a one-dimensional prior at `grid_size` midpoints of Θ with
/// weights proportional to the density (midpoint rule), then compute the
/// exact MI of the induced discrete input.
inline DiscreteInput discretize_prior(const TiltedPrior& prior, std::size_t grid_size) {
    if (prior.channel().space().shape != ParameterSpace::Shape::Interval) {
        throw UnsupportedError("discretize_prior: needs a one-dimensional prior");
    }
    if (grid_size < 1) throw DomainError("discretize_prior: grid_size must be >= 1");
    DiscreteInput in;
    double total = 0.0;
    for (std::size_t i = 0; i < grid_size; ++i) {
        const double t = prior.lo() + (prior.hi() - prior.lo()) * (static_cast<double>(i) + 0.5) /
                                          static_cast<double>(grid_size);
        const double w = prior.density(t);
        in.points.push_back(t);
        in.probs.push_back(w);
        total += w;
    }
    if (!(total > 0.0)) throw DegenerateChannelError("discretize_prior: prior vanishes on the grid");
    for (double& p : in.probs) p /= total;
    return in;
}

inline double mi_prior_grid(const Channel& ch, const TiltedPrior& prior, std::size_t grid_size, int n_r,
                            double budget = kDefaultMiBudget) {
    return mi_finite_output(ch, discretize_prior(prior, grid_size), n_r, budget);
}

struct BlahutArimotoResult {
    DiscreteInput input;
    double bits = 0.0;               ///< I(X; T) at the returned pmf
    double gap = 0.0;                ///< capacity upper bound minus lower bound
    int iterations = 0;
    std::vector<double> gap_history; ///< nonincreasing
};

/// Blahut-Arimoto over a fixed set of input points on the type-likelihood
/// matrix. Lower bound I(p_k), upper bound max_j D(P(·|x_j) ‖ q_k); the gap
/// reported is (best upper so far) - (best lower so far).
inline BlahutArimotoResult blahut_arimoto(const Channel& ch, const std::vector<double>& points, int n_r,
                                          double tol = 1e-9, int max_iter = 10000,
                                          double budget = kDefaultMiBudget) {
    if (points.empty()) throw DomainError("blahut_arimoto: need at least one input point");
    if (n_r < 1) throw DomainError("blahut_arimoto: n_r must be >= 1");
    if (!(tol > 0.0) || max_iter < 1) throw DomainError("blahut_arimoto: need tol > 0 and max_iter >= 1");
    const std::size_t M = points.size();
    const std::size_t L = ch.output_size();
    detail::check_budget(n_r, L, M, budget);

    auto in = DiscreteInput::uniform(points);
    const auto log_p = detail::log_output_pmfs(ch, in);
    const double log_n_fact = specfun::log_gamma(n_r + 1.0);

    // Materialize ln P(t | x_j), types with probability zero under every
    // input are dropped.
    std::vector<std::vector<double>> lw;  // T × M
    for_each_composition(n_r, static_cast<int>(L), [&](const std::vector<int>& t) {
        const double lm = detail::log_multinomial(t, log_n_fact);
        std::vector<double> row(M);
        bool any = false;
        for (std::size_t j = 0; j < M; ++j) {
            row[j] = detail::log_type_prob(t, log_p[j], lm);
            any = any || row[j] > -std::numeric_limits<double>::infinity();
        }
        if (any) lw.push_back(std::move(row));
    });

    BlahutArimotoResult res;
    std::vector<double> p(M, 1.0 / static_cast<double>(M));
    std::vector<double> d(M);
    std::vector<double> tmp(M);
    double best_upper = std::numeric_limits<double>::infinity();
    double best_lower = -std::numeric_limits<double>::infinity();
    const double ninf = -std::numeric_limits<double>::infinity();

    for (int it = 0;; ++it) {
        // D_j = Σ_t P(t|x_j) ln(P(t|x_j)/q(t)), q = Σ_j p_j P(t|x_j).
        std::fill(d.begin(), d.end(), 0.0);
        for (const auto& row : lw) {
            for (std::size_t j = 0; j < M; ++j) tmp[j] = (p[j] > 0.0 ? std::log(p[j]) : ninf) + row[j];
            const double lq = detail::log_sum_exp(tmp);
            for (std::size_t j = 0; j < M; ++j) {
                if (row[j] == ninf) continue;
                d[j] += std::exp(row[j]) * (row[j] - lq);
            }
        }
        double lower = 0.0;
        double upper = ninf;
        for (std::size_t j = 0; j < M; ++j) {
            lower += p[j] * d[j];
            upper = std::max(upper, d[j]);
        }
        lower /= std::numbers::ln2;
        upper /= std::numbers::ln2;
        best_upper = std::min(best_upper, upper);
        best_lower = std::max(best_lower, lower);
        const double gap = std::max(0.0, best_upper - best_lower);
        res.gap_history.push_back(gap);
        res.bits = std::max(0.0, lower);
        res.gap = gap;
        res.iterations = it;
        in.probs = p;
        if (gap < tol) break;
        if (it >= max_iter) {
            throw ConvergenceError("blahut_arimoto: gap " + std::to_string(gap) + " bits after " +
                                       std::to_string(max_iter) + " iterations",
                                   gap);
        }
        // p_j ← p_j exp(D_j) / Σ.
        double dmax = ninf;
        for (std::size_t j = 0; j < M; ++j) dmax = std::max(dmax, d[j]);
        double s = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            p[j] *= std::exp(d[j] - dmax);
            s += p[j];
        }
        for (double& v : p) v /= s;
    }
    res.input = in;
    return res;
}

/// I(θ; ȳ) in bits for real AWGN with n_r antennas, using the sufficient
/// statistic ȳ ~ N(θ, 1/n_r): h(ȳ) - (1/2)log2(2πe/n_r), with h(ȳ) by
/// quadrature of the Gaussian mixture.
inline double mi_gaussian_sufficient(const DiscreteInput& in, int n_r) {
    in.validate();
    if (n_r < 1) throw DomainError("mi_gaussian_sufficient: n_r must be >= 1");
    std::vector<std::pair<double, double>> pts;  // (point, prob), positive probs only
    for (std::size_t j = 0; j < in.points.size(); ++j) {
        if (in.probs[j] > 0.0) pts.emplace_back(in.points[j], in.probs[j]);
    }
    std::sort(pts.begin(), pts.end());
    if (pts.size() == 1) return 0.0;
    const double sigma = 1.0 / std::sqrt(static_cast<double>(n_r));
    const double window = 40.0 * sigma;  // φ(40) underflows relative to the nearest term
    const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi) - std::log(sigma);
    std::vector<double> terms;
    auto log_mix = [&](double y) {
        terms.clear();
        auto first = std::lower_bound(pts.begin(), pts.end(), std::make_pair(y - window, -1.0));
        for (auto it = first; it != pts.end() && it->first <= y + window; ++it) {
            const double z = (y - it->first) / sigma;
            terms.push_back(std::log(it->second) + log_norm - 0.5 * z * z);
        }
        if (terms.empty()) return -std::numeric_limits<double>::infinity();
        return detail::log_sum_exp(terms);
    };
    auto integrand = [&](double y) {
        const double lm = log_mix(y);
        if (lm == -std::numeric_limits<double>::infinity()) return 0.0;
        return -std::exp(lm) * lm;
    };
    quad::QuadRule rule;
    rule.abs_tol = 1e-13;
    rule.rel_tol = 1e-11;
    rule.max_subdivisions = std::size_t{1} << 18;
    rule.initial_panels = std::max<std::size_t>(8, std::min<std::size_t>(pts.size() * 2, 4096));
    const double a = pts.front().first - 12.0 * sigma;
    const double b = pts.back().first + 12.0 * sigma;
    const double h_nats = quad::integrate_interval(integrand, a, b, rule).value;
    const double cond_nats = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * sigma * sigma);
    return std::max(0.0, (h_nats - cond_nats) / std::numbers::ln2);
}

}  // namespace jcap
