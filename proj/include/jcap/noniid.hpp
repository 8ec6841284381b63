#pragma once

// Fisher-information rate for a constant signal in stationary correlated
// Gaussian noise: J_n = (1/n)·1ᵀΣ_n⁻¹1 with Σ_n the Toeplitz autocovariance,
// and its limit 1/Σ_k γ(k).

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jcap/channels.hpp"
#include "jcap/errors.hpp"

namespace jcap {

struct Autocovariance {
    std::function<double(long)> gamma;  ///< γ(k), even in k
    std::optional<double> series_sum;   ///< Σ_k γ(k) over all integers k, if known

    double operator()(long k) const { return gamma(k < 0 ? -k : k); }

    static Autocovariance white(double variance = 1.0) {
        if (!(variance > 0.0)) throw DomainError("Autocovariance::white: variance must be > 0");
        return {[variance](long k) { return k == 0 ? variance : 0.0; }, variance};
    }

    /// γ(k) = variance·ρ^{|k|}.
    static Autocovariance ar1(double rho, double variance = 1.0) {
        if (!(std::abs(rho) < 1.0)) throw DomainError("Autocovariance::ar1: need |rho| < 1");
        if (!(variance > 0.0)) throw DomainError("Autocovariance::ar1: variance must be > 0");
        return {[rho, variance](long k) { return variance * std::pow(rho, static_cast<double>(k < 0 ? -k : k)); },
                variance * (1.0 + rho) / (1.0 - rho)};
    }

    Autocovariance scaled(double c) const {
        if (!(c > 0.0)) throw DomainError("Autocovariance::scaled: c must be > 0");
        std::optional<double> s;
        if (series_sum) s = c * *series_sum;
        return {[g = gamma, c](long k) { return c * g(k); }, s};
    }
};

namespace detail {

inline std::vector<double> toeplitz_column(const Autocovariance& acov, std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k) t[k] = acov(static_cast<long>(k));
    if (!(t[0] > 0.0)) throw DomainError("fisher_rate: gamma(0) must be > 0");
    return t;
}

}  // namespace detail

/// Solve T x = b for the symmetric Toeplitz T with first column t (Levinson).
/// Throws DomainError if T is not positive definite.
inline std::vector<double> levinson_solve(const std::vector<double>& t, const std::vector<double>& b) {
    const std::size_t n = t.size();
    if (n == 0 || b.size() != n) throw ContractError("levinson_solve: size mismatch");
    if (!(t[0] > 0.0)) throw DomainError("levinson_solve: matrix is not positive definite");
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = t[k] / t[0];
    std::vector<double> x(n), y(n), tmp(n);
    x[0] = b[0] / t[0];
    if (n == 1) return x;
    y[0] = -r[1];
    double beta = 1.0;
    double alpha = -r[1];
    for (std::size_t k = 1; k < n; ++k) {
        beta *= (1.0 - alpha * alpha);
        if (!(beta > 0.0) || !std::isfinite(beta)) {
            throw DomainError("levinson_solve: matrix is not positive definite (order " + std::to_string(k + 1) + ")");
        }
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) s += r[i + 1] * x[k - 1 - i];
        const double mu = (b[k] / t[0] - s) / beta;
        for (std::size_t i = 0; i < k; ++i) tmp[i] = x[i] + mu * y[k - 1 - i];
        for (std::size_t i = 0; i < k; ++i) x[i] = tmp[i];
        x[k] = mu;
        if (k + 1 < n) {
            double sy = 0.0;
            for (std::size_t i = 0; i < k; ++i) sy += r[i + 1] * y[k - 1 - i];
            alpha = -(r[k + 1] + sy) / beta;
            for (std::size_t i = 0; i < k; ++i) tmp[i] = y[i] + alpha * y[k - 1 - i];
            for (std::size_t i = 0; i < k; ++i) y[i] = tmp[i];
            y[k] = alpha;
        }
    }
    return x;
}

/// (1/n)·1ᵀΣ_n⁻¹1 via the Levinson recursion.
inline double fisher_rate_finite(const Autocovariance& acov, std::size_t n) {
    if (n < 1) throw DomainError("fisher_rate_finite: n must be >= 1");
    const auto x = levinson_solve(detail::toeplitz_column(acov, n), std::vector<double>(n, 1.0));
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(n);
}

/// Same quantity from a dense Cholesky factorization; O(n²) memory.
inline double fisher_rate_dense(const Autocovariance& acov, std::size_t n) {
    if (n < 1) throw DomainError("fisher_rate_dense: n must be >= 1");
    const auto t = detail::toeplitz_column(acov, n);
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd S(N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = 0; j < N; ++j) S(i, j) = t[static_cast<std::size_t>(i > j ? i - j : j - i)];
    }
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) throw DomainError("fisher_rate_dense: matrix is not positive definite");
    const Eigen::VectorXd x = llt.solve(Eigen::VectorXd::Ones(N));
    return x.sum() / static_cast<double>(n);
}

/// 1/Σ_k γ(k); the series is summed numerically when no closed form is given.
inline double fisher_rate_limit(const Autocovariance& acov) {
    double total = 0.0;
    if (acov.series_sum) {
        total = *acov.series_sum;
    } else {
        total = acov(0);
        int small = 0;
        constexpr long kMaxTerms = 10'000'000;
        long k = 1;
        for (; k < kMaxTerms && small < 64; ++k) {
            const double g = acov(k);
            total += 2.0 * g;
            small = (std::abs(g) <= 1e-17 * std::abs(total)) ? small + 1 : 0;
        }
        if (k >= kMaxTerms) throw DomainError("fisher_rate_limit: autocovariance does not appear summable");
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw DomainError("fisher_rate_limit: sum of autocovariances must be finite and > 0");
    }
    return 1.0 / total;
}

/// Scalar channel with the same Fisher information per antenna as n
/// correlated observations: AWGN with noise variance 1/J_n.
inline Channel equivalent_awgn(const Autocovariance& acov, std::size_t n, double A) {
    return Channel::awgn(A, 1.0 / fisher_rate_finite(acov, n));
}

}  // namespace jcap
