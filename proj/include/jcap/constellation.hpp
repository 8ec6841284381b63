#pragma once

// Finite input sets shaped after the tilted Jeffreys prior.
//
// Jeffreys constellation: c_P·F⁻¹(u) on the midpoint grid u_i = (2i-1)/(2M).
// Approximate version: F replaced by the closed-form cdf of a polynomial
// density fitted to the prior by a barrier-regularized Newton method.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "jcap/channels.hpp"
#include "jcap/errors.hpp"
#include "jcap/jeffreys.hpp"

namespace jcap {

struct Constellation {
    Eigen::MatrixXd points;       ///< M × dim, one input per row
    std::vector<double> probs;
    double avg_power = 0.0;       ///< Σ p_i ‖x_i‖²
    double peak_power = 0.0;      ///< max ‖x_i‖²
    double scale = 1.0;           ///< c_P applied to the raw points

    std::size_t size() const { return probs.size(); }
    int dim() const { return static_cast<int>(points.cols()); }

    std::vector<double> scalar_points() const {
        if (points.cols() != 1) throw ContractError("constellation is not scalar");
        return {points.data(), points.data() + points.rows()};
    }
};

/// Midpoint u-grid (2i-1)/(2M), i = 1..M.
inline std::vector<double> midpoint_grid(std::size_t M) {
    if (M < 1) throw DomainError("constellation size must be >= 1");
    std::vector<double> u(M);
    for (std::size_t i = 0; i < M; ++i) {
        u[i] = (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(M));
    }
    return u;
}

namespace detail {

/// Uniform probabilities, c_P = min(1, √(P / mean ‖x‖²)) applied to the rows.
inline Constellation finalize_uniform(Eigen::MatrixXd raw, double P) {
    if (!(P > 0.0)) throw DomainError("constellation: P must be > 0");
    const auto M = static_cast<std::size_t>(raw.rows());
    Constellation c;
    c.probs.assign(M, 1.0 / static_cast<double>(M));
    const double raw_power = raw.rowwise().squaredNorm().mean();
    c.scale = raw_power > 0.0 ? std::min(1.0, std::sqrt(P / raw_power)) : 1.0;
    c.points = c.scale * raw;
    c.avg_power = c.points.rowwise().squaredNorm().mean();
    c.peak_power = c.points.rowwise().squaredNorm().maxCoeff();
    return c;
}

inline Eigen::MatrixXd column(const std::vector<double>& v) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
    return m;
}

inline void require_scalar(const Channel& ch, const char* op) {
    if (ch.space().shape != ParameterSpace::Shape::Interval) {
        throw UnsupportedError(std::string(op) + ": needs a one-dimensional parameter space (use the radial design for isotropic channels)");
    }
}

}  // namespace detail

/// X_J = {c_P F⁻¹(u) : u ∈ S} for the prior at λ*.
inline Constellation jeffreys_constellation(const Channel& ch, double P, std::size_t M) {
    detail::require_scalar(ch, "jeffreys_constellation");
    if (M < 2) throw DomainError("jeffreys_constellation: M must be >= 2");
    const auto sol = solve_lambda_star(ch, P);
    const TiltedPrior w(ch, sol.lambda_star);
    std::vector<double> raw;
    for (double u : midpoint_grid(M)) raw.push_back(w.cdf_inverse(u));
    return detail::finalize_uniform(detail::column(raw), P);
}

/// M equally spaced points covering Θ, scaled by the same c_P rule.
inline Constellation pam_constellation(const Channel& ch, double P, std::size_t M) {
    detail::require_scalar(ch, "pam_constellation");
    if (M < 2) throw DomainError("pam_constellation: M must be >= 2");
    const double lo = ch.space().lo;
    const double hi = ch.space().hi;
    std::vector<double> raw(M);
    for (std::size_t i = 0; i < M; ++i) {
        raw[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(M - 1);
    }
    return detail::finalize_uniform(detail::column(raw), P);
}

/// Isotropic radial design: radii F_r⁻¹(u) times each supplied direction.
inline Constellation radial_constellation_isotropic(const Channel& ch, double P, std::size_t radial_levels,
                                                    const std::vector<Eigen::VectorXd>& directions) {
    const auto& sp = ch.space();
    if (sp.shape != ParameterSpace::Shape::Ball || !sp.isotropic) {
        throw UnsupportedError("radial_constellation_isotropic: channel is not isotropic");
    }
    if (directions.empty()) throw DomainError("radial_constellation_isotropic: need at least one direction");
    if (radial_levels < 1) throw DomainError("radial_constellation_isotropic: need at least one radial level");
    for (const auto& d : directions) {
        if (d.size() != sp.dim) throw DomainError("radial_constellation_isotropic: direction has wrong dimension");
        if (std::abs(d.norm() - 1.0) > 1e-12) {
            throw DomainError("radial_constellation_isotropic: directions must be unit vectors");
        }
    }
    const auto sol = solve_lambda_star(ch, P);
    const TiltedPrior w(ch, sol.lambda_star);
    Eigen::MatrixXd raw(static_cast<Eigen::Index>(radial_levels * directions.size()), sp.dim);
    Eigen::Index row = 0;
    for (double u : midpoint_grid(radial_levels)) {
        const double r = w.cdf_inverse(u);
        for (const auto& d : directions) raw.row(row++) = r * d.transpose();
    }
    return detail::finalize_uniform(std::move(raw), P);
}

// ---------------------------------------------------------------------------
// Polynomial density fit.

/// f(θ) = Σ_i η_i s^i with s = (θ - mid)/half on [lo, hi]. Internally the
/// coefficients live in the normalized variable s; monomial_coeffs() returns
/// ξ with f(θ) = Σ ξ_i θ^i.
class PolyDensity {
public:
    PolyDensity(double lo, double hi, std::vector<double> eta) : lo_(lo), hi_(hi), eta_(std::move(eta)) {
        if (!(lo < hi)) throw DomainError("PolyDensity: need lo < hi");
        if (eta_.empty()) throw DomainError("PolyDensity: need at least the constant coefficient");
    }

    /// Uniform density on [lo, hi].
    static PolyDensity uniform(double lo, double hi, int degree = 0) {
        std::vector<double> eta(static_cast<std::size_t>(degree) + 1, 0.0);
        eta[0] = 1.0 / (hi - lo);
        return {lo, hi, eta};
    }

    int degree() const { return static_cast<int>(eta_.size()) - 1; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::vector<double>& normalized_coeffs() const { return eta_; }

    double to_s(double theta) const { return (theta - mid()) / half(); }

    double operator()(double theta) const {
        const double s = to_s(theta);
        double acc = 0.0;
        for (auto it = eta_.rbegin(); it != eta_.rend(); ++it) acc = acc * s + *it;
        return acc;
    }

    /// F(θ) = half·Σ η_i (s^{i+1} - (-1)^{i+1})/(i+1), closed form.
    double cdf(double theta) const {
        if (std::isnan(theta)) throw DomainError("poly cdf: argument is NaN");
        if (theta <= lo_) return 0.0;
        if (theta >= hi_) return 1.0;
        const double s = to_s(theta);
        double acc = 0.0;
        double sp = s;
        double mp = -1.0;
        for (std::size_t i = 0; i < eta_.size(); ++i) {
            acc += eta_[i] * (sp - mp) / static_cast<double>(i + 1);
            sp *= s;
            mp *= -1.0;
        }
        return half() * acc;
    }

    /// Bisection to |F(θ) - u| < 1e-12; O(d·log(1/ε)) evaluations.
    double cdf_inverse(double u) const {
        if (!(u >= 0.0 && u <= 1.0)) throw DomainError("poly cdf inverse: u must lie in [0, 1]");
        if (u == 0.0) return lo_;
        if (u == 1.0) return hi_;
        double a = lo_;
        double b = hi_;
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (a + b);
            const double f = cdf(m);
            if (std::abs(f - u) < 1e-12) return m;
            if (f < u) {
                a = m;
            } else {
                b = m;
            }
            if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(m))) break;
        }
        return 0.5 * (a + b);
    }

    /// ξ_i in f(θ) = Σ ξ_i θ^i, by binomial expansion of ((θ - mid)/half)^j.
    std::vector<double> monomial_coeffs() const {
        const std::size_t n = eta_.size();
        std::vector<double> xi(n, 0.0);
        const double c = -mid() / half();
        const double k = 1.0 / half();
        for (std::size_t j = 0; j < n; ++j) {
            // (kθ + c)^j = Σ_i C(j,i) k^i θ^i c^{j-i}
            double binom = 1.0;
            for (std::size_t i = 0; i <= j; ++i) {
                xi[i] += eta_[j] * binom * std::pow(k, static_cast<double>(i)) *
                         std::pow(c, static_cast<double>(j - i));
                binom = binom * static_cast<double>(j - i) / static_cast<double>(i + 1);
            }
        }
        return xi;
    }

private:
    double mid() const { return 0.5 * (lo_ + hi_); }
    double half() const { return 0.5 * (hi_ - lo_); }

    double lo_;
    double hi_;
    std::vector<double> eta_;
};

struct BarrierSchedule {
    double gamma_0 = 1e-2;
    double decay = 0.1;
    double gamma_min = 1e-8;
    double newton_tol = 1e-9;
    int max_newton = 2000;

    void validate() const {
        if (!(gamma_0 > gamma_min && gamma_min > 0.0)) {
            throw DomainError("BarrierSchedule: need gamma_0 > gamma_min > 0");
        }
        if (!(decay > 0.0 && decay < 1.0)) throw DomainError("BarrierSchedule: decay must lie in (0, 1)");
        if (!(newton_tol > 0.0)) throw DomainError("BarrierSchedule: newton_tol must be > 0");
        if (max_newton < 1) throw DomainError("BarrierSchedule: max_newton must be >= 1");
    }

    std::vector<double> gammas() const {
        validate();
        std::vector<double> g;
        for (double v = gamma_0; v >= gamma_min * (1.0 - 1e-12); v *= decay) g.push_back(v);
        return g;
    }
};

/// D(f‖w) + γ·D(1‖f) on a fixed composite midpoint grid, as a function of
/// the free coefficients η_1..η_d (η_0 eliminated by normalization). The
/// barrier also includes the two endpoints of Θ with weight h/2 each.
class PolyFitProblem {
public:
    static constexpr std::size_t kGridPoints = 4097;

    PolyFitProblem(const TiltedPrior& target, int degree) : lo_(target.lo()), hi_(target.hi()), degree_(degree) {
        if (target.channel().space().shape != ParameterSpace::Shape::Interval) {
            throw UnsupportedError("fit_poly_density: needs a one-dimensional prior");
        }
        if (degree < 0) throw DomainError("fit_poly_density: degree must be >= 0");
        const std::size_t n = kGridPoints;
        const double width = hi_ - lo_;
        h_ = width / static_cast<double>(n);
        s_.resize(n);
        log_w_.resize(n);
        const double log_z = std::log(target.normalization());
        const double lambda_ln2 = target.lambda() * std::numbers::ln2;
        for (std::size_t k = 0; k < n; ++k) {
            const double theta = lo_ + (static_cast<double>(k) + 0.5) * h_;
            s_[k] = (theta - 0.5 * (lo_ + hi_)) / (0.5 * width);
            const double sq = target.channel().sqrt_det_fisher(theta);
            if (!(sq > 0.0)) {
                throw DomainError("fit_poly_density: target density vanishes inside Θ at θ = " + std::to_string(theta));
            }
            log_w_[k] = -lambda_ln2 * target.channel().cost(theta) + std::log(sq) - log_z;
        }
        // Basis b_i(s) = P_i(s), Legendre, i >= 1: each integrates to zero on
        // [-1, 1], so f = 1/W + Σ η_i P_i(s) is normalized for every η. The
        // orthogonal basis keeps the Hessian well conditioned when f gets
        // small near the edges of Θ.
        basis_.resize(static_cast<Eigen::Index>(n), degree_);
        for (std::size_t k = 0; k < n; ++k) {
            double pm = 1.0;
            double p = s_[k];
            for (int i = 1; i <= degree_; ++i) {
                basis_(static_cast<Eigen::Index>(k), i - 1) = p;
                const double next = ((2.0 * i + 1.0) * s_[k] * p - i * pm) / (i + 1.0);
                pm = p;
                p = next;
            }
        }
        // P_i(±1) = (±1)^i. The endpoints carry barrier weight h/2 so the
        // barrier keeps f positive on all of Θ, not only on the grid.
        edge_basis_.resize(2, degree_);
        for (int i = 1; i <= degree_; ++i) {
            edge_basis_(0, i - 1) = (i % 2 == 0) ? 1.0 : -1.0;
            edge_basis_(1, i - 1) = 1.0;
        }
    }

    int dim() const { return degree_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

    /// f on the grid for free coefficients η_1..η_d.
    Eigen::VectorXd grid_density(const Eigen::VectorXd& eta) const {
        Eigen::VectorXd f = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(s_.size()), 1.0 / (hi_ - lo_));
        if (degree_ > 0) f += basis_ * eta;
        return f;
    }

    /// f at θ = lo and θ = hi.
    Eigen::Vector2d edge_density(const Eigen::VectorXd& eta) const {
        Eigen::Vector2d f = Eigen::Vector2d::Constant(1.0 / (hi_ - lo_));
        if (degree_ > 0) f += edge_basis_ * eta;
        return f;
    }

    /// Positive at every grid node and at both endpoints.
    bool feasible(const Eigen::VectorXd& eta) const {
        return grid_density(eta).minCoeff() > 0.0 && edge_density(eta).minCoeff() > 0.0;
    }

    /// D(f‖w) in nats on the grid.
    double divergence(const Eigen::VectorXd& eta) const {
        const auto f = grid_density(eta);
        double acc = 0.0;
        for (Eigen::Index k = 0; k < f.size(); ++k) {
            acc += f(k) * (std::log(f(k)) - log_w_[static_cast<std::size_t>(k)]);
        }
        return h_ * acc;
    }

    double objective(const Eigen::VectorXd& eta, double gamma) const {
        if (!feasible(eta)) return std::numeric_limits<double>::infinity();
        const auto f = grid_density(eta);
        const auto fe = edge_density(eta);
        const double width = hi_ - lo_;
        double kl = 0.0;
        double barrier = 0.0;
        for (Eigen::Index k = 0; k < f.size(); ++k) {
            kl += f(k) * (std::log(f(k)) - log_w_[static_cast<std::size_t>(k)]);
            barrier -= std::log(width * f(k));
        }
        barrier -= 0.5 * (std::log(width * fe(0)) + std::log(width * fe(1)));
        return h_ * kl + gamma * (h_ / width) * barrier;
    }

    /// ∫ b ψ with ψ = ln f + 1 - ln w - γ/(W f).
    Eigen::VectorXd gradient(const Eigen::VectorXd& eta, double gamma) const {
        const auto f = grid_density(eta);
        const double width = hi_ - lo_;
        Eigen::VectorXd psi(f.size());
        for (Eigen::Index k = 0; k < f.size(); ++k) {
            psi(k) = std::log(f(k)) + 1.0 - log_w_[static_cast<std::size_t>(k)] - gamma / (width * f(k));
        }
        const auto fe = edge_density(eta);
        const Eigen::Vector2d psi_e(-0.5 * gamma / (width * fe(0)), -0.5 * gamma / (width * fe(1)));
        return h_ * (basis_.transpose() * psi + edge_basis_.transpose() * psi_e);
    }

    /// ∫ b bᵀ (1/f + γ/(W f²)).
    Eigen::MatrixXd hessian(const Eigen::VectorXd& eta, double gamma) const {
        const auto f = grid_density(eta);
        const double width = hi_ - lo_;
        Eigen::VectorXd wt(f.size());
        for (Eigen::Index k = 0; k < f.size(); ++k) wt(k) = 1.0 / f(k) + gamma / (width * f(k) * f(k));
        const auto fe = edge_density(eta);
        const Eigen::Vector2d wt_e(0.5 * gamma / (width * fe(0) * fe(0)), 0.5 * gamma / (width * fe(1) * fe(1)));
        return h_ * (basis_.transpose() * wt.asDiagonal() * basis_ +
                     edge_basis_.transpose() * wt_e.asDiagonal() * edge_basis_);
    }

    PolyDensity density(const Eigen::VectorXd& eta) const {
        // Expand Σ η_i P_i(s) into powers of s; P_{i+1} = ((2i+1) s P_i - i P_{i-1})/(i+1).
        const auto d = static_cast<std::size_t>(degree_);
        std::vector<double> c(d + 1, 0.0);
        c[0] = 1.0 / (hi_ - lo_);
        std::vector<double> pm(d + 2, 0.0), p(d + 2, 0.0), next(d + 2, 0.0);
        pm[0] = 1.0;
        p[1] = 1.0;
        for (std::size_t i = 1; i <= d; ++i) {
            for (std::size_t j = 0; j <= i; ++j) c[j] += eta(static_cast<Eigen::Index>(i) - 1) * p[j];
            const double di = static_cast<double>(i);
            std::fill(next.begin(), next.end(), 0.0);
            for (std::size_t j = 0; j <= i; ++j) next[j + 1] += (2.0 * di + 1.0) * p[j] / (di + 1.0);
            for (std::size_t j = 0; j < i; ++j) next[j] -= di * pm[j] / (di + 1.0);
            pm = p;
            p = next;
        }
        return {lo_, hi_, c};
    }

private:
    double lo_;
    double hi_;
    int degree_;
    double h_ = 0.0;
    std::vector<double> s_;
    std::vector<double> log_w_;
    Eigen::MatrixXd basis_;
    Eigen::MatrixXd edge_basis_;
};

struct NewtonIterate {
    int stage = 0;
    double gamma = 0.0;
    double objective = 0.0;
    double grad_norm = 0.0;
    double min_hessian_eig = 0.0;
    double step = 0.0;  ///< accepted damping factor
};

struct PolyFitResult {
    PolyDensity density;
    double divergence = 0.0;        ///< D(f‖w_{J,λ}) on the fit grid, nats
    double final_grad_norm = 0.0;
    int total_newton_steps = 0;
    std::vector<int> steps_per_stage;
    std::vector<NewtonIterate> history;
};

/// Minimize D(f_ξ‖w_{J,λ}) + γ·D(1‖f_ξ) for the schedule of γ, starting from
/// the uniform density. Each stage runs damped Newton (step halving until the
/// objective decreases and f stays positive on the grid) and stops when the
/// gradient norm drops below newton_tol or the Newton decrement reaches the
/// round-off level of the objective.
inline PolyFitResult fit_poly_density(const TiltedPrior& target, int degree, const BarrierSchedule& schedule = {}) {
    const auto gammas = schedule.gammas();
    const PolyFitProblem prob(target, degree);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(prob.dim());
    std::vector<NewtonIterate> history;
    std::vector<int> per_stage;
    double grad_norm = 0.0;

    for (std::size_t st = 0; st < gammas.size(); ++st) {
        const double gamma = gammas[st];
        int steps = 0;
        if (prob.dim() == 0) {
            per_stage.push_back(0);
            continue;
        }
        double obj = prob.objective(eta, gamma);
        while (true) {
            const Eigen::VectorXd g = prob.gradient(eta, gamma);
            grad_norm = g.norm();
            if (grad_norm < schedule.newton_tol) break;
            if (steps >= schedule.max_newton) {
                throw ConvergenceError("fit_poly_density: Newton did not converge in stage " + std::to_string(st) +
                                           " (γ = " + std::to_string(gamma) + ", gradient norm " +
                                           std::to_string(grad_norm) + ")",
                                       grad_norm);
            }
            const Eigen::MatrixXd H = prob.hessian(eta, gamma);
            const Eigen::LLT<Eigen::MatrixXd> llt(H);
            if (llt.info() != Eigen::Success) {
                throw NumericalError("fit_poly_density: Hessian is not positive definite in stage " +
                                     std::to_string(st));
            }
            const Eigen::VectorXd dir = -llt.solve(g);
            // Newton decrement: λ²/2 estimates the remaining suboptimality.
            // Below the round-off level of the objective no step can make
            // measurable progress, so the stage is done even if the gradient
            // norm sits slightly above newton_tol (ill-conditioned bases).
            const double decrement2 = -g.dot(dir);
            const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(obj));
            if (0.5 * decrement2 <= floor) break;
            double t = 1.0;
            Eigen::VectorXd trial;
            double trial_obj = std::numeric_limits<double>::infinity();
            int halvings = 0;
            for (; halvings < 60; ++halvings, t *= 0.5) {
                trial = eta + t * dir;
                if (!prob.feasible(trial)) continue;
                trial_obj = prob.objective(trial, gamma);
                if (trial_obj < obj || (halvings == 0 && trial_obj <= obj)) break;
            }
            if (halvings == 60) {
                throw ConvergenceError("fit_poly_density: line search failed in stage " + std::to_string(st) +
                                           " (γ = " + std::to_string(gamma) + ")",
                                       grad_norm);
            }
            eta = trial;
            obj = trial_obj;
            ++steps;
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(prob.hessian(eta, gamma),
                                                                     Eigen::EigenvaluesOnly);
            history.push_back({static_cast<int>(st), gamma, obj, prob.gradient(eta, gamma).norm(),
                               eig.eigenvalues().minCoeff(), t});
        }
        per_stage.push_back(steps);
    }

    PolyFitResult res{prob.density(eta), prob.divergence(eta), grad_norm, 0, per_stage, history};
    for (int s : per_stage) res.total_newton_steps += s;
    return res;
}

/// X_{J,ξ} = {c_P F_ξ⁻¹(u) : u ∈ S}.
inline Constellation approx_jeffreys_constellation(const PolyDensity& p, double P, std::size_t M) {
    if (M < 2) throw DomainError("approx_jeffreys_constellation: M must be >= 2");
    std::vector<double> raw;
    for (double u : midpoint_grid(M)) raw.push_back(p.cdf_inverse(u));
    return detail::finalize_uniform(detail::column(raw), P);
}

}  // namespace jcap
