#pragma once

// Per-antenna channel families p(y | θ).
//
// Each family exposes its parameter space Θ, the cost c(θ) = ‖θ‖², the Fisher
// information J(θ) and √det J, and where it makes sense the finite output pmf
// or the continuous log-density with its θ-derivative. Parameterizations:
// θ = x for scalar real channels, θ = |x| for energy detection and the
// noncoherent channel, θ = [Re x; Im x] (handled radially) for MIMO with
// imperfect CSI.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "jcap/errors.hpp"
#include "jcap/quad.hpp"
#include "jcap/specfun.hpp"

namespace jcap {

struct ParameterSpace {
    enum class Shape { Interval, Ball };

    int dim = 1;
    Shape shape = Shape::Interval;
    double lo = 0.0;  ///< interval lower end; 0 for a ball
    double hi = 1.0;  ///< interval upper end; radius A for a ball
    bool isotropic = false;

    static ParameterSpace interval(double lo, double hi) {
        ParameterSpace s{1, Shape::Interval, lo, hi, false};
        s.validate();
        return s;
    }

    static ParameterSpace ball(int dim, double radius) {
        ParameterSpace s{dim, Shape::Ball, 0.0, radius, true};
        s.validate();
        return s;
    }

    void validate() const {
        if (dim < 1) throw DomainError("ParameterSpace: dim must be >= 1");
        if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
            throw DomainError("ParameterSpace: need finite lo < hi (or radius > 0)");
        }
        if (shape == Shape::Interval && dim != 1) {
            throw DomainError("ParameterSpace: interval spaces are one-dimensional");
        }
        if (isotropic && shape != Shape::Ball) {
            throw DomainError("ParameterSpace: isotropic flag requires a ball");
        }
    }

    /// Surface area of the unit sphere S_{d-1}: 2π^{d/2}/Γ(d/2).
    double unit_sphere_surface() const {
        const double half = 0.5 * dim;
        return 2.0 * std::exp(half * std::log(std::numbers::pi) - specfun::log_gamma(half));
    }

    /// Volume element of the 1-D integration variable t: 1 on an interval,
    /// Surf(S_{d-1})·t^{d-1} on a ball (t is the radius).
    double measure(double t) const {
        if (shape == Shape::Interval) return 1.0;
        return unit_sphere_surface() * std::pow(t, dim - 1);
    }

    bool contains(double t) const { return t >= lo && t <= hi; }
};

enum class OutputKind { Finite, ContinuousScalar, PairWithState };

/// Finite discrete distribution (Poisson fading gains and background levels).
struct DiscreteDistribution {
    std::vector<double> points;
    std::vector<double> probs;

    static DiscreteDistribution point_mass(double v) { return {{v}, {1.0}}; }

    void validate(const char* what) const {
        if (points.empty() || points.size() != probs.size()) {
            throw DomainError(std::string(what) + ": points and probs must be nonempty and equal length");
        }
        double sum = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0)) throw DomainError(std::string(what) + ": negative probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            throw DomainError(std::string(what) + ": probabilities must sum to 1");
        }
        for (double v : points) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw DomainError(std::string(what) + ": support must be finite and nonnegative");
            }
        }
    }
};

/// Receiver-known threshold shifts s with probabilities p(s).
struct DitherSet {
    std::vector<double> points;
    std::vector<double> weights;

    /// N equally spaced shifts on [-half_width, half_width], uniform weights.
    static DitherSet uniform(std::size_t n, double half_width) {
        if (n == 0) throw DomainError("DitherSet: need at least one point");
        DitherSet d;
        for (std::size_t j = 0; j < n; ++j) {
            d.points.push_back(n == 1 ? 0.0
                                      : -half_width + 2.0 * half_width * static_cast<double>(j) /
                                                          static_cast<double>(n - 1));
            d.weights.push_back(1.0 / static_cast<double>(n));
        }
        d.validate();
        return d;
    }

    void validate() const {
        if (points.empty() || points.size() != weights.size()) {
            throw DomainError("DitherSet: points and weights must be nonempty and equal length");
        }
        double sum = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) throw DomainError("DitherSet: negative weight");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw DomainError("DitherSet: weights must sum to 1");
        auto sorted = points;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw DomainError("DitherSet: points must be distinct");
        }
    }
};

struct LogDensity {
    double value;   ///< ln p(y | θ)
    double dtheta;  ///< ∂θ ln p(y | θ)
};

// ---------------------------------------------------------------------------
// Closed-form Fisher information. These are the bare formulas; domain checks
// against Θ live in the channel types below.

/// Real AWGN with unit noise: J ≡ 1.
inline double fisher_awgn(double /*theta*/) { return 1.0; }

namespace detail {
/// Q(s) + sφ(s) - φ²(s)/Q(s): Fisher information lost to one clipping atom.
inline double clipping_loss_term(double s) {
    if (s < 5.0) {
        const double q = specfun::gauss_q(s);
        const double phi = specfun::gauss_pdf(s);
        return q + s * phi - phi * phi / q;
    }
    const double r = specfun::mills_ratio(s);
    return specfun::gauss_pdf(s) * (r + s - 1.0 / r);
}

/// φ²(x)/(Q(x)(1-Q(x))): Fisher information of a sign quantizer at offset x.
inline double sign_fisher_term(double x) {
    const double u = std::abs(x);
    const double r = specfun::mills_ratio(u);
    return specfun::gauss_pdf(u) / (r * (1.0 - specfun::gauss_q(u)));
}
}  // namespace detail

/// AWGN followed by clipping to [-B, B].
inline double fisher_clipped_awgn(double theta, double clip) {
    if (!(clip > 0.0)) throw DomainError("fisher_clipped_awgn: B must be > 0");
    return 1.0 - detail::clipping_loss_term(clip + theta) - detail::clipping_loss_term(clip - theta);
}

inline void validate_thresholds(const std::vector<double>& thresholds) {
    if (thresholds.empty()) throw DomainError("quantizer needs at least one threshold (L >= 2)");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!std::isfinite(thresholds[i])) throw DomainError("quantizer thresholds must be finite");
        if (i > 0 && !(thresholds[i - 1] < thresholds[i])) {
            throw DomainError("quantizer thresholds must be strictly increasing");
        }
    }
}

/// Probabilities of the L cells (t_{ℓ-1}, t_ℓ] for y = θ + z, t_0 = -∞, t_L = +∞.
inline std::vector<double> quantized_awgn_pmf(double theta, const std::vector<double>& thresholds) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> p(thresholds.size() + 1);
    for (std::size_t l = 0; l < p.size(); ++l) {
        const double lo = (l == 0) ? -inf : thresholds[l - 1] - theta;
        const double hi = (l == thresholds.size()) ? inf : thresholds[l] - theta;
        p[l] = specfun::gauss_interval_prob(lo, hi);
    }
    return p;
}

/// L-level ADC after AWGN. Cells whose probability underflows contribute 0.
inline double fisher_quantized_awgn(double theta, const std::vector<double>& thresholds) {
    validate_thresholds(thresholds);
    if (thresholds.size() == 1) return detail::sign_fisher_term(theta - thresholds[0]);
    const auto p = quantized_awgn_pmf(theta, thresholds);
    double j = 0.0;
    for (std::size_t l = 0; l < p.size(); ++l) {
        if (!(p[l] > 0.0)) continue;
        const double phi_lo = (l == 0) ? 0.0 : specfun::gauss_pdf(thresholds[l - 1] - theta);
        const double phi_hi = (l == thresholds.size()) ? 0.0 : specfun::gauss_pdf(thresholds[l] - theta);
        const double dp = phi_lo - phi_hi;
        j += dp * dp / p[l];
    }
    return j;
}

/// Energy detection: ỹ = 2|x + z|² is noncentral χ² (2 dof, noncentrality 2θ²),
/// J(θ) = E[(-2θ + √(2ỹ)·I1/I0(θ√(2ỹ)))²], evaluated by semi-infinite
/// quadrature over ỹ.
inline double fisher_energy_detection(double theta, const quad::QuadRule& rule = {}) {
    if (!(theta >= 0.0)) throw DomainError("fisher_energy_detection: θ must be >= 0");
    if (theta == 0.0) return 0.0;
    auto integrand = [theta](double ytilde) {
        const double rho = std::sqrt(0.5 * ytilde);
        const double z = 2.0 * theta * rho;  // θ√(2ỹ)
        const auto b = specfun::bessel_i01_scaled(z);
        const double dev = rho - theta;
        const double density = 0.5 * std::exp(-dev * dev) * b.i0s;
        if (density == 0.0) return 0.0;
        const double score = -2.0 * theta + 2.0 * rho * (b.i1s / b.i0s);
        return density * score * score;
    };
    return quad::integrate_semiinf(integrand, 0.0, rule).value;
}

/// √det J for MIMO with imperfect CSI and Γ = (1-σ²)·I, as a function of the
/// radius r = ‖θ‖ in R^{2 nt}.
inline double mimo_sqrt_det_fisher(double r, int nt, double sigma2) {
    if (!(sigma2 > 0.0 && sigma2 < 1.0)) throw DomainError("mimo: σ² must lie in (0, 1)");
    if (nt < 1) throw DomainError("mimo: nt must be >= 1");
    if (!(r >= 0.0)) throw DomainError("mimo: radius must be >= 0");
    const double v = 1.0 + sigma2 * r * r;
    const double base = 2.0 * (1.0 - sigma2) / v;
    const double corr = 1.0 + (2.0 * sigma2 * sigma2 / (1.0 - sigma2)) * (r * r / v);
    return std::pow(base, nt) * std::sqrt(corr);
}

/// Noncoherent channel, θ = ‖x‖: J = 4σ⁴θ²/(1+σ²θ²)².
inline double fisher_noncoherent(double theta, double sigma2) {
    if (!(sigma2 > 0.0)) throw DomainError("noncoherent: σ² must be > 0");
    const double v = 1.0 + sigma2 * theta * theta;
    return 4.0 * sigma2 * sigma2 * theta * theta / (v * v);
}

/// Poisson intensity channel with receiver-known gain h and background μ:
/// J(θ) = E[h²/(hθ + μ)].
inline double fisher_poisson(double theta, const DiscreteDistribution& h, const DiscreteDistribution& mu) {
    double j = 0.0;
    for (std::size_t a = 0; a < h.points.size(); ++a) {
        for (std::size_t b = 0; b < mu.points.size(); ++b) {
            const double w = h.probs[a] * mu.probs[b];
            if (w == 0.0) continue;
            const double den = h.points[a] * theta + mu.points[b];
            if (!(den > 0.0)) {
                throw DomainError("fisher_poisson: hθ + μ must be > 0 on the support");
            }
            j += w * h.points[a] * h.points[a] / den;
        }
    }
    return j;
}

/// 1-bit ADC with receiver-known dither: J(θ) = E_s[φ²(θ-s)/(Q(θ-s)(1-Q(θ-s)))].
inline double fisher_dithered_1bit(double theta, const DitherSet& dither) {
    double j = 0.0;
    for (std::size_t i = 0; i < dither.points.size(); ++i) {
        j += dither.weights[i] * detail::sign_fisher_term(theta - dither.points[i]);
    }
    return j;
}

// ---------------------------------------------------------------------------
// Channel families.

namespace channel {

struct Awgn {
    double A;
    double noise_var = 1.0;

    ParameterSpace space() const { return ParameterSpace::interval(-A, A); }
    double fisher(double) const { return noise_var == 1.0 ? fisher_awgn(0.0) : 1.0 / noise_var; }
    OutputKind output_kind() const { return OutputKind::ContinuousScalar; }
    LogDensity log_density(double y, double theta) const {
        const double d = y - theta;
        return {-0.5 * std::log(2.0 * std::numbers::pi * noise_var) - 0.5 * d * d / noise_var, d / noise_var};
    }
    void validate() const {
        if (!(A > 0.0)) throw DomainError("awgn: A must be > 0");
        if (!(noise_var > 0.0)) throw DomainError("awgn: noise_var must be > 0");
    }
};

struct ClippedAwgn {
    double A;
    double B;

    ParameterSpace space() const { return ParameterSpace::interval(-A, A); }
    double fisher(double theta) const { return fisher_clipped_awgn(theta, B); }
    OutputKind output_kind() const { return OutputKind::ContinuousScalar; }
    /// Density with respect to Lebesgue measure on (-B, B) plus unit atoms at ±B.
    LogDensity log_density(double y, double theta) const {
        if (y >= B) {
            return {specfun::log_gauss_q(B - theta),
                    std::exp(std::log(specfun::gauss_pdf(B - theta)) - specfun::log_gauss_q(B - theta))};
        }
        if (y <= -B) {
            return {specfun::log_gauss_q(B + theta),
                    -std::exp(std::log(specfun::gauss_pdf(B + theta)) - specfun::log_gauss_q(B + theta))};
        }
        const double d = y - theta;
        return {-0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * d * d, d};
    }
    void validate() const {
        if (!(A > 0.0)) throw DomainError("clipped_awgn: A must be > 0");
        if (!(B > 0.0)) throw DomainError("clipped_awgn: B must be > 0");
    }
};

/// AWGN output conditioned on |y| <= B: a bounded-support continuous family.
struct TruncatedAwgn {
    double A;
    double B;

    ParameterSpace space() const { return ParameterSpace::interval(-A, A); }

    /// Z(θ) = P(|θ + z| <= B) and its θ-derivative.
    std::pair<double, double> normalizer(double theta) const {
        const double z = specfun::gauss_interval_prob(-B - theta, B - theta);
        const double dz = specfun::gauss_pdf(B + theta) - specfun::gauss_pdf(B - theta);
        return {z, dz};
    }
    /// Variance of a unit normal truncated to [-B-θ, B-θ].
    double fisher(double theta) const {
        const double a = -B - theta;
        const double b = B - theta;
        const auto [z, dz] = normalizer(theta);
        const double pa = specfun::gauss_pdf(a);
        const double pb = specfun::gauss_pdf(b);
        const double m = (pa - pb) / z;
        return 1.0 + (a * pa - b * pb) / z - m * m;
    }
    OutputKind output_kind() const { return OutputKind::ContinuousScalar; }
    LogDensity log_density(double y, double theta) const {
        if (std::abs(y) > B) {
            return {-std::numeric_limits<double>::infinity(), 0.0};
        }
        const auto [z, dz] = normalizer(theta);
        const double d = y - theta;
        return {-0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * d * d - std::log(z), d - dz / z};
    }
    void validate() const {
        if (!(A > 0.0)) throw DomainError("truncated_awgn: A must be > 0");
        if (!(B > 0.0)) throw DomainError("truncated_awgn: B must be > 0");
    }
};

struct QuantizedAwgn {
    double A;
    std::vector<double> thresholds;

    /// Uniform L-level quantizer: sign for L = 2, otherwise L-1 thresholds
    /// evenly spaced on [-A, A] (clipping at ±A).
    static QuantizedAwgn uniform(double A, std::size_t levels) {
        if (levels < 2) throw DomainError("quantized_awgn: need L >= 2");
        QuantizedAwgn q{A, {}};
        if (levels == 2) {
            q.thresholds = {0.0};
        } else {
            for (std::size_t i = 0; i + 1 < levels; ++i) {
                q.thresholds.push_back(-A + 2.0 * A * static_cast<double>(i) / static_cast<double>(levels - 2));
            }
        }
        return q;
    }

    ParameterSpace space() const { return ParameterSpace::interval(-A, A); }
    double fisher(double theta) const { return fisher_quantized_awgn(theta, thresholds); }
    OutputKind output_kind() const { return OutputKind::Finite; }
    std::size_t output_size() const { return thresholds.size() + 1; }
    std::vector<double> output_pmf(double theta) const { return quantized_awgn_pmf(theta, thresholds); }
    void validate() const {
        if (!(A > 0.0)) throw DomainError("quantized_awgn: A must be > 0");
        validate_thresholds(thresholds);
    }
};

struct EnergyDetection {
    double A;
    quad::QuadRule rule{};

    ParameterSpace space() const { return ParameterSpace::interval(0.0, A); }
    double fisher(double theta) const { return fisher_energy_detection(theta, rule); }
    OutputKind output_kind() const { return OutputKind::ContinuousScalar; }
    /// y here is ỹ = 2|y|².
    LogDensity log_density(double ytilde, double theta) const {
        if (!(ytilde >= 0.0)) return {-std::numeric_limits<double>::infinity(), 0.0};
        const double rho = std::sqrt(0.5 * ytilde);
        const double z = 2.0 * theta * rho;
        const auto b = specfun::bessel_i01_scaled(z);
        const double dev = rho - theta;
        return {std::log(0.5) - dev * dev + std::log(b.i0s), -2.0 * theta + 2.0 * rho * (b.i1s / b.i0s)};
    }
    void validate() const {
        if (!(A > 0.0)) throw DomainError("energy_detection: A must be > 0");
        rule.validate();
    }
};

struct MimoImperfectCsi {
    double A;
    int nt;
    double sigma2;

    ParameterSpace space() const { return ParameterSpace::ball(2 * nt, A); }
    double sqrt_det_fisher(double r) const { return mimo_sqrt_det_fisher(r, nt, sigma2); }
    /// J(θ) = 2/(1+σ²‖θ‖²)·Γ + 4σ⁴/(1+σ²‖θ‖²)²·θθᵀ with Γ = (1-σ²)I.
    Eigen::MatrixXd fisher_matrix(const Eigen::VectorXd& theta) const {
        const double v = 1.0 + sigma2 * theta.squaredNorm();
        Eigen::MatrixXd j = (2.0 * (1.0 - sigma2) / v) * Eigen::MatrixXd::Identity(2 * nt, 2 * nt);
        j += (4.0 * sigma2 * sigma2 / (v * v)) * theta * theta.transpose();
        return j;
    }
    OutputKind output_kind() const { return OutputKind::PairWithState; }
    void validate() const {
        if (!(A > 0.0)) throw DomainError("mimo_imperfect_csi: A must be > 0");
        if (nt < 1) throw DomainError("mimo_imperfect_csi: nt must be >= 1");
        if (!(sigma2 > 0.0 && sigma2 < 1.0)) throw DomainError("mimo_imperfect_csi: σ² must lie in (0, 1)");
    }
};

struct Noncoherent {
    double A;
    double sigma2;

    ParameterSpace space() const { return ParameterSpace::interval(0.0, A); }
    double fisher(double theta) const { return fisher_noncoherent(theta, sigma2); }
    double sqrt_det_fisher(double theta) const {
        return 2.0 * sigma2 * theta / (1.0 + sigma2 * theta * theta);
    }
    OutputKind output_kind() const { return OutputKind::ContinuousScalar; }
    void validate() const {
        if (!(A > 0.0)) throw DomainError("noncoherent: A must be > 0");
        if (!(sigma2 > 0.0)) throw DomainError("noncoherent: σ² must be > 0");
    }
};

struct Poisson {
    double A;
    DiscreteDistribution h;
    DiscreteDistribution mu;

    ParameterSpace space() const { return ParameterSpace::interval(0.0, A); }
    double fisher(double theta) const { return fisher_poisson(theta, h, mu); }
    OutputKind output_kind() const { return OutputKind::PairWithState; }
    void validate() const {
        if (!(A > 0.0)) throw DomainError("poisson: A must be > 0");
        h.validate("poisson h");
        mu.validate("poisson mu");
    }
};

struct DitheredOneBit {
    double A;
    DitherSet dither;

    ParameterSpace space() const { return ParameterSpace::interval(-A, A); }
    double fisher(double theta) const { return fisher_dithered_1bit(theta, dither); }
    OutputKind output_kind() const { return OutputKind::Finite; }
    std::size_t output_size() const { return 2 * dither.points.size(); }
    /// Joint pmf of (y, s), ordered (y=-1, s_0), (y=+1, s_0), (y=-1, s_1), ...
    std::vector<double> output_pmf(double theta) const {
        std::vector<double> p;
        p.reserve(output_size());
        for (std::size_t j = 0; j < dither.points.size(); ++j) {
            const double s = dither.points[j];
            p.push_back(dither.weights[j] * specfun::gauss_q(theta - s));
            p.push_back(dither.weights[j] * specfun::gauss_q(s - theta));
        }
        return p;
    }
    void validate() const {
        if (!(A > 0.0)) throw DomainError("dithered_1bit: A must be > 0");
        dither.validate();
    }
};

}  // namespace channel

namespace detail {
template <class T, class = void>
struct has_output_pmf : std::false_type {};
template <class T>
struct has_output_pmf<T, std::void_t<decltype(std::declval<const T&>().output_pmf(0.0))>> : std::true_type {};

template <class T, class = void>
struct has_log_density : std::false_type {};
template <class T>
struct has_log_density<T, std::void_t<decltype(std::declval<const T&>().log_density(0.0, 0.0))>>
    : std::true_type {};

template <class T, class = void>
struct has_scalar_fisher : std::false_type {};
template <class T>
struct has_scalar_fisher<T, std::void_t<decltype(std::declval<const T&>().fisher(0.0))>> : std::true_type {};

template <class T, class = void>
struct has_sqrt_det : std::false_type {};
template <class T>
struct has_sqrt_det<T, std::void_t<decltype(std::declval<const T&>().sqrt_det_fisher(0.0))>> : std::true_type {};
}  // namespace detail

/// An immutable channel family. Value type; cheap to copy for the small
/// families, safe to share across threads.
class Channel {
public:
    using Variant = std::variant<channel::Awgn, channel::ClippedAwgn, channel::TruncatedAwgn,
                                 channel::QuantizedAwgn, channel::EnergyDetection,
                                 channel::MimoImperfectCsi, channel::Noncoherent, channel::Poisson,
                                 channel::DitheredOneBit>;

    template <class T, class = std::enable_if_t<std::is_constructible_v<Variant, T>>>
    Channel(T family) : family_(std::move(family)) {
        std::visit([](const auto& f) { f.validate(); }, family_);
        space_ = std::visit([](const auto& f) { return f.space(); }, family_);
    }

    static Channel awgn(double A, double noise_var = 1.0) { return channel::Awgn{A, noise_var}; }
    static Channel clipped_awgn(double A, double B) { return channel::ClippedAwgn{A, B}; }
    static Channel truncated_awgn(double A, double B) { return channel::TruncatedAwgn{A, B}; }
    static Channel quantized_awgn(double A, std::vector<double> thresholds) {
        return channel::QuantizedAwgn{A, std::move(thresholds)};
    }
    static Channel uniform_adc(double A, std::size_t levels) {
        return channel::QuantizedAwgn::uniform(A, levels);
    }
    static Channel one_bit(double A) { return channel::QuantizedAwgn{A, {0.0}}; }
    static Channel energy_detection(double A, quad::QuadRule rule = {}) {
        return channel::EnergyDetection{A, rule};
    }
    static Channel mimo_imperfect_csi(double A, int nt, double sigma2) {
        return channel::MimoImperfectCsi{A, nt, sigma2};
    }
    static Channel noncoherent(double A, double sigma2) { return channel::Noncoherent{A, sigma2}; }
    static Channel poisson(double A, DiscreteDistribution h, DiscreteDistribution mu) {
        return channel::Poisson{A, std::move(h), std::move(mu)};
    }
    static Channel dithered_1bit(double A, DitherSet dither) {
        return channel::DitheredOneBit{A, std::move(dither)};
    }

    const Variant& family() const { return family_; }
    const ParameterSpace& space() const { return space_; }
    int dim() const { return space_.dim; }

    std::string kind_name() const {
        return std::visit(
            [](const auto& f) -> std::string {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, channel::Awgn>) return "awgn";
                else if constexpr (std::is_same_v<T, channel::ClippedAwgn>) return "clipped_awgn";
                else if constexpr (std::is_same_v<T, channel::TruncatedAwgn>) return "truncated_awgn";
                else if constexpr (std::is_same_v<T, channel::QuantizedAwgn>) return "quantized_awgn";
                else if constexpr (std::is_same_v<T, channel::EnergyDetection>) return "energy_detection";
                else if constexpr (std::is_same_v<T, channel::MimoImperfectCsi>) return "mimo_imperfect_csi";
                else if constexpr (std::is_same_v<T, channel::Noncoherent>) return "noncoherent";
                else if constexpr (std::is_same_v<T, channel::Poisson>) return "poisson";
                else return "dithered_1bit";
            },
            family_);
    }

    /// Peak amplitude A (interval half-width or ball radius).
    double peak_amplitude() const { return space_.hi; }

    void check_in_domain(double t) const {
        if (!std::isfinite(t) || !space_.contains(t)) {
            throw DomainError(kind_name() + ": parameter " + std::to_string(t) + " outside Θ = [" +
                              std::to_string(space_.lo) + ", " + std::to_string(space_.hi) + "]");
        }
    }

    /// c(θ) = θ² (or ‖θ‖² = r² on a ball).
    double cost(double t) const { return t * t; }

    /// Scalar Fisher information; one-dimensional families only.
    double fisher(double theta) const {
        check_in_domain(theta);
        return std::visit(
            [&](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (detail::has_scalar_fisher<T>::value) {
                    return f.fisher(theta);
                } else {
                    throw UnsupportedError(kind_name() + ": scalar Fisher information needs d = 1");
                }
            },
            family_);
    }

    /// d×d Fisher matrix at θ ∈ R^d.
    Eigen::MatrixXd fisher_matrix(const Eigen::VectorXd& theta) const {
        if (theta.size() != dim()) throw DomainError("fisher_matrix: θ has the wrong dimension");
        if (space_.shape == ParameterSpace::Shape::Ball) check_in_domain(theta.norm());
        return std::visit(
            [&](const auto& f) -> Eigen::MatrixXd {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, channel::MimoImperfectCsi>) {
                    return f.fisher_matrix(theta);
                } else {
                    Eigen::MatrixXd m(1, 1);
                    m(0, 0) = fisher(theta(0));
                    return m;
                }
            },
            family_);
    }

    /// √det J at θ (interval) or at radius r (isotropic ball).
    double sqrt_det_fisher(double t) const {
        check_in_domain(t);
        return std::visit(
            [&](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (detail::has_sqrt_det<T>::value) {
                    return f.sqrt_det_fisher(t);
                } else {
                    return std::sqrt(std::max(0.0, f.fisher(t)));
                }
            },
            family_);
    }

    OutputKind output_kind() const {
        return std::visit([](const auto& f) { return f.output_kind(); }, family_);
    }

    std::size_t output_size() const {
        return std::visit(
            [&](const auto& f) -> std::size_t {
                using T = std::decay_t<decltype(f)>;
                if constexpr (detail::has_output_pmf<T>::value) {
                    return f.output_size();
                } else {
                    throw ContractError(kind_name() + ": output alphabet is not finite");
                }
            },
            family_);
    }

    /// Output pmf of a finite-output family; sums to 1 within 1e-12.
    std::vector<double> output_pmf(double theta) const {
        check_in_domain(theta);
        return std::visit(
            [&](const auto& f) -> std::vector<double> {
                using T = std::decay_t<decltype(f)>;
                if constexpr (detail::has_output_pmf<T>::value) {
                    return f.output_pmf(theta);
                } else {
                    throw ContractError(kind_name() + ": output_pmf needs a finite-output channel");
                }
            },
            family_);
    }

    /// ln p(y|θ) and its θ-derivative for continuous-output families.
    LogDensity log_density(double y, double theta) const {
        check_in_domain(theta);
        return std::visit(
            [&](const auto& f) -> LogDensity {
                using T = std::decay_t<decltype(f)>;
                if constexpr (detail::has_log_density<T>::value) {
                    return f.log_density(y, theta);
                } else {
                    throw ContractError(kind_name() + ": no scalar output log-density");
                }
            },
            family_);
    }

    template <class T>
    const T* as() const {
        return std::get_if<T>(&family_);
    }

private:
    Variant family_;
    ParameterSpace space_;
};

/// Free-function spelling of Channel::output_pmf.
inline std::vector<double> output_pmf_finite(const Channel& ch, double theta) { return ch.output_pmf(theta); }

}  // namespace jcap
