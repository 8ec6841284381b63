#pragma once

// Command-line front end. run() parses arguments, executes one subcommand and
// returns the process exit status: 0 success, 1 invalid input, 2 numerical
// failure. Output is buffered and written once at the end.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "jcap/jcap.hpp"

namespace jcap::cli {

/// Shortest-exact formatting used for every number written to CSV.
inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// "a:b:n" → n equally spaced values from a to b inclusive.
inline std::vector<double> parse_grid(const std::string& spec, const std::string& what) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw DomainError(what + ": expected a:b:n, got '" + spec + "'");
    double a = 0, b = 0;
    long n = 0;
    try {
        std::size_t pos = 0;
        a = std::stod(parts[0], &pos);
        if (pos != parts[0].size()) throw std::invalid_argument("a");
        b = std::stod(parts[1], &pos);
        if (pos != parts[1].size()) throw std::invalid_argument("b");
        n = std::stol(parts[2], &pos);
        if (pos != parts[2].size()) throw std::invalid_argument("n");
    } catch (const std::logic_error&) {
        throw DomainError(what + ": expected a:b:n with numbers, got '" + spec + "'");
    }
    if (n < 1 || !(b >= a) || !std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError(what + ": need n >= 1 and a <= b");
    }
    if (n == 1) return {a};
    std::vector<double> out;
    for (long i = 0; i < n; ++i) out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

inline std::vector<double> closed_grid(double lo, double hi, std::size_t n) {
    if (n < 2) throw DomainError("--grid must be >= 2");
    std::vector<double> t;
    for (std::size_t i = 0; i < n; ++i) t.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    return t;
}

struct Options {
    std::string channel;
    std::string out;
    double P = 0.0;
    double lambda = -1.0;
    double nr = 0.0;
    std::size_t M = 16;
    std::size_t grid = 0;
    int degree = 8;
    std::string mode = "jeffreys";
    std::string lambda_grid;
    std::size_t levels = 4;
    std::size_t directions = 8;
    bool optimize = false;
    double budget = kDefaultMiBudget;
    std::vector<std::size_t> L;
    double r = 0.0;
    std::string acov = "ar1";
    double rho = 0.5;
    double variance = 1.0;
    std::vector<std::size_t> n;
};

/// Module/operation label used in numerical-failure messages.
inline std::string op_label(const std::string& cmd, const Options& o) {
    if (cmd == "fisher") return "channels/fisher";
    if (cmd == "jf") return "jeffreys/jeffreys_factor";
    if (cmd == "prior") return "jeffreys/tilted_prior";
    if (cmd == "lambda-star") return "jeffreys/solve_lambda_star";
    if (cmd == "capacity") return "jeffreys/asymptotic_capacity";
    if (cmd == "constellation") return "constellation/" + o.mode;
    if (cmd == "fit-poly") return "constellation/fit_poly_density";
    if (cmd == "mi") return o.optimize ? "mutual_info/blahut_arimoto" : "mutual_info/mutual_information";
    if (cmd == "quant-loss") return "receiver_quant/scaling_study";
    if (cmd == "fisher-rate") return "noniid/fisher_rate_finite";
    return cmd;
}

inline void require_positive(double v, const char* flag) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(flag) + " must be finite and > 0");
}

inline json inputs_json(const Channel& ch, const Options& o, bool with_nr) {
    json in{{"channel", channel_to_json(ch)}, {"P", o.P}};
    if (with_nr) in["nr"] = o.nr;
    return in;
}

// --- commands --------------------------------------------------------------

inline void cmd_fisher(const Options& o, std::ostream& out) {
    const Channel ch = load_channel(o.channel);
    const auto& sp = ch.space();
    const std::size_t n = o.grid ? o.grid : 33;
    if (sp.shape == ParameterSpace::Shape::Ball) {
        out << "r [amplitude],sqrt_det_J [amplitude^-" << sp.dim << "]\n";
        for (double t : closed_grid(0.0, sp.hi, n)) out << num(t) << ',' << num(ch.sqrt_det_fisher(t)) << '\n';
        return;
    }
    out << "theta [amplitude],J [amplitude^-2]\n";
    for (double t : closed_grid(sp.lo, sp.hi, n)) out << num(t) << ',' << num(ch.fisher(t)) << '\n';
}

inline void cmd_jf(const Options& o, std::ostream& out) {
    const Channel ch = load_channel(o.channel);
    require_positive(o.P, "--P");
    const auto lambdas = parse_grid(o.lambda_grid, "--lambda-grid");
    out << "lambda [bits/power],JF [amplitude^" << ch.dim() << "],M [power]\n";
    for (double l : lambdas) {
        out << num(l) << ',' << num(jeffreys_factor(ch, l, o.P)) << ',' << num(average_cost(ch, l, o.P)) << '\n';
    }
}

inline double resolve_lambda(const Channel& ch, const Options& o) {
    if (o.lambda >= 0.0) return o.lambda;
    require_positive(o.P, "--P (or give --lambda)");
    return solve_lambda_star(ch, o.P).lambda_star;
}

inline void cmd_prior(const Options& o, std::ostream& out) {
    const Channel ch = load_channel(o.channel);
    const TiltedPrior w(ch, resolve_lambda(ch, o));
    const auto& sp = ch.space();
    const std::size_t n = o.grid ? o.grid : 257;
    if (sp.shape == ParameterSpace::Shape::Ball) {
        out << "r [amplitude],radial_density [1/amplitude],cdf [probability]\n";
        for (double t : closed_grid(0.0, sp.hi, n)) out << num(t) << ',' << num(w.radial_density(t)) << ',' << num(w.cdf(t)) << '\n';
        return;
    }
    out << "theta [amplitude],density [1/amplitude],cdf [probability]\n";
    for (double t : closed_grid(sp.lo, sp.hi, n)) out << num(t) << ',' << num(w.density(t)) << ',' << num(w.cdf(t)) << '\n';
}

inline void cmd_lambda_star(const Options& o, std::ostream& out) {
    const Channel ch = load_channel(o.channel);
    require_positive(o.P, "--P");
    const auto sol = solve_lambda_star(ch, o.P);
    json j{{"inputs", inputs_json(ch, o, false)},
           {"lambda_star", sol.lambda_star},
           {"jf", sol.jf},
           {"log2_jf", sol.log2_jf},
           {"m_at_lambda_star", sol.m_at_star},
           {"bisection_steps", sol.iterations}};
    out << j.dump(2) << '\n';
}

inline void cmd_capacity(const Options& o, std::ostream& out) {
    const Channel ch = load_channel(o.channel);
    require_positive(o.P, "--P");
    if (!(o.nr >= 1.0)) throw DomainError("--nr must be >= 1");
    const auto sol = solve_lambda_star(ch, o.P);
    json j{{"inputs", inputs_json(ch, o, true)},
           {"lambda_star", sol.lambda_star},
           {"jf", sol.jf},
           {"capacity_bits", sol.capacity_bits(o.nr)}};
    out << j.dump(2) << '\n';
}

inline std::vector<Eigen::VectorXd> radial_directions(int dim, std::size_t k) {
    std::vector<Eigen::VectorXd> dirs;
    if (dim == 2) {
        if (k < 1) throw DomainError("--directions must be >= 1");
        for (std::size_t i = 0; i < k; ++i) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(k);
            Eigen::VectorXd d(2);
            d << std::cos(a), std::sin(a);
            dirs.push_back(d);
        }
        return dirs;
    }
    // d > 2: the 2d signed coordinate axes.
    for (int i = 0; i < dim; ++i) {
        for (double s : {1.0, -1.0}) {
            Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
            d(i) = s;
            dirs.push_back(d);
        }
    }
    return dirs;
}

inline Constellation build_constellation(const Channel& ch, const Options& o) {
    require_positive(o.P, "--P");
    if (o.M < 1) throw DomainError("--M must be >= 1");
    if (o.mode == "jeffreys") return jeffreys_constellation(ch, o.P, o.M);
    if (o.mode == "pam") return pam_constellation(ch, o.P, o.M);
    if (o.mode == "poly") {
        const auto sol = solve_lambda_star(ch, o.P);
        const auto fit = fit_poly_density(TiltedPrior(ch, sol.lambda_star), o.degree);
        return approx_jeffreys_constellation(fit.density, o.P, o.M);
    }
    if (o.mode == "radial") return radial_constellation_isotropic(ch, o.P, o.levels, radial_directions(ch.dim(), o.directions));
    throw DomainError("--mode must be one of jeffreys, pam, poly, radial");
}

inline void cmd_constellation(const Options& o, std::ostream& out) {
    const Channel ch = load_channel(o.channel);
    const auto c = build_constellation(ch, o);
    out << "index";
    if (c.dim() == 1) {
        out << ",x [amplitude]";
    } else {
        for (int k = 0; k < c.dim(); ++k) out << ",x" << (k + 1) << " [amplitude]";
    }
    out << ",probability\n";
    for (Eigen::Index i = 0; i < c.points.rows(); ++i) {
        out << i;
        for (Eigen::Index k = 0; k < c.points.cols(); ++k) out << ',' << num(c.points(i, k));
        out << ',' << num(c.probs[static_cast<std::size_t>(i)]) << '\n';
    }
}

inline void cmd_fit_poly(const Options& o, std::ostream& out) {
    const Channel ch = load_channel(o.channel);
    require_positive(o.P, "--P");
    if (o.degree < 0) throw DomainError("--degree must be >= 0");
    const auto sol = solve_lambda_star(ch, o.P);
    const auto fit = fit_poly_density(TiltedPrior(ch, sol.lambda_star), o.degree);
    json j{{"inputs", inputs_json(ch, o, false)},
           {"degree", o.degree},
           {"lambda_star", sol.lambda_star},
           {"divergence_nats", fit.divergence},
           {"divergence_bits", fit.divergence / std::numbers::ln2},
           {"final_grad_norm", fit.final_grad_norm},
           {"newton_steps", fit.total_newton_steps},
           {"steps_per_stage", fit.steps_per_stage},
           {"monomial_coeffs", fit.density.monomial_coeffs()}};
    out << j.dump(2) << '\n';
}

inline void cmd_mi(const Options& o, std::ostream& out) {
    const Channel ch = load_channel(o.channel);
    require_positive(o.P, "--P");
    if (!(o.nr >= 1.0) || o.nr != std::floor(o.nr)) throw DomainError("--nr must be a positive integer");
    const int nr = static_cast<int>(o.nr);
    DiscreteInput in;
    if (o.mode == "prior") {
        const auto sol = solve_lambda_star(ch, o.P);
        in = discretize_prior(TiltedPrior(ch, sol.lambda_star), o.grid ? o.grid : 257);
    } else {
        const auto c = build_constellation(ch, o);
        in = {c.scalar_points(), c.probs};
    }
    json j{{"inputs", inputs_json(ch, o, true)}, {"mode", o.mode}, {"points", in.points.size()}};
    const bool finite = ch.output_kind() == OutputKind::Finite;
    const auto* awgn = ch.as<channel::Awgn>();
    if (!finite && !(awgn && awgn->noise_var == 1.0)) {
        throw UnsupportedError("mi: needs a finite-output channel or unit-variance awgn");
    }
    if (o.optimize) {
        if (!finite) throw UnsupportedError("mi --optimize: needs a finite-output channel");
        const auto ba = blahut_arimoto(ch, in.points, nr, 1e-9, 10000, o.budget);
        j["mi_bits_uniform"] = mi_finite_output(ch, DiscreteInput::uniform(in.points), nr, o.budget);
        j["mi_bits"] = ba.bits;
        j["gap_bits"] = ba.gap;
        j["iterations"] = ba.iterations;
        j["probs"] = ba.input.probs;
    } else {
        j["mi_bits"] = finite ? mi_finite_output(ch, in, nr, o.budget) : mi_gaussian_sufficient(in, nr);
    }
    j["asymptotic_capacity_bits"] = asymptotic_capacity(ch, o.P, o.nr);
    out << j.dump(2) << '\n';
}

inline void cmd_quant_loss(const Options& o, std::ostream& out) {
    const Channel ch = load_channel(o.channel);
    if (o.L.empty()) throw DomainError("--L needs at least one value");
    const std::size_t grid = o.grid ? o.grid : 1025;
    std::function<double(std::size_t)> sched;
    if (o.r > 0.0) {
        const double r = o.r;
        sched = [r](std::size_t) { return r; };
    } else {
        sched = gaussian_tail_radius;
    }
    std::vector<ScalingPoint> pts;
    std::string slope;
    if (o.L.size() >= 4) {
        const auto st = scaling_study(ch, sched, o.L, grid);
        pts = st.points;
        slope = num(st.slope);
        for (const auto& w : st.warnings) std::cerr << "jcap: warning: " << w << '\n';
    } else {
        for (std::size_t L : o.L) pts.push_back({L, sched(L), capacity_loss_eL(ch, build_quantizer(sched(L), L), grid)});
    }
    out << "L [bins],r [amplitude],e_L [nats*amplitude],slope [d ln e_L / d ln L]\n";
    for (const auto& p : pts) out << p.L << ',' << num(p.r) << ',' << num(p.e_L) << ',' << slope << '\n';
}

inline void cmd_fisher_rate(const Options& o, std::ostream& out) {
    Autocovariance a;
    if (o.acov == "white") {
        a = Autocovariance::white(o.variance);
    } else if (o.acov == "ar1") {
        a = Autocovariance::ar1(o.rho, o.variance);
    } else {
        throw DomainError("--acov must be white or ar1");
    }
    std::vector<std::size_t> ns = o.n;
    if (ns.empty()) ns = {64, 128, 256, 512, 1024, 2048, 4096};
    const double lim = fisher_rate_limit(a);
    out << "n [antennas],J_n [1/variance],limit [1/variance]\n";
    for (std::size_t n : ns) out << n << ',' << num(fisher_rate_finite(a, n)) << ',' << num(lim) << '\n';
}

// --- driver ----------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Asymptotic capacity, Jeffreys priors and constellations for many-antenna receivers", "jcap"};
    app.require_subcommand(1, 1);
    Options o;

    auto add_channel = [&](CLI::App* s) {
        s->add_option("--channel", o.channel, "Channel JSON file or inline JSON object")->required();
    };
    auto add_out = [&](CLI::App* s) { s->add_option("--out", o.out, "Write output to this file instead of stdout"); };
    auto add_P = [&](CLI::App* s, bool required) {
        auto* opt = s->add_option("--P", o.P, "Average-power budget");
        if (required) opt->required();
    };

    auto* fisher = app.add_subcommand("fisher", "Fisher information on a θ grid (CSV)");
    add_channel(fisher);
    fisher->add_option("--grid", o.grid, "Number of grid points (default 33)");
    add_out(fisher);

    auto* jf = app.add_subcommand("jf", "Jeffreys factor JF(λ) and average cost M(λ) on a λ grid (CSV)");
    add_channel(jf);
    add_P(jf, true);
    jf->add_option("--lambda-grid", o.lambda_grid, "a:b:n, n equally spaced λ from a to b")->required();
    add_out(jf);

    auto* prior = app.add_subcommand("prior", "Tilted Jeffreys prior density and cdf (CSV)");
    add_channel(prior);
    add_P(prior, false);
    prior->add_option("--lambda", o.lambda, "Tilt λ >= 0 (default: λ* for --P)");
    prior->add_option("--grid", o.grid, "Number of grid points (default 257)");
    add_out(prior);

    auto* lstar = app.add_subcommand("lambda-star", "Optimal tilt λ* for a power budget (JSON)");
    add_channel(lstar);
    add_P(lstar, true);
    add_out(lstar);

    auto* cap = app.add_subcommand("capacity", "Asymptotic capacity in bits (JSON)");
    add_channel(cap);
    add_P(cap, true);
    cap->add_option("--nr", o.nr, "Number of receive antennas")->required();
    add_out(cap);

    auto add_constellation_opts = [&](CLI::App* s, const char* modes) {
        s->add_option("--M", o.M, "Constellation size (default 16)");
        s->add_option("--mode", o.mode, std::string(modes) + " (default jeffreys)");
        s->add_option("--degree", o.degree, "Polynomial degree for --mode poly (default 8)");
        s->add_option("--levels", o.levels, "Radial levels for --mode radial (default 4)");
        s->add_option("--directions", o.directions, "Directions for --mode radial when d = 2 (default 8)");
    };
    auto* con = app.add_subcommand("constellation", "Constellation points and probabilities (CSV)");
    add_channel(con);
    add_P(con, true);
    add_constellation_opts(con, "jeffreys | pam | poly | radial");
    add_out(con);

    auto* fit = app.add_subcommand("fit-poly", "Polynomial approximation of the Jeffreys prior (JSON)");
    add_channel(fit);
    add_P(fit, true);
    fit->add_option("--degree", o.degree, "Polynomial degree (default 8)");
    add_out(fit);

    auto* mi = app.add_subcommand("mi", "Exact mutual information of a discrete input (JSON)");
    add_channel(mi);
    add_P(mi, true);
    mi->add_option("--nr", o.nr, "Number of receive antennas")->required();
    add_constellation_opts(mi, "jeffreys | pam | poly | radial | prior");
    mi->add_option("--grid", o.grid, "Prior grid size for --mode prior (default 257)");
    mi->add_flag("--optimize", o.optimize, "Optimize probabilities with Blahut-Arimoto");
    mi->add_option("--budget", o.budget, "Maximum type-likelihood evaluations (default 1e8)");
    add_out(mi);

    auto* ql = app.add_subcommand("quant-loss", "Capacity loss e_L of uniform receiver quantizers (CSV)");
    add_channel(ql);
    ql->add_option("--L", o.L, "Interior bin counts, comma separated")->required()->delimiter(',');
    ql->add_option("--r", o.r, "Fixed overflow radius (default r(L) = 3 + sqrt(ln L))");
    ql->add_option("--grid", o.grid, "θ midpoints for e_L (default 1025)");
    add_out(ql);

    auto* fr = app.add_subcommand("fisher-rate", "Fisher-information rate under correlated noise (CSV)");
    fr->add_option("--acov", o.acov, "white | ar1 (default ar1)");
    fr->add_option("--rho", o.rho, "AR(1) correlation (default 0.5)");
    fr->add_option("--variance", o.variance, "Noise variance γ(0) (default 1)");
    fr->add_option("--n", o.n, "Numbers of antennas, comma separated")->delimiter(',');
    add_out(fr);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "jcap: " << e.what() << '\n';
        return 1;
    }

    const auto* sub = app.get_subcommands().front();
    const std::string cmd = sub->get_name();
    std::ostringstream buf;
    try {
        if (cmd == "fisher") cmd_fisher(o, buf);
        else if (cmd == "jf") cmd_jf(o, buf);
        else if (cmd == "prior") cmd_prior(o, buf);
        else if (cmd == "lambda-star") cmd_lambda_star(o, buf);
        else if (cmd == "capacity") cmd_capacity(o, buf);
        else if (cmd == "constellation") cmd_constellation(o, buf);
        else if (cmd == "fit-poly") cmd_fit_poly(o, buf);
        else if (cmd == "mi") cmd_mi(o, buf);
        else if (cmd == "quant-loss") cmd_quant_loss(o, buf);
        else if (cmd == "fisher-rate") cmd_fisher_rate(o, buf);
    } catch (const NumericalError& e) {
        err << "jcap: numerical failure in " << op_label(cmd, o) << ": " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << "jcap: invalid input: " << e.what() << '\n';
        return 1;
    } catch (const ContractError& e) {
        err << "jcap: invalid input: " << e.what() << '\n';
        return 1;
    } catch (const UnsupportedError& e) {
        err << "jcap: invalid input: " << e.what() << '\n';
        return 1;
    } catch (const json::exception& e) {
        err << "jcap: invalid input: " << e.what() << '\n';
        return 1;
    }

    if (o.out.empty()) {
        out << buf.str();
    } else {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) {
            err << "jcap: invalid input: cannot write '" << o.out << "'\n";
            return 1;
        }
        f << buf.str();
    }
    return 0;
}

}  // namespace jcap::cli
