#pragma once

// Channel specifications as JSON records, e.g.
//   {"kind": "quantized_awgn", "A": 1.0, "thresholds": [-1, 0, 1]}
// Field names per kind are listed in README.md. Malformed records raise
// DomainError.

#include <cstddef>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "jcap/channels.hpp"
#include "jcap/errors.hpp"

namespace jcap {

using json = nlohmann::json;

namespace detail {

inline void require_keys(const json& j, const std::string& kind, const std::set<std::string>& required,
                         const std::set<std::string>& optional = {}) {
    for (const auto& k : required) {
        if (!j.contains(k)) throw DomainError("channel '" + kind + "': missing field '" + k + "'");
    }
    for (const auto& [k, v] : j.items()) {
        if (k != "kind" && !required.count(k) && !optional.count(k)) {
            throw DomainError("channel '" + kind + "': unknown field '" + k + "'");
        }
    }
}

inline double get_number(const json& j, const std::string& key, const std::string& kind) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw DomainError("channel '" + kind + "': field '" + key + "' must be a number");
    return v.get<double>();
}

inline std::vector<double> get_numbers(const json& j, const std::string& key, const std::string& kind) {
    const auto& v = j.at(key);
    if (!v.is_array()) throw DomainError("channel '" + kind + "': field '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw DomainError("channel '" + kind + "': field '" + key + "' must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

inline std::size_t get_count(const json& j, const std::string& key, const std::string& kind) {
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw DomainError("channel '" + kind + "': field '" + key + "' must be a nonnegative integer");
    }
    return v.get<std::size_t>();
}

/// A number means a point mass; otherwise {"points": [...], "probs": [...]}.
inline DiscreteDistribution get_distribution(const json& j, const std::string& key, const std::string& kind) {
    const auto& v = j.at(key);
    if (v.is_number()) return DiscreteDistribution::point_mass(v.get<double>());
    if (!v.is_object()) throw DomainError("channel '" + kind + "': field '" + key + "' must be a number or object");
    const std::string sub = kind + "." + key;
    require_keys(v, sub, {"points", "probs"});
    return {get_numbers(v, "points", sub), get_numbers(v, "probs", sub)};
}

/// {"points": [...], "weights": [...]} or {"N": n, "half_width": w} (uniform grid).
inline DitherSet get_dither(const json& j, const std::string& kind) {
    const auto& v = j.at("dither");
    const std::string sub = kind + ".dither";
    if (!v.is_object()) throw DomainError("channel '" + kind + "': field 'dither' must be an object");
    if (v.contains("N")) {
        require_keys(v, sub, {"N", "half_width"});
        return DitherSet::uniform(get_count(v, "N", sub), get_number(v, "half_width", sub));
    }
    require_keys(v, sub, {"points", "weights"});
    return {get_numbers(v, "points", sub), get_numbers(v, "weights", sub)};
}

inline json distribution_to_json(const DiscreteDistribution& d) {
    if (d.points.size() == 1) return d.points[0];
    return {{"points", d.points}, {"probs", d.probs}};
}

}  // namespace detail

inline Channel channel_from_json(const json& j) {
    if (!j.is_object()) throw DomainError("channel spec must be a JSON object");
    if (!j.contains("kind") || !j.at("kind").is_string()) throw DomainError("channel spec needs a string 'kind'");
    const auto kind = j.at("kind").get<std::string>();
    using namespace detail;
    if (kind == "awgn") {
        require_keys(j, kind, {"A"}, {"noise_var"});
        return Channel::awgn(get_number(j, "A", kind), j.contains("noise_var") ? get_number(j, "noise_var", kind) : 1.0);
    }
    if (kind == "clipped_awgn") {
        require_keys(j, kind, {"A", "B"});
        return Channel::clipped_awgn(get_number(j, "A", kind), get_number(j, "B", kind));
    }
    if (kind == "truncated_awgn") {
        require_keys(j, kind, {"A", "B"});
        return Channel::truncated_awgn(get_number(j, "A", kind), get_number(j, "B", kind));
    }
    if (kind == "quantized_awgn") {
        if (j.contains("levels")) {
            require_keys(j, kind, {"A", "levels"});
            return Channel::uniform_adc(get_number(j, "A", kind), get_count(j, "levels", kind));
        }
        require_keys(j, kind, {"A", "thresholds"});
        return Channel::quantized_awgn(get_number(j, "A", kind), get_numbers(j, "thresholds", kind));
    }
    if (kind == "energy_detection") {
        require_keys(j, kind, {"A"});
        return Channel::energy_detection(get_number(j, "A", kind));
    }
    if (kind == "mimo_imperfect_csi") {
        require_keys(j, kind, {"A", "nt", "sigma2"});
        const auto nt = get_count(j, "nt", kind);
        return Channel::mimo_imperfect_csi(get_number(j, "A", kind), static_cast<int>(nt), get_number(j, "sigma2", kind));
    }
    if (kind == "noncoherent") {
        require_keys(j, kind, {"A", "sigma2"});
        return Channel::noncoherent(get_number(j, "A", kind), get_number(j, "sigma2", kind));
    }
    if (kind == "poisson") {
        require_keys(j, kind, {"A", "h", "mu"});
        return Channel::poisson(get_number(j, "A", kind), get_distribution(j, "h", kind), get_distribution(j, "mu", kind));
    }
    if (kind == "dithered_1bit") {
        require_keys(j, kind, {"A", "dither"});
        return Channel::dithered_1bit(get_number(j, "A", kind), get_dither(j, kind));
    }
    throw DomainError("unknown channel kind '" + kind + "'");
}

inline json channel_to_json(const Channel& ch) {
    json j;
    j["kind"] = ch.kind_name();
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            j["A"] = f.A;
            if constexpr (std::is_same_v<T, channel::Awgn>) {
                if (f.noise_var != 1.0) j["noise_var"] = f.noise_var;
            } else if constexpr (std::is_same_v<T, channel::ClippedAwgn> || std::is_same_v<T, channel::TruncatedAwgn>) {
                j["B"] = f.B;
            } else if constexpr (std::is_same_v<T, channel::QuantizedAwgn>) {
                j["thresholds"] = f.thresholds;
            } else if constexpr (std::is_same_v<T, channel::MimoImperfectCsi>) {
                j["nt"] = f.nt;
                j["sigma2"] = f.sigma2;
            } else if constexpr (std::is_same_v<T, channel::Noncoherent>) {
                j["sigma2"] = f.sigma2;
            } else if constexpr (std::is_same_v<T, channel::Poisson>) {
                j["h"] = detail::distribution_to_json(f.h);
                j["mu"] = detail::distribution_to_json(f.mu);
            } else if constexpr (std::is_same_v<T, channel::DitheredOneBit>) {
                j["dither"] = {{"points", f.dither.points}, {"weights", f.dither.weights}};
            }
        },
        ch.family());
    return j;
}

/// Parse JSON text; syntax errors become DomainError.
inline json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw DomainError(origin + ": invalid JSON (" + e.what() + ")");
    }
}

/// Inline JSON if the argument starts with '{', otherwise a file path.
inline Channel load_channel(const std::string& source) {
    const auto first = source.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && source[first] == '{') {
        return channel_from_json(parse_json_text(source, "inline channel"));
    }
    std::ifstream in(source);
    if (!in) throw DomainError("cannot open channel file '" + source + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return channel_from_json(parse_json_text(ss.str(), source));
}

}  // namespace jcap
