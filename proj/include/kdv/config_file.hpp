#pragma once

#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "kdv/experiments.hpp"

namespace kdv {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value '" + value + "' for key '" + key + "'");
    }
}

inline std::int64_t parse_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value '" + value + "' for key '" + key + "'");
    }
}

inline bool parse_flag(const std::string& key, const std::string& value) {
    if (value == "on" || value == "true" || value == "1") return true;
    if (value == "off" || value == "false" || value == "0") return false;
    throw ConfigError("config: bad flag value '" + value + "' for key '" + key +
                      "' (use on/off)");
}

}  // namespace detail

/// Flat key-value experiment configuration:
///
///   # comment
///   [scheme]   name
///   [domain]   a b n
///   [time]     dt t_final
///   [params]   eta mu
///   [solver]   tol max_iter eip eip_mode warm_start
///   [initial]  type (= soliton | three_solitons | two_soliton | bimodal),
///              then type-specific keys: c x0 | q1 q2 k1 k2 w1 w2 dk
///   [output]   path record_every
///   [run]      seed
///
/// Unknown sections or keys are rejected. Inside [initial], `type` must come
/// before the type-specific keys.
inline ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::string at = " (line " + std::to_string(lineno) + ")";

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("config: malformed section header" + at);
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected 'key = value'" + at);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: empty key or value" + at);

        const auto unknown = [&]() -> ConfigError {
            return ConfigError("config: unknown key '" + key + "' in section [" + section +
                               "]" + at);
        };

        if (section == "scheme") {
            if (key == "name") cfg.scheme = parse_scheme(value);
            else throw unknown();
        } else if (section == "domain") {
            if (key == "a") cfg.domain_a = detail::parse_real(key, value);
            else if (key == "b") cfg.domain_b = detail::parse_real(key, value);
            else if (key == "n") cfg.grid_n = static_cast<int>(detail::parse_int(key, value));
            else throw unknown();
        } else if (section == "time") {
            if (key == "dt") cfg.dt = detail::parse_real(key, value);
            else if (key == "t_final") cfg.t_final = detail::parse_real(key, value);
            else throw unknown();
        } else if (section == "params") {
            if (key == "eta") cfg.params.eta = detail::parse_real(key, value);
            else if (key == "mu") cfg.params.mu = detail::parse_real(key, value);
            else throw unknown();
        } else if (section == "solver") {
            if (key == "tol") cfg.solver.tol = detail::parse_real(key, value);
            else if (key == "max_iter")
                cfg.solver.max_iter = static_cast<int>(detail::parse_int(key, value));
            else if (key == "eip") cfg.solver.eip = detail::parse_flag(key, value);
            else if (key == "eip_mode") {
                if (value == "one_step") cfg.solver.eip_mode = ProjectionMode::one_step;
                else if (value == "full_newton") cfg.solver.eip_mode = ProjectionMode::full_newton;
                else throw ConfigError("config: eip_mode must be one_step or full_newton" + at);
            } else if (key == "warm_start") cfg.solver.warm_start = detail::parse_flag(key, value);
            else throw unknown();
        } else if (section == "initial") {
            if (key == "type") {
                if (value == "soliton") cfg.initial = SolitonIC{};
                else if (value == "three_solitons") cfg.initial = ThreeSolitonsIC{};
                else if (value == "two_soliton") cfg.initial = TwoSolitonIC{};
                else if (value == "bimodal") cfg.initial = BimodalIC{};
                else throw ConfigError("config: unknown initial type '" + value + "'" + at);
            } else if (auto* sol = std::get_if<SolitonIC>(&cfg.initial)) {
                if (key == "c") sol->c = detail::parse_real(key, value);
                else if (key == "x0") sol->x0 = detail::parse_real(key, value);
                else throw unknown();
            } else if (auto* bi = std::get_if<BimodalIC>(&cfg.initial)) {
                if (key == "q1") bi->q1 = detail::parse_real(key, value);
                else if (key == "q2") bi->q2 = detail::parse_real(key, value);
                else if (key == "k1") bi->k1 = detail::parse_real(key, value);
                else if (key == "k2") bi->k2 = detail::parse_real(key, value);
                else if (key == "w1") bi->w1 = detail::parse_real(key, value);
                else if (key == "w2") bi->w2 = detail::parse_real(key, value);
                else if (key == "dk") bi->dk = detail::parse_real(key, value);
                else throw unknown();
            } else {
                throw unknown();
            }
        } else if (section == "output") {
            if (key == "path") cfg.output_path = value;
            else if (key == "record_every")
                cfg.record_every = static_cast<int>(detail::parse_int(key, value));
            else throw unknown();
        } else if (section == "run") {
            if (key == "seed")
                cfg.seed = static_cast<std::uint64_t>(detail::parse_int(key, value));
            else throw unknown();
        } else {
            throw ConfigError("config: unknown section [" + section + "]" + at);
        }
    }
    return cfg;
}

inline ExperimentConfig parse_experiment_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse_experiment_config(in);
}

}  // namespace kdv
