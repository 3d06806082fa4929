#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqob/params.hpp"

namespace sqob {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Resolved run configuration. Model fields live at the top level of the JSON
// document; sweep/solver/output are nested objects, all optional.
struct RunConfig {
    ModelParams model;

    struct Sweep {
        double e0_min = 1e-3;
        double e0_max = 20.0;
        int points = 400;
        enum class Spacing { linear, log } spacing = Spacing::linear;
    } sweep;

    struct Solver {
        int depth = 2;
        double tol = 1e-10;
        double settle_tol = 1e-9;
        int max_periods = 5000;
        int n_max = 8;
    } solver;

    struct Output {
        std::string path;
        enum class Format { csv, json } format = Format::csv;
    } output;

    std::vector<double> e0_grid() const {
        std::vector<double> g;
        g.reserve(static_cast<size_t>(sweep.points));
        for (int i = 0; i < sweep.points; ++i) {
            const double t = static_cast<double>(i) / (sweep.points - 1);
            if (sweep.spacing == Sweep::Spacing::log)
                g.push_back(sweep.e0_min * std::pow(sweep.e0_max / sweep.e0_min, t));
            else
                g.push_back(sweep.e0_min + (sweep.e0_max - sweep.e0_min) * t);
        }
        return g;
    }

    nlohmann::json resolved() const {
        nlohmann::json j;
        j["gamma"] = model.gamma;
        j["r"] = model.r;
        j["theta"] = model.theta;
        j["delta"] = model.delta;
        j["epsilon"] = model.epsilon;
        j["n_eff"] = model.n_eff;
        j["mu"] = model.mu;
        j["sweep"] = {{"e0_min", sweep.e0_min},
                      {"e0_max", sweep.e0_max},
                      {"points", sweep.points},
                      {"spacing", sweep.spacing == Sweep::Spacing::log ? "log" : "linear"}};
        j["solver"] = {{"depth", solver.depth},
                       {"tol", solver.tol},
                       {"settle_tol", solver.settle_tol},
                       {"max_periods", solver.max_periods},
                       {"n_max", solver.n_max}};
        j["output"] = {{"path", output.path},
                       {"format", output.format == Output::Format::json ? "json" : "csv"}};
        return j;
    }
};

namespace detail {

inline double need_number(const nlohmann::json& j, const std::string& key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number()) throw ConfigError("config: key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline int need_int(const nlohmann::json& j, const std::string& key, int dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number_integer())
        throw ConfigError("config: key '" + key + "' must be an integer");
    return j.at(key).get<int>();
}

inline void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                       const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("config: unknown key '" + key + "' in " + where);
    }
}

} // namespace detail

inline RunConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    detail::check_keys(j,
                       {"gamma", "r", "theta", "delta", "epsilon", "n_eff", "mu", "sweep",
                        "solver", "output"},
                       "top level");
    if (!j.contains("n_eff")) throw ConfigError("config: missing required key 'n_eff'");

    RunConfig cfg;
    try {
        cfg.model = ModelParams(detail::need_number(j, "gamma", 1.0),
                                detail::need_number(j, "r", 0.0),
                                detail::need_number(j, "theta", 0.0),
                                detail::need_number(j, "delta", 0.0),
                                detail::need_number(j, "epsilon", 0.0),
                                detail::need_number(j, "n_eff", 1.0),
                                detail::need_number(j, "mu", 1.0));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        detail::check_keys(s, {"e0_min", "e0_max", "points", "spacing"}, "sweep");
        cfg.sweep.e0_min = detail::need_number(s, "e0_min", cfg.sweep.e0_min);
        cfg.sweep.e0_max = detail::need_number(s, "e0_max", cfg.sweep.e0_max);
        cfg.sweep.points = detail::need_int(s, "points", cfg.sweep.points);
        if (s.contains("spacing")) {
            const std::string v = s.at("spacing").get<std::string>();
            if (v == "linear")
                cfg.sweep.spacing = RunConfig::Sweep::Spacing::linear;
            else if (v == "log")
                cfg.sweep.spacing = RunConfig::Sweep::Spacing::log;
            else
                throw ConfigError("config: key 'spacing' must be 'linear' or 'log'");
        }
    }
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        detail::check_keys(s, {"depth", "tol", "settle_tol", "max_periods", "n_max"},
                           "solver");
        cfg.solver.depth = detail::need_int(s, "depth", cfg.solver.depth);
        cfg.solver.tol = detail::need_number(s, "tol", cfg.solver.tol);
        cfg.solver.settle_tol = detail::need_number(s, "settle_tol", cfg.solver.settle_tol);
        cfg.solver.max_periods = detail::need_int(s, "max_periods", cfg.solver.max_periods);
        cfg.solver.n_max = detail::need_int(s, "n_max", cfg.solver.n_max);
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        detail::check_keys(o, {"path", "format"}, "output");
        if (o.contains("path")) cfg.output.path = o.at("path").get<std::string>();
        if (o.contains("format")) {
            const std::string v = o.at("format").get<std::string>();
            if (v == "csv")
                cfg.output.format = RunConfig::Output::Format::csv;
            else if (v == "json")
                cfg.output.format = RunConfig::Output::Format::json;
            else
                throw ConfigError("config: key 'format' must be 'csv' or 'json'");
        }
    }

    if (!(cfg.sweep.e0_min < cfg.sweep.e0_max))
        throw ConfigError("config: key 'e0_min' must be < 'e0_max'");
    if (cfg.sweep.points < 3) throw ConfigError("config: key 'points' must be >= 3");
    if (cfg.solver.depth < 1 || cfg.solver.depth > 20)
        throw ConfigError("config: key 'depth' must be in [1, 20]");
    if (cfg.solver.tol <= 0.0) throw ConfigError("config: key 'tol' must be > 0");
    if (cfg.solver.settle_tol <= 0.0)
        throw ConfigError("config: key 'settle_tol' must be > 0");
    if (cfg.solver.max_periods < 1)
        throw ConfigError("config: key 'max_periods' must be >= 1");
    if (cfg.solver.n_max < 1) throw ConfigError("config: key 'n_max' must be >= 1");
    return cfg;
}

} // namespace sqob
