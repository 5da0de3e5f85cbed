#pragma once

// Experiment configuration: JSON schema, strict parsing (unknown keys are
// errors), per-system/per-task defaults, and canonical serialization.
// Parsing then re-serializing a config is idempotent because resolution
// fills every field explicitly.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dtsesn/errors.hpp"
#include "dtsesn/reservoir.hpp"
#include "dtsesn/systems.hpp"

namespace dtsesn {

enum class TaskKind { task1, task2 };
enum class ModelKind { dts, li };

inline const char* task_name(TaskKind t) { return t == TaskKind::task1 ? "task1" : "task2"; }
inline const char* kind_name(ModelKind k) { return k == ModelKind::dts ? "dts" : "li"; }

struct SweepConfig {
    std::string name;  // one of alpha_min, alpha, gamma, rho, zeta, beta, N_x
    std::vector<double> values;

    bool operator==(const SweepConfig&) const = default;
};

struct AnalysisOptions {
    bool spectrum = false;
    bool weight_profile = false;
    double bins_per_decade = 10.0;

    bool operator==(const AnalysisOptions&) const = default;
};

struct ExperimentConfig {
    SystemId system = SystemId::rulkov;
    std::map<std::string, double> system_params;    // overrides only
    std::optional<std::vector<double>> initial_state;

    double dt = 1.0;
    double t_trans = 0.0;
    double t_train = 0.0;
    double t_test = 0.0;

    TaskKind task = TaskKind::task1;

    ModelKind kind = ModelKind::dts;
    int n_x = 0;
    double density = 0.1;
    double rho = 1.0;
    double gamma = 1.0;
    double zeta = 0.0;
    double beta = 1e-3;
    double alpha_min = 1e-3;
    double alpha_max = 1.0;
    double alpha = 1.0;  // LI-ESN constant leak rate
    double epsilon = 0.4;
    double divergence_cap = 1e6;
    bool feedback_only_closed_loop = false;

    std::optional<SweepConfig> sweep;

    int seed_count = 1;
    std::uint64_t seed_base = 1;

    std::string out_dir = "out";
    std::vector<std::string> formats = {"csv"};

    AnalysisOptions analysis;

    bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

using json = nlohmann::json;

inline void require_keys(const json& obj, const std::set<std::string>& allowed,
                         const char* context) {
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw ConfigError("unknown key '" + item.key() + "' in " + context);
}

inline double get_number(const json& obj, const char* key, const char* context) {
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(std::string("'") + key + "' in " + context +
                                          " must be a number");
    return v.get<double>();
}

inline int get_int(const json& obj, const char* key, const char* context) {
    const double v = get_number(obj, key, context);
    if (v != std::floor(v))
        throw ConfigError(std::string("'") + key + "' in " + context + " must be an integer");
    return static_cast<int>(v);
}

}  // namespace detail

/// Built-in time step and segment durations for a system/task pair.
inline void default_data(SystemId system, TaskKind task, double& dt, double& t_trans,
                         double& t_train, double& t_test) {
    switch (system) {
        case SystemId::rulkov: dt = 1.0; t_trans = 4000; t_train = 8000; t_test = 4000; break;
        case SystemId::hindmarsh_rose: dt = 0.05; t_trans = 200; t_train = 1200; t_test = 600; break;
        case SystemId::tc_vdp: dt = 0.01; t_trans = 50; t_train = 150; t_test = 100; break;
        case SystemId::tc_lorenz:
            dt = 0.01;
            t_trans = 30;
            t_train = (task == TaskKind::task2) ? 120 : 60;  // longer training for closed loop
            t_test = 30;
            break;
    }
}

/// Built-in model hyperparameters for a system/task pair.
inline void default_model(SystemId system, TaskKind task, ExperimentConfig& c) {
    if (task == TaskKind::task1) {
        c.zeta = 0.0;
        c.beta = 1e-3;
        c.alpha_min = 1e-3;
        if (system == SystemId::tc_lorenz) {
            c.n_x = 400;
            c.gamma = c.rho = 0.1;
        } else {
            c.n_x = 200;
            c.gamma = c.rho = 1.0;
        }
        return;
    }
    switch (system) {
        case SystemId::rulkov:
            c.n_x = 400; c.gamma = 0.8; c.rho = 1.0; c.zeta = 1.0; c.beta = 1e-3;
            c.alpha_min = std::pow(10.0, -6.0 / 9.0); c.epsilon = 0.01;
            break;
        case SystemId::hindmarsh_rose:
            c.n_x = 400; c.gamma = 0.6; c.rho = 0.2; c.zeta = 0.4; c.beta = 1e-3;
            c.alpha_min = std::pow(10.0, -24.0 / 9.0); c.epsilon = 0.05;
            break;
        case SystemId::tc_vdp:
            c.n_x = 400; c.gamma = 0.1; c.rho = 0.03; c.zeta = 0.2; c.beta = 1e-6;
            c.alpha_min = std::pow(10.0, -2.0 / 9.0); c.epsilon = 0.4;
            break;
        case SystemId::tc_lorenz:
            c.n_x = 1000; c.gamma = 0.01; c.rho = 0.01; c.zeta = 0.04; c.beta = 1e-4;
            c.alpha_min = std::pow(10.0, -8.0 / 9.0); c.epsilon = 0.4;
            break;
    }
}

inline const std::set<std::string>& sweep_axes() {
    static const std::set<std::string> axes = {"alpha_min", "alpha", "gamma", "rho",
                                               "zeta",      "beta",  "N_x"};
    return axes;
}

inline void validate_config(const ExperimentConfig& c) {
    if (c.n_x < 1) throw ConfigError("N_x must be >= 1");
    if (!(c.density > 0.0 && c.density <= 1.0)) throw ConfigError("d must be in (0, 1]");
    if (!(c.rho >= 0.0)) throw ConfigError("rho must be >= 0");
    if (!(c.beta >= 0.0)) throw ConfigError("beta must be >= 0");
    if (!(c.alpha_min > 0.0 && c.alpha_min <= c.alpha_max && c.alpha_max <= 1.0))
        throw ConfigError("need 0 < alpha_min <= alpha_max <= 1");
    if (!(c.alpha > 0.0 && c.alpha <= 1.0)) throw ConfigError("alpha must be in (0, 1]");
    if (!(c.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(c.divergence_cap > 0.0)) throw ConfigError("divergence_cap must be positive");
    if (!(c.dt > 0.0) || !(c.t_trans > 0.0) || !(c.t_train > 0.0) || !(c.t_test > 0.0))
        throw ConfigError("dt and all durations must be positive");
    if (c.seed_count < 1) throw ConfigError("seeds.count must be >= 1");
    if (!(c.analysis.bins_per_decade > 0.0))
        throw ConfigError("analysis.bins_per_decade must be positive");
    if (c.initial_state) {
        const SystemSpec spec = make_system(c.system);
        if (static_cast<int>(c.initial_state->size()) != spec.dim)
            throw ConfigError("initial_state needs " + std::to_string(spec.dim) + " components");
    }
    for (const auto& f : c.formats)
        if (f != "csv" && f != "svg") throw ConfigError("unknown output format '" + f + "'");
    if (c.sweep) {
        if (c.sweep->values.empty()) throw ConfigError("sweep.values must be nonempty");
        if (!sweep_axes().count(c.sweep->name))
            throw ConfigError("unknown sweep axis '" + c.sweep->name + "'");
        if (c.sweep->name == "alpha" && c.kind != ModelKind::li)
            throw ConfigError("sweep axis 'alpha' needs model kind 'li'");
        if (c.sweep->name == "alpha_min" && c.kind != ModelKind::dts)
            throw ConfigError("sweep axis 'alpha_min' needs model kind 'dts'");
        for (double v : c.sweep->values) {
            if (c.sweep->name == "N_x" && (v != std::floor(v) || v < 1))
                throw ConfigError("N_x sweep values must be positive integers");
            if ((c.sweep->name == "alpha" || c.sweep->name == "alpha_min") &&
                !(v > 0.0 && v <= 1.0))
                throw ConfigError("leak-rate sweep values must be in (0, 1]");
        }
    }
}

/// Parse a config. Values present in the file win; everything else falls
/// back to the built-in defaults for the selected system and task.
inline ExperimentConfig parse_config(const nlohmann::json& j,
                                     std::optional<TaskKind> task_override = std::nullopt) {
    using detail::get_int;
    using detail::get_number;
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    detail::require_keys(
        j, {"system", "data", "task", "model", "sweep", "seeds", "outputs", "analysis"},
        "config root");

    ExperimentConfig c;

    if (!j.contains("system") || !j.at("system").is_object())
        throw ConfigError("config needs a 'system' object");
    const auto& sys = j.at("system");
    detail::require_keys(sys, {"model", "params", "initial_state"}, "system");
    if (!sys.contains("model")) throw ConfigError("system.model is required");
    try {
        c.system = system_from_name(sys.at("model").get<std::string>());
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    if (sys.contains("params")) {
        if (!sys.at("params").is_object()) throw ConfigError("system.params must be an object");
        for (const auto& item : sys.at("params").items()) {
            if (!item.value().is_number())
                throw ConfigError("system.params values must be numbers");
            c.system_params[item.key()] = item.value().get<double>();
        }
        try {
            make_system(c.system, c.system_params);  // rejects unknown parameter names
        } catch (const PreconditionError& e) {
            throw ConfigError(e.what());
        }
    }
    if (sys.contains("initial_state")) {
        if (!sys.at("initial_state").is_array())
            throw ConfigError("system.initial_state must be an array");
        c.initial_state = sys.at("initial_state").get<std::vector<double>>();
    }

    if (j.contains("task")) {
        const auto t = j.at("task").get<std::string>();
        if (t == "task1") c.task = TaskKind::task1;
        else if (t == "task2") c.task = TaskKind::task2;
        else throw ConfigError("task must be 'task1' or 'task2'");
        if (task_override && *task_override != c.task)
            throw ConfigError(std::string("config task '") + task_name(c.task) +
                              "' does not match the requested subcommand");
    } else if (task_override) {
        c.task = *task_override;
    }

    default_data(c.system, c.task, c.dt, c.t_trans, c.t_train, c.t_test);
    default_model(c.system, c.task, c);
    c.seed_count = (c.task == TaskKind::task1) ? 10 : 20;

    if (j.contains("data")) {
        const auto& d = j.at("data");
        detail::require_keys(d, {"dt", "t_trans", "t_train", "t_test"}, "data");
        if (d.contains("dt")) c.dt = get_number(d, "dt", "data");
        if (d.contains("t_trans")) c.t_trans = get_number(d, "t_trans", "data");
        if (d.contains("t_train")) c.t_train = get_number(d, "t_train", "data");
        if (d.contains("t_test")) c.t_test = get_number(d, "t_test", "data");
    }

    if (j.contains("model")) {
        const auto& m = j.at("model");
        detail::require_keys(m,
                             {"kind", "N_x", "d", "rho", "gamma", "zeta", "beta", "alpha_min",
                              "alpha_max", "alpha", "epsilon", "divergence_cap",
                              "feedback_only_closed_loop"},
                             "model");
        if (m.contains("kind")) {
            const auto k = m.at("kind").get<std::string>();
            if (k == "dts") c.kind = ModelKind::dts;
            else if (k == "li") c.kind = ModelKind::li;
            else throw ConfigError("model.kind must be 'dts' or 'li'");
        }
        if (m.contains("N_x")) c.n_x = get_int(m, "N_x", "model");
        if (m.contains("d")) c.density = get_number(m, "d", "model");
        if (m.contains("rho")) c.rho = get_number(m, "rho", "model");
        if (m.contains("gamma")) c.gamma = get_number(m, "gamma", "model");
        if (m.contains("zeta")) c.zeta = get_number(m, "zeta", "model");
        if (m.contains("beta")) c.beta = get_number(m, "beta", "model");
        if (m.contains("alpha_min")) c.alpha_min = get_number(m, "alpha_min", "model");
        if (m.contains("alpha_max")) c.alpha_max = get_number(m, "alpha_max", "model");
        if (m.contains("alpha")) c.alpha = get_number(m, "alpha", "model");
        if (m.contains("epsilon")) c.epsilon = get_number(m, "epsilon", "model");
        if (m.contains("divergence_cap")) c.divergence_cap = get_number(m, "divergence_cap", "model");
        if (m.contains("feedback_only_closed_loop")) {
            if (!m.at("feedback_only_closed_loop").is_boolean())
                throw ConfigError("model.feedback_only_closed_loop must be a boolean");
            c.feedback_only_closed_loop = m.at("feedback_only_closed_loop").get<bool>();
        }
    }

    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        detail::require_keys(s, {"name", "values"}, "sweep");
        if (!s.contains("name") || !s.contains("values"))
            throw ConfigError("sweep needs 'name' and 'values'");
        SweepConfig sweep;
        sweep.name = s.at("name").get<std::string>();
        if (!s.at("values").is_array()) throw ConfigError("sweep.values must be an array");
        sweep.values = s.at("values").get<std::vector<double>>();
        c.sweep = std::move(sweep);
    }

    if (j.contains("seeds")) {
        const auto& s = j.at("seeds");
        detail::require_keys(s, {"count", "base"}, "seeds");
        if (s.contains("count")) c.seed_count = get_int(s, "count", "seeds");
        if (s.contains("base")) {
            const int base = get_int(s, "base", "seeds");
            if (base < 0) throw ConfigError("seeds.base must be >= 0");
            c.seed_base = static_cast<std::uint64_t>(base);
        }
    }

    if (j.contains("outputs")) {
        const auto& o = j.at("outputs");
        detail::require_keys(o, {"dir", "formats"}, "outputs");
        if (o.contains("dir")) c.out_dir = o.at("dir").get<std::string>();
        if (o.contains("formats")) c.formats = o.at("formats").get<std::vector<std::string>>();
    }

    if (j.contains("analysis")) {
        const auto& a = j.at("analysis");
        detail::require_keys(a, {"spectrum", "weight_profile", "bins_per_decade"}, "analysis");
        if (a.contains("spectrum")) c.analysis.spectrum = a.at("spectrum").get<bool>();
        if (a.contains("weight_profile"))
            c.analysis.weight_profile = a.at("weight_profile").get<bool>();
        if (a.contains("bins_per_decade"))
            c.analysis.bins_per_decade = get_number(a, "bins_per_decade", "analysis");
    }

    validate_config(c);
    return c;
}

inline ExperimentConfig parse_config_string(const std::string& text,
                                            std::optional<TaskKind> task_override = std::nullopt) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        return parse_config(j, task_override);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline ExperimentConfig load_config(const std::string& path,
                                    std::optional<TaskKind> task_override = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_string(text, task_override);
}

/// Canonical serialization: every resolved field explicit, keys sorted by
/// nlohmann's default object ordering.
inline nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["system"]["model"] = system_name(c.system);
    if (!c.system_params.empty()) j["system"]["params"] = c.system_params;
    if (c.initial_state) j["system"]["initial_state"] = *c.initial_state;
    j["data"] = {{"dt", c.dt}, {"t_trans", c.t_trans}, {"t_train", c.t_train}, {"t_test", c.t_test}};
    j["task"] = task_name(c.task);
    j["model"] = {{"kind", kind_name(c.kind)},
                  {"N_x", c.n_x},
                  {"d", c.density},
                  {"rho", c.rho},
                  {"gamma", c.gamma},
                  {"zeta", c.zeta},
                  {"beta", c.beta},
                  {"alpha_min", c.alpha_min},
                  {"alpha_max", c.alpha_max},
                  {"alpha", c.alpha},
                  {"epsilon", c.epsilon},
                  {"divergence_cap", c.divergence_cap},
                  {"feedback_only_closed_loop", c.feedback_only_closed_loop}};
    if (c.sweep) j["sweep"] = {{"name", c.sweep->name}, {"values", c.sweep->values}};
    j["seeds"] = {{"count", c.seed_count}, {"base", c.seed_base}};
    j["outputs"] = {{"dir", c.out_dir}, {"formats", c.formats}};
    j["analysis"] = {{"spectrum", c.analysis.spectrum},
                     {"weight_profile", c.analysis.weight_profile},
                     {"bins_per_decade", c.analysis.bins_per_decade}};
    return j;
}

inline std::string serialize_config(const ExperimentConfig& c) { return to_json(c).dump(2); }

}  // namespace dtsesn
