#pragma once

// The four chaotic fast-slow benchmark systems: a 2D bursting map (Rulkov),
// the Hindmarsh-Rose neuron, two coupled Van der Pol oscillators with
// separated timescales, and two coupled Lorenz systems. Ground-truth
// trajectories are generated with a fixed-step classical RK4 integrator
// (map iteration for Rulkov) and split into contiguous transient / train /
// test segments.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "dtsesn/csv.hpp"
#include "dtsesn/errors.hpp"
#include "dtsesn/linalg.hpp"

namespace dtsesn {

enum class SystemId { rulkov, hindmarsh_rose, tc_vdp, tc_lorenz };
enum class SystemKind { map, ode };

struct SystemSpec {
    SystemId id{};
    SystemKind kind{};
    int dim = 0;
    std::map<std::string, double> params;
    std::vector<int> fast_indices;
    std::vector<int> slow_indices;
    std::vector<std::string> var_names;
    // Internal RK4 steps per sampling interval. The fast subsystem of the
    // coupled Lorenz model sits outside the RK4 stability region at its
    // nominal sampling step, so that model integrates on a finer grid and
    // is sampled every dt.
    int integration_substeps = 1;
};

inline const char* system_name(SystemId id) {
    switch (id) {
        case SystemId::rulkov: return "rulkov";
        case SystemId::hindmarsh_rose: return "hindmarsh_rose";
        case SystemId::tc_vdp: return "tc_vdp";
        case SystemId::tc_lorenz: return "tc_lorenz";
    }
    return "?";
}

inline SystemId system_from_name(const std::string& name) {
    if (name == "rulkov") return SystemId::rulkov;
    if (name == "hindmarsh_rose") return SystemId::hindmarsh_rose;
    if (name == "tc_vdp") return SystemId::tc_vdp;
    if (name == "tc_lorenz") return SystemId::tc_lorenz;
    throw PreconditionError("unknown system '" + name + "'");
}

/// Build a SystemSpec with default parameters, optionally overriding
/// individual named parameters. Unknown parameter names are rejected.
inline SystemSpec make_system(SystemId id, const std::map<std::string, double>& overrides = {}) {
    SystemSpec spec;
    spec.id = id;
    switch (id) {
        case SystemId::rulkov:
            spec.kind = SystemKind::map;
            spec.dim = 2;
            spec.params = {{"eta", 4.2}, {"mu", 0.001}, {"sigma", -1.0}};
            spec.fast_indices = {0};
            spec.slow_indices = {1};
            spec.var_names = {"x", "y"};
            break;
        case SystemId::hindmarsh_rose:
            spec.kind = SystemKind::ode;
            spec.dim = 3;
            spec.params = {{"b", 3.05}, {"I", 3.0}, {"epsilon", 0.01}, {"s", 4.0}, {"x0", -1.6}};
            spec.fast_indices = {0, 1};
            spec.slow_indices = {2};
            spec.var_names = {"x", "y", "z"};
            break;
        case SystemId::tc_vdp:
            spec.kind = SystemKind::ode;
            spec.dim = 4;
            spec.params = {{"mu1", 5.0}, {"tau1", 0.1}, {"c1", 0.001},
                           {"mu2", 5.0}, {"tau2", 1.0}, {"c2", 1.0}};
            spec.fast_indices = {0, 1};
            spec.slow_indices = {2, 3};
            spec.var_names = {"x1", "y1", "x2", "y2"};
            break;
        case SystemId::tc_lorenz:
            spec.kind = SystemKind::ode;
            spec.dim = 6;
            spec.params = {{"a", 10.0},   {"b", 8.0 / 3.0}, {"c", 10.0},        {"r_s", 28.0},
                           {"r_f", 45.0}, {"epsilon_s", 0.01}, {"epsilon_f", 10.0}};
            spec.fast_indices = {0, 1, 2};
            spec.slow_indices = {3, 4, 5};
            spec.var_names = {"x", "y", "z", "X", "Y", "Z"};
            spec.integration_substeps = 10;
            break;
    }
    for (const auto& [k, v] : overrides) {
        auto it = spec.params.find(k);
        if (it == spec.params.end())
            throw PreconditionError("system '" + std::string(system_name(id)) +
                                    "' has no parameter '" + k + "'");
        it->second = v;
    }
    return spec;
}

/// Fixed initial conditions used when a caller does not supply one; the
/// transient segment washes out their influence.
inline Vector default_initial_state(SystemId id) {
    switch (id) {
        case SystemId::rulkov: return Vector{{-1.0, -3.5}};
        case SystemId::hindmarsh_rose: return Vector::Zero(3);
        case SystemId::tc_vdp: return Vector{{1.0, 0.0, 1.0, 0.0}};
        case SystemId::tc_lorenz: return Vector::Ones(6);
    }
    return Vector{};
}

namespace detail {

inline void require_state(const SystemSpec& spec, const Eigen::Ref<const Vector>& state) {
    if (state.size() != spec.dim)
        throw DimensionError("state has " + std::to_string(state.size()) +
                             " components, system needs " + std::to_string(spec.dim));
    for (Eigen::Index i = 0; i < state.size(); ++i)
        if (!std::isfinite(state[i]))
            throw NumericError("non-finite state component " + std::to_string(i) + " ('" +
                               spec.var_names[static_cast<std::size_t>(i)] + "')");
}

}  // namespace detail

/// Time derivative at `state` for the ODE systems.
inline Vector vector_field(const SystemSpec& spec, const Eigen::Ref<const Vector>& state) {
    if (spec.kind != SystemKind::ode)
        throw PreconditionError("vector_field: system is a map, not an ODE");
    detail::require_state(spec, state);
    const auto& p = spec.params;
    Vector dv(spec.dim);
    switch (spec.id) {
        case SystemId::hindmarsh_rose: {
            const double b = p.at("b"), cur = p.at("I"), eps = p.at("epsilon"), s = p.at("s"),
                         x0 = p.at("x0");
            const double x = state[0], y = state[1], z = state[2];
            dv[0] = y - x * x * x + b * x * x - z + cur;
            dv[1] = 1.0 - 5.0 * x * x - y;
            dv[2] = eps * (s * (x - x0) - z);
            break;
        }
        case SystemId::tc_vdp: {
            const double mu1 = p.at("mu1"), tau1 = p.at("tau1"), c1 = p.at("c1");
            const double mu2 = p.at("mu2"), tau2 = p.at("tau2"), c2 = p.at("c2");
            const double x1 = state[0], y1 = state[1], x2 = state[2], y2 = state[3];
            dv[0] = (y1 + c1 * x2) / tau1;
            dv[1] = (mu1 * (1.0 - x1 * x1) * y1 - x1) / tau1;
            dv[2] = (y2 + c2 * x1) / tau2;
            dv[3] = (mu2 * (1.0 - x2 * x2) * y2 - x2) / tau2;
            break;
        }
        case SystemId::tc_lorenz: {
            const double a = p.at("a"), b = p.at("b"), c = p.at("c");
            const double rs = p.at("r_s"), rf = p.at("r_f");
            const double es = p.at("epsilon_s"), ef = p.at("epsilon_f");
            const double x = state[0], y = state[1], z = state[2];
            const double xs = state[3], ys = state[4], zs = state[5];
            dv[0] = c * a * (y - x);
            dv[1] = c * (rf * x - z * x - y) + ef * ys * x;
            dv[2] = c * (x * y - b * z);
            dv[3] = a * (ys - xs);
            dv[4] = rs * xs - zs * xs - ys - es * x * y;
            dv[5] = xs * ys - b * zs;
            break;
        }
        case SystemId::rulkov:
            throw PreconditionError("vector_field: rulkov is a map");
    }
    return dv;
}

/// One iterate of the Rulkov map.
inline Vector map_step(const SystemSpec& spec, const Eigen::Ref<const Vector>& state) {
    if (spec.id != SystemId::rulkov) throw PreconditionError("map_step: system is not a map");
    detail::require_state(spec, state);
    const double eta = spec.params.at("eta"), mu = spec.params.at("mu"),
                 sigma = spec.params.at("sigma");
    const double x = state[0], y = state[1];
    return Vector{{eta / (1.0 + x * x) + y, y - mu * (x - sigma)}};
}

namespace detail {

/// Classical RK4 step of an arbitrary field; stages are checked for
/// finiteness so a blow-up reports which stage diverged.
template <class Field>
Vector rk4_kernel(Field&& f, const Eigen::Ref<const Vector>& x, double dt) {
    const Vector k1 = f(x);
    if (!k1.allFinite()) throw DivergenceError("non-finite RK4 stage 1", 1);
    const Vector k2 = f((x + (0.5 * dt) * k1).eval());
    if (!k2.allFinite()) throw DivergenceError("non-finite RK4 stage 2", 2);
    const Vector k3 = f((x + (0.5 * dt) * k2).eval());
    if (!k3.allFinite()) throw DivergenceError("non-finite RK4 stage 3", 3);
    const Vector k4 = f((x + dt * k3).eval());
    if (!k4.allFinite()) throw DivergenceError("non-finite RK4 stage 4", 4);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

/// Classical fourth-order Runge-Kutta step of the system's vector field.
inline Vector rk4_step(const SystemSpec& spec, const Eigen::Ref<const Vector>& state, double dt) {
    if (spec.kind != SystemKind::ode) throw PreconditionError("rk4_step: system is not an ODE");
    if (!(dt > 0.0)) throw PreconditionError("rk4_step: dt must be positive");
    return detail::rk4_kernel([&spec](const Eigen::Ref<const Vector>& s) { return vector_field(spec, s); },
                              state, dt);
}

/// Advance one sampling interval: one map iterate, or integration_substeps
/// RK4 steps of size dt / integration_substeps.
inline Vector advance_sample(const SystemSpec& spec, const Eigen::Ref<const Vector>& state,
                             double dt) {
    if (spec.kind == SystemKind::map) return map_step(spec, state);
    Vector s = state;
    const int sub = std::max(spec.integration_substeps, 1);
    const double h = dt / sub;
    for (int i = 0; i < sub; ++i) s = rk4_step(spec, s, h);
    return s;
}

/// States sampled every dt; row k is the state at time (start_step + k) * dt.
struct Trajectory {
    double dt = 1.0;
    std::size_t start_step = 0;
    Matrix data;  // one state per row

    [[nodiscard]] std::size_t steps() const { return static_cast<std::size_t>(data.rows()); }
    [[nodiscard]] double duration() const { return static_cast<double>(data.rows()) * dt; }
};

struct DatasetSplit {
    SystemSpec spec;
    double dt = 1.0;
    Trajectory transient;
    Trajectory train;
    Trajectory test;

    /// All segments stacked back into one contiguous state sequence.
    [[nodiscard]] Matrix full() const {
        Matrix all(transient.data.rows() + train.data.rows() + test.data.rows(), spec.dim);
        all << transient.data, train.data, test.data;
        return all;
    }
};

namespace detail {

inline std::size_t duration_to_steps(double t, double dt, const char* name) {
    if (!(t > 0.0))
        throw PreconditionError(std::string(name) + " must be a positive duration");
    const auto n = static_cast<std::size_t>(std::floor(t / dt + 0.5));
    if (n < 1) throw PreconditionError(std::string(name) + " is shorter than one step");
    return n;
}

}  // namespace detail

/// Simulate t_trans + t_train + t_test and split contiguously. The initial
/// state is the first transient row; durations are rounded to steps with
/// floor(t/dt + 0.5).
inline DatasetSplit generate_dataset(const SystemSpec& spec, double dt, double t_trans,
                                     double t_train, double t_test,
                                     const Eigen::Ref<const Vector>& initial_state) {
    if (!(dt > 0.0)) throw PreconditionError("generate_dataset: dt must be positive");
    detail::require_state(spec, initial_state);
    const std::size_t n1 = detail::duration_to_steps(t_trans, dt, "t_trans");
    const std::size_t n2 = detail::duration_to_steps(t_train, dt, "t_train");
    const std::size_t n3 = detail::duration_to_steps(t_test, dt, "t_test");
    const std::size_t total = n1 + n2 + n3;

    Matrix states(total, spec.dim);
    Vector s = initial_state;
    states.row(0) = s;
    for (std::size_t k = 1; k < total; ++k) {
        try {
            s = advance_sample(spec, s, dt);
        } catch (const NumericError&) {
            throw DivergenceError("trajectory diverged at step " + std::to_string(k), k);
        } catch (const DivergenceError&) {
            throw DivergenceError("trajectory diverged at step " + std::to_string(k), k);
        }
        if (!s.allFinite())
            throw DivergenceError("trajectory diverged at step " + std::to_string(k), k);
        states.row(k) = s;
    }

    DatasetSplit ds;
    ds.spec = spec;
    ds.dt = dt;
    ds.transient = {dt, 0, states.topRows(static_cast<Eigen::Index>(n1))};
    ds.train = {dt, n1, states.middleRows(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n2))};
    ds.test = {dt, n1 + n2, states.bottomRows(static_cast<Eigen::Index>(n3))};
    return ds;
}

/// CSV export: header "k,t,<var names>", one row per state.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                                 const std::vector<std::string>& var_names) {
    out << "k,t";
    for (const auto& v : var_names) out << ',' << v;
    out << '\n';
    for (Eigen::Index r = 0; r < traj.data.rows(); ++r) {
        const std::size_t k = traj.start_step + static_cast<std::size_t>(r);
        out << k << ',' << format_double(static_cast<double>(k) * traj.dt);
        for (Eigen::Index c = 0; c < traj.data.cols(); ++c)
            out << ',' << format_double(traj.data(r, c));
        out << '\n';
    }
}

}  // namespace dtsesn
