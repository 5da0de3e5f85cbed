#pragma once

// Experiment protocols on top of the reservoir: the one-step-ahead open-loop
// task (task 1) and the autonomous closed-loop task (task 2), swept over
// hyperparameter grids with multi-seed aggregation, plus the structural
// analysis recipes. Runs inside a sweep are independent; a bounded worker
// pool executes them and rows land in preassigned slots, so output is
// deterministic regardless of scheduling.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dtsesn/analysis.hpp"
#include "dtsesn/config.hpp"
#include "dtsesn/csv.hpp"
#include "dtsesn/metrics.hpp"
#include "dtsesn/reservoir.hpp"
#include "dtsesn/systems.hpp"

namespace dtsesn {

struct RunRow {
    std::optional<double> swept_value;
    std::uint64_t seed = 0;
    std::optional<double> nrmse;
    std::vector<double> nrmse_per_var;
    std::optional<double> valid_time;
    std::optional<bool> censored;
    bool failed = false;
    std::string error;
};

struct AggregateRow {
    std::optional<double> swept_value;
    std::optional<double> mean;
    std::optional<double> variance;  // unbiased sample variance
    std::optional<double> stderr_of_mean;
    int n = 0;       // runs included
    int failed = 0;  // runs excluded
};

struct ExperimentReport {
    std::string system;
    std::string task;
    std::string model_kind;
    std::string swept_name;  // empty when no sweep
    std::vector<std::string> var_names;
    double t_test = 0.0;
    std::vector<RunRow> rows;
    std::vector<AggregateRow> aggregates;
};

namespace detail {

template <class F>
void parallel_for(std::size_t count, int jobs, F&& body) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    const int workers = std::min<int>(jobs, static_cast<int>(count));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace detail

/// Hyperparameters for one run: the sweep axis (if any) is applied first,
/// then the LI-ESN kind collapses the leak interval to the constant alpha.
inline HyperParams hyper_from_config(const ExperimentConfig& cfg,
                                     std::optional<double> swept_value, std::uint64_t seed) {
    double alpha_min = cfg.alpha_min, alpha_max = cfg.alpha_max, alpha = cfg.alpha;
    HyperParams hp;
    hp.reservoir_size = cfg.n_x;
    hp.density = cfg.density;
    hp.rho = cfg.rho;
    hp.gamma = cfg.gamma;
    hp.zeta = cfg.zeta;
    hp.beta = cfg.beta;
    hp.dt = cfg.dt;
    hp.seed = seed;
    hp.readout = (cfg.task == TaskKind::task1) ? ReadoutMode::state_input_bias
                                               : ReadoutMode::state_only;
    if (swept_value) {
        const std::string& axis = cfg.sweep ? cfg.sweep->name : "";
        const double v = *swept_value;
        if (axis == "alpha_min") alpha_min = v;
        else if (axis == "alpha") alpha = v;
        else if (axis == "gamma") hp.gamma = v;
        else if (axis == "rho") hp.rho = v;
        else if (axis == "zeta") hp.zeta = v;
        else if (axis == "beta") hp.beta = v;
        else if (axis == "N_x") hp.reservoir_size = static_cast<int>(v);
        else throw ConfigError("unknown sweep axis '" + axis + "'");
    }
    if (cfg.kind == ModelKind::li) {
        hp.alpha_min = alpha;
        hp.alpha_max = alpha;
    } else {
        hp.alpha_min = alpha_min;
        hp.alpha_max = alpha_max;
    }
    return hp;
}

inline DatasetSplit build_dataset(const ExperimentConfig& cfg) {
    const SystemSpec spec = make_system(cfg.system, cfg.system_params);
    Vector x0 = default_initial_state(cfg.system);
    if (cfg.initial_state)
        x0 = Eigen::Map<const Vector>(cfg.initial_state->data(),
                                      static_cast<Eigen::Index>(cfg.initial_state->size()));
    return generate_dataset(spec, cfg.dt, cfg.t_trans, cfg.t_train, cfg.t_test, x0);
}

struct Task1Outcome {
    double total_nrmse = 0.0;
    Vector per_var_nrmse;
    TrainedModel model;
};

/// One-step-ahead protocol: wash the transient, teacher-force through the
/// training segment with fast-variable inputs, ridge-train the
/// [state; input; bias] readout against full-state targets, then predict
/// over the test segment with ground-truth inputs. Causal alignment: the
/// input consumed while stepping to time t+dt is the fast observation at
/// time t (the newest available sample), so the full state one step ahead
/// is genuinely forecast rather than copied through the readout.
inline Task1Outcome run_single_task1(const DatasetSplit& ds, const HyperParams& hp) {
    const SystemSpec& spec = ds.spec;
    const auto& fast = spec.fast_indices;
    const Matrix full = ds.full();
    const auto n1 = static_cast<Eigen::Index>(ds.transient.steps());
    const auto n2 = static_cast<Eigen::Index>(ds.train.steps());
    const auto n3 = static_cast<Eigen::Index>(ds.test.steps());
    const Eigen::Index last_train = n1 + n2 - 1;

    const ReservoirMatrices mats = init_reservoir(hp, static_cast<int>(fast.size()), spec.dim);

    // Step k consumes the fast observation and teacher output at time k - 1;
    // states row k then corresponds to time k.
    const Matrix u_drive = full(Eigen::seqN(0, last_train), fast);
    const Matrix teacher = full.topRows(last_train);
    const Matrix states = drive_open_loop(mats, hp, u_drive, teacher,
                                          Vector::Zero(hp.reservoir_size));

    const Matrix train_states = states.middleRows(n1, n2);
    const Matrix train_inputs = full(Eigen::seqN(n1 - 1, n2), fast);
    const Matrix train_targets = full.middleRows(n1, n2);
    TrainedModel model{mats, hp, train_readout(train_states, &train_inputs, train_targets, hp)};

    const Matrix u_test = full(Eigen::seqN(last_train, n3), fast);
    const Vector x_start = states.row(last_train);
    const Vector y_start = full.row(last_train);
    const Matrix preds = predict_open_loop(model, u_test, x_start, y_start);

    Task1Outcome out;
    out.per_var_nrmse.resize(spec.dim);
    out.total_nrmse = nrmse(preds, ds.test.data);
    for (int v = 0; v < spec.dim; ++v)
        out.per_var_nrmse[v] = nrmse(preds.col(v), ds.test.data.col(v));
    out.model = std::move(model);
    return out;
}

struct Task2Outcome {
    double valid_time = 0.0;
    bool censored = false;
    bool diverged = false;
    Matrix predictions;
};

/// Autonomous protocol: during training both the input and feedback
/// channels are teacher-forced with the previous full true state and the
/// readout maps the state to the next true state; at test time the model's
/// own previous output drives both channels. The valid time is measured on
/// the slow variables only.
inline Task2Outcome run_single_task2(const DatasetSplit& ds, const HyperParams& hp,
                                     double epsilon, double magnitude_cap,
                                     bool feedback_only = false) {
    const SystemSpec& spec = ds.spec;
    const Matrix full = ds.full();
    const auto n1 = static_cast<Eigen::Index>(ds.transient.steps());
    const auto n2 = static_cast<Eigen::Index>(ds.train.steps());
    const auto n3 = static_cast<Eigen::Index>(ds.test.steps());
    const Eigen::Index last_train = n1 + n2 - 1;

    const ReservoirMatrices mats = init_reservoir(hp, spec.dim, spec.dim);

    const Matrix drive_rows = full.topRows(last_train);  // d(t) fed into both channels
    const Matrix states = drive_open_loop(mats, hp, drive_rows, drive_rows,
                                          Vector::Zero(hp.reservoir_size));

    const Matrix train_states = states.middleRows(n1, n2);
    const Matrix train_targets = full.middleRows(n1, n2);
    TrainedModel model{mats, hp, train_readout(train_states, nullptr, train_targets, hp)};

    const Matrix warmup = full.topRows(last_train + 1);
    const ClosedLoopResult cl = run_closed_loop(model, warmup, static_cast<std::size_t>(n3),
                                                magnitude_cap, feedback_only);

    const auto& slow = spec.slow_indices;
    const auto covered = static_cast<Eigen::Index>(cl.steps_completed);
    const Matrix test_slow = ds.test.data(Eigen::all, slow);
    const Matrix pred_slow = cl.predictions(Eigen::all, slow);
    const double den = rms_norm(test_slow);  // averaged over the full test period
    if (den <= 0.0)
        throw DegenerateDenominatorError("task 2: slow test signal is identically zero");
    const Vector errors = (pred_slow - test_slow.topRows(covered)).rowwise().norm() / den;

    Task2Outcome out;
    out.valid_time = valid_time(errors, epsilon, ds.dt);
    out.censored = !cl.diverged && covered == n3 && errors.maxCoeff() <= epsilon;
    out.diverged = cl.diverged;
    out.predictions = cl.predictions;
    return out;
}

/// Mean / unbiased variance / standard error over the non-failed rows of
/// one grid point, recomputable exactly from the per-run rows.
inline AggregateRow aggregate_rows(const std::vector<RunRow>& rows,
                                   std::optional<double> swept_value, bool task1_metric) {
    AggregateRow agg;
    agg.swept_value = swept_value;
    std::vector<double> metric;
    for (const auto& row : rows) {
        const bool same_value = (row.swept_value.has_value() == swept_value.has_value()) &&
                                (!swept_value || *row.swept_value == *swept_value);
        if (!same_value) continue;
        if (row.failed) {
            agg.failed += 1;
            continue;
        }
        const auto& v = task1_metric ? row.nrmse : row.valid_time;
        if (v) metric.push_back(*v);
    }
    agg.n = static_cast<int>(metric.size());
    if (!metric.empty()) {
        double sum = 0.0;
        for (double v : metric) sum += v;
        const double mean = sum / static_cast<double>(metric.size());
        agg.mean = mean;
        double ss = 0.0;
        for (double v : metric) ss += (v - mean) * (v - mean);
        const double var = metric.size() > 1 ? ss / static_cast<double>(metric.size() - 1) : 0.0;
        agg.variance = var;
        agg.stderr_of_mean = std::sqrt(var / static_cast<double>(metric.size()));
    }
    return agg;
}

namespace detail {

inline ExperimentReport run_task_common(const ExperimentConfig& cfg, int jobs) {
    const DatasetSplit ds = build_dataset(cfg);
    const bool task1 = cfg.task == TaskKind::task1;

    std::vector<std::optional<double>> values;
    if (cfg.sweep)
        for (double v : cfg.sweep->values) values.emplace_back(v);
    else
        values.emplace_back(std::nullopt);

    const std::size_t seeds = static_cast<std::size_t>(cfg.seed_count);
    const std::size_t total = values.size() * seeds;
    std::vector<RunRow> rows(total);

    detail::parallel_for(total, jobs, [&](std::size_t i) {
        const std::size_t vi = i / seeds;
        const std::size_t si = i % seeds;
        RunRow& row = rows[i];
        row.swept_value = values[vi];
        row.seed = cfg.seed_base + si;
        try {
            const HyperParams hp = hyper_from_config(cfg, values[vi], row.seed);
            if (task1) {
                const Task1Outcome out = run_single_task1(ds, hp);
                row.nrmse = out.total_nrmse;
                row.nrmse_per_var.assign(out.per_var_nrmse.data(),
                                         out.per_var_nrmse.data() + out.per_var_nrmse.size());
            } else {
                const Task2Outcome out = run_single_task2(ds, hp, cfg.epsilon,
                                                          cfg.divergence_cap,
                                                          cfg.feedback_only_closed_loop);
                row.valid_time = out.valid_time;
                row.censored = out.censored;
            }
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
    });

    ExperimentReport report;
    report.system = system_name(cfg.system);
    report.task = task_name(cfg.task);
    report.model_kind = kind_name(cfg.kind);
    report.swept_name = cfg.sweep ? cfg.sweep->name : "";
    report.var_names = ds.spec.var_names;
    report.t_test = static_cast<double>(ds.test.steps()) * ds.dt;
    report.rows = std::move(rows);
    for (const auto& v : values)
        report.aggregates.push_back(aggregate_rows(report.rows, v, task1));
    return report;
}

}  // namespace detail

inline ExperimentReport run_task1(const ExperimentConfig& cfg, int jobs = 1) {
    if (cfg.task != TaskKind::task1) throw ConfigError("run_task1: config task is not task1");
    return detail::run_task_common(cfg, jobs);
}

inline ExperimentReport run_task2(const ExperimentConfig& cfg, int jobs = 1) {
    if (cfg.task != TaskKind::task2) throw ConfigError("run_task2: config task is not task2");
    return detail::run_task_common(cfg, jobs);
}

inline void write_runs_csv(std::ostream& out, const ExperimentReport& report) {
    std::vector<std::string> header = {"system",      "task", "model_kind", "swept_name",
                                       "swept_value", "seed", "nrmse"};
    for (const auto& v : report.var_names) header.push_back("nrmse_" + v);
    header.insert(header.end(), {"valid_time", "censored", "failed"});
    out << join_csv(header) << '\n';
    for (const auto& row : report.rows) {
        std::vector<std::string> fields = {report.system,
                                           report.task,
                                           report.model_kind,
                                           report.swept_name,
                                           format_optional(row.swept_value),
                                           std::to_string(row.seed),
                                           format_optional(row.nrmse)};
        for (std::size_t v = 0; v < report.var_names.size(); ++v)
            fields.push_back(v < row.nrmse_per_var.size() ? format_double(row.nrmse_per_var[v])
                                                          : std::string{});
        fields.push_back(format_optional(row.valid_time));
        fields.push_back(row.censored ? (*row.censored ? "1" : "0") : std::string{});
        fields.push_back(row.failed ? "1" : "0");
        out << join_csv(fields) << '\n';
    }
}

inline void write_summary_csv(std::ostream& out, const ExperimentReport& report) {
    out << "swept_value,mean,variance,stderr,n,failed\n";
    for (const auto& agg : report.aggregates) {
        std::vector<std::string> fields = {format_optional(agg.swept_value),
                                           format_optional(agg.mean),
                                           format_optional(agg.variance),
                                           format_optional(agg.stderr_of_mean),
                                           std::to_string(agg.n),
                                           std::to_string(agg.failed)};
        out << join_csv(fields) << '\n';
    }
}

/// Write runs.csv and summary.csv into the configured output directory.
inline std::vector<std::string> write_report_files(const ExperimentReport& report,
                                                   const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::string runs_path = out_dir + "/runs.csv";
    const std::string summary_path = out_dir + "/summary.csv";
    {
        std::ofstream out(runs_path, std::ios::binary);
        if (!out) throw Error("cannot write '" + runs_path + "'");
        write_runs_csv(out, report);
    }
    {
        std::ofstream out(summary_path, std::ios::binary);
        if (!out) throw Error("cannot write '" + summary_path + "'");
        write_summary_csv(out, report);
    }
    return {runs_path, summary_path};
}

/// Structural analyses. With `spectrum` enabled, one timescale spectrum and
/// histogram per sweep value (or a single pair without a sweep) plus an
/// index file mapping values to files; with `weight_profile` enabled, a
/// task-1 training at the base seed and the per-neuron |W_out| vs alpha
/// table.
inline std::vector<std::string> run_analysis(const ExperimentConfig& cfg) {
    if (!cfg.analysis.spectrum && !cfg.analysis.weight_profile)
        throw ConfigError("analysis config enables neither 'spectrum' nor 'weight_profile'");
    std::filesystem::create_directories(cfg.out_dir);
    std::vector<std::string> files;
    const SystemSpec spec = make_system(cfg.system, cfg.system_params);

    if (cfg.analysis.spectrum) {
        std::vector<std::optional<double>> values;
        if (cfg.sweep)
            for (double v : cfg.sweep->values) values.emplace_back(v);
        else
            values.emplace_back(std::nullopt);

        std::vector<std::string> index_lines = {"index,axis,value,spectrum_file,histogram_file"};
        for (std::size_t j = 0; j < values.size(); ++j) {
            const HyperParams hp = hyper_from_config(cfg, values[j], cfg.seed_base);
            const int n_in = (cfg.task == TaskKind::task1)
                                 ? static_cast<int>(spec.fast_indices.size())
                                 : spec.dim;
            const ReservoirMatrices mats = init_reservoir(hp, n_in, spec.dim);
            const TimescaleSpectrum spectrum = linearized_timescales(mats, hp);
            const TimescaleHistogram hist =
                timescale_histogram(spectrum, cfg.analysis.bins_per_decade);

            const std::string spath = cfg.out_dir + "/spectrum_" + std::to_string(j) + ".csv";
            const std::string hpath = cfg.out_dir + "/histogram_" + std::to_string(j) + ".csv";
            {
                std::ofstream out(spath, std::ios::binary);
                write_spectrum_csv(out, spectrum);
            }
            {
                std::ofstream out(hpath, std::ios::binary);
                write_histogram_csv(out, hist);
            }
            files.push_back(spath);
            files.push_back(hpath);
            index_lines.push_back(join_csv({std::to_string(j),
                                            cfg.sweep ? cfg.sweep->name : "",
                                            format_optional(values[j]),
                                            "spectrum_" + std::to_string(j) + ".csv",
                                            "histogram_" + std::to_string(j) + ".csv"}));
        }
        const std::string ipath = cfg.out_dir + "/analysis_index.csv";
        write_lines(ipath, index_lines);
        files.push_back(ipath);
    }

    if (cfg.analysis.weight_profile) {
        if (cfg.task != TaskKind::task1)
            throw ConfigError("weight_profile analysis needs a task1 configuration");
        const DatasetSplit ds = build_dataset(cfg);
        const HyperParams hp = hyper_from_config(cfg, std::nullopt, cfg.seed_base);
        const Task1Outcome out = run_single_task1(ds, hp);
        std::vector<std::string> labels;
        for (int v = 0; v < spec.dim; ++v) {
            const bool fast = std::find(spec.fast_indices.begin(), spec.fast_indices.end(), v) !=
                              spec.fast_indices.end();
            labels.push_back(spec.var_names[static_cast<std::size_t>(v)] +
                             (fast ? "_fast" : "_slow"));
        }
        const WeightLeakProfile profile = weight_leak_profile(out.model, labels);
        const std::string ppath = cfg.out_dir + "/profile.csv";
        std::ofstream pout(ppath, std::ios::binary);
        write_profile_csv(pout, profile);
        files.push_back(ppath);
    }
    return files;
}

}  // namespace dtsesn
