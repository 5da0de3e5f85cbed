// Command-line front end: generate benchmark datasets, run the two
// prediction tasks over hyperparameter sweeps, run the structural analyses,
// and render SVG charts from the CSV outputs.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime/numeric error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "dtsesn/dtsesn.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "configuration file (JSON)")->required();
    cmd->add_option("--seed", args.seed, "override seeds.base");
    cmd->add_option("--out-dir", args.out_dir, "override outputs.dir");
    cmd->add_option("--jobs", args.jobs, "worker threads for sweep runs")->default_val(1);
}

dtsesn::ExperimentConfig load(const CommonArgs& args,
                              std::optional<dtsesn::TaskKind> task = std::nullopt) {
    dtsesn::ExperimentConfig cfg = dtsesn::load_config(args.config_path, task);
    if (args.seed) cfg.seed_base = *args.seed;
    if (args.out_dir) cfg.out_dir = *args.out_dir;
    return cfg;
}

void cmd_generate(const CommonArgs& args) {
    const auto cfg = load(args);
    const dtsesn::DatasetSplit ds = dtsesn::build_dataset(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    const std::pair<const char*, const dtsesn::Trajectory*> segments[] = {
        {"transient", &ds.transient}, {"train", &ds.train}, {"test", &ds.test}};
    for (const auto& [name, traj] : segments) {
        const std::string path = cfg.out_dir + "/" + name + ".csv";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw dtsesn::Error("cannot write '" + path + "'");
        dtsesn::write_trajectory_csv(out, *traj, ds.spec.var_names);
        std::cout << path << '\n';
    }
}

void run_task(const CommonArgs& args, dtsesn::TaskKind task) {
    const auto cfg = load(args, task);
    const dtsesn::ExperimentReport report = (task == dtsesn::TaskKind::task1)
                                                ? dtsesn::run_task1(cfg, args.jobs)
                                                : dtsesn::run_task2(cfg, args.jobs);
    for (const auto& path : dtsesn::write_report_files(report, cfg.out_dir))
        std::cout << path << '\n';
    for (const auto& f : cfg.formats)
        if (f == "svg")
            for (const auto& path : dtsesn::emit_plots(cfg)) std::cout << path << '\n';
}

void cmd_analyze(const CommonArgs& args) {
    const auto cfg = load(args);
    for (const auto& path : dtsesn::run_analysis(cfg)) std::cout << path << '\n';
    for (const auto& f : cfg.formats)
        if (f == "svg")
            for (const auto& path : dtsesn::emit_plots(cfg)) std::cout << path << '\n';
}

void cmd_plot(const CommonArgs& args) {
    const auto cfg = load(args);
    for (const auto& path : dtsesn::emit_plots(cfg)) std::cout << path << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Echo state networks with diverse timescales: chaotic fast-slow benchmarks"};
    app.require_subcommand(1);

    CommonArgs gen_args, t1_args, t2_args, an_args, plot_args;
    add_common(app.add_subcommand("generate", "write ground-truth trajectory segments as CSV"),
               gen_args);
    add_common(app.add_subcommand("task1", "one-step-ahead open-loop prediction"), t1_args);
    add_common(app.add_subcommand("task2", "autonomous closed-loop prediction"), t2_args);
    add_common(app.add_subcommand("analyze", "timescale spectrum and readout-weight analyses"),
               an_args);
    add_common(app.add_subcommand("plot", "render SVG charts from CSV outputs"), plot_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (app.got_subcommand("generate")) cmd_generate(gen_args);
        else if (app.got_subcommand("task1")) run_task(t1_args, dtsesn::TaskKind::task1);
        else if (app.got_subcommand("task2")) run_task(t2_args, dtsesn::TaskKind::task2);
        else if (app.got_subcommand("analyze")) cmd_analyze(an_args);
        else if (app.got_subcommand("plot")) cmd_plot(plot_args);
    } catch (const dtsesn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const dtsesn::CsvParseError& e) {
        std::cerr << "csv error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
