#include "lradapt/cli/commands.hpp"

#include "lradapt/cli/trace_csv.hpp"
#include "lradapt/metrics.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace lradapt::cli {

namespace fs = std::filesystem;

RunConfig resolve_config(const std::string& config_path, const RunOverrides& o) {
    RunConfig cfg = load_config(config_path);
    auto set = [&](const char* section, const char* key, const std::string& value) {
        try {
            apply_setting(cfg, section, key, value);
        } catch (const Error& e) {
            throw Error(e.code(), std::string("command-line override: ") + e.what());
        }
    };
    if (o.eta0) cfg.adapt.eta0 = *o.eta0;
    if (o.optimizer) set("optimizer", "name", *o.optimizer);
    if (o.fstar) set("adapt", "f_star", *o.fstar);
    if (o.noise) set("adapt", "noise", *o.noise);
    if (o.iters) cfg.iters = *o.iters;
    if (o.seed) cfg.seed = *o.seed;
    if (o.out) cfg.out = *o.out;
    check_config(cfg);
    return cfg;
}

std::string resolve_output_path(const RunConfig& cfg) {
    if (!cfg.out.empty()) return cfg.out;
    const char* dir = std::getenv(kOutDirEnv);
    return (fs::path(dir && *dir ? dir : ".") / "trace.csv").string();
}

RunOutcome execute(const RunConfig& cfg) {
    auto problem = make_problem(cfg);
    AdaptiveOptimizer opt(make_metric(cfg.optimizer, problem->dim(), cfg.hyper), cfg.adapt,
                          initial_point(cfg, *problem));
    StopCriteria stop{cfg.loss_tol, cfg.grad_tol};
    RunOutcome outcome;
    outcome.result = run(opt, *problem, cfg.iters, stop);
    outcome.final_loss = final_loss(outcome.result.trace);
    outcome.final_eta = opt.eta();
    outcome.theta = opt.params();
    return outcome;
}

namespace {

void ensure_parent(const std::string& path) {
    const auto parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

bool is_config_error(const Error& e) {
    switch (e.code()) {
        case ErrorCode::InvalidConfig:
        case ErrorCode::Parse:
        case ErrorCode::Io:
        case ErrorCode::DimensionMismatch: return true;
        default: return false;
    }
}

}  // namespace

int cmd_run(const std::string& config_path, const RunOverrides& overrides, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    std::string path;
    try {
        cfg = resolve_config(config_path, overrides);
        path = resolve_output_path(cfg);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    RunOutcome outcome;
    try {
        outcome = execute(cfg);
        ensure_parent(path);
        write_trace(path, outcome.result.trace);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_config_error(e) ? kExitConfig : kExitDiverged;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    out << "final_loss " << format_real(outcome.final_loss) << '\n'
        << "final_eta " << format_real(outcome.final_eta) << '\n'
        << "iterations " << outcome.result.iterations << '\n'
        << "stop " << to_string(outcome.result.reason) << '\n'
        << "trace " << path << '\n';
    return outcome.result.reason == StopReason::NonFiniteLoss ? kExitDiverged : kExitOk;
}

std::vector<double> parse_eta_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto v = parse_real(item);
        if (!v || !(*v > 0.0) || !std::isfinite(*v))
            throw Error(ErrorCode::Parse, "invalid learning rate '" + item + "' in --etas");
        grid.push_back(*v);
    }
    if (grid.empty()) throw Error(ErrorCode::InvalidConfig, "--etas grid is empty");
    return grid;
}

namespace {

std::string run_trace_path(const std::string& base, std::size_t index) {
    fs::path p(base);
    const std::string ext = p.has_extension() ? p.extension().string() : ".csv";
    return (p.parent_path() / (p.stem().string() + "_run" + std::to_string(index) + ext)).string();
}

std::string summary_path(const std::string& base) {
    fs::path p(base);
    return (p.parent_path() / (p.stem().string() + "_summary.csv")).string();
}

SweepRow sweep_one(RunConfig cfg, double eta0, const std::string& trace_path) {
    SweepRow row;
    row.eta0 = eta0;
    row.trace_path = trace_path;
    cfg.adapt.eta0 = eta0;
    cfg.adapt.eta_min = std::min(cfg.adapt.eta_min, eta0);
    cfg.adapt.eta_max = std::max(cfg.adapt.eta_max, eta0);
    try {
        const RunOutcome outcome = execute(cfg);
        write_trace(trace_path, outcome.result.trace);
        row.final_loss = outcome.final_loss;
        row.final_eta = outcome.final_eta;
        row.iterations = outcome.result.iterations;
        if (cfg.loss_threshold) {
            for (const auto& r : outcome.result.trace) {
                if (r.f_before <= *cfg.loss_threshold) {
                    row.iters_to_threshold = r.iter;
                    break;
                }
            }
        }
        row.status = outcome.result.reason == StopReason::NonFiniteLoss ? "diverged" : "ok";
    } catch (const std::exception& e) {
        row.final_loss = std::numeric_limits<double>::quiet_NaN();
        row.final_eta = std::numeric_limits<double>::quiet_NaN();
        row.status = std::string("error: ") + e.what();
    }
    return row;
}

}  // namespace

std::vector<SweepRow> sweep(const RunConfig& base, const std::vector<double>& grid, int jobs) {
    if (grid.empty()) throw Error(ErrorCode::InvalidConfig, "eta grid is empty");
    const std::string out = resolve_output_path(base);
    ensure_parent(out);
    std::vector<SweepRow> rows(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) rows[i] = sweep_one(base, grid[i], run_trace_path(out, i));
    };
    const auto n_workers = static_cast<std::size_t>(std::clamp(jobs, 1, static_cast<int>(grid.size())));
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    pool.clear();
    return rows;
}

int cmd_sweep(const std::string& config_path, const std::string& etas, int jobs, const std::optional<std::string>& out_path,
              std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    std::vector<double> grid;
    try {
        RunOverrides o;
        o.out = out_path;
        cfg = resolve_config(config_path, o);
        grid = parse_eta_grid(etas);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    std::vector<SweepRow> rows;
    try {
        rows = sweep(cfg, grid, jobs);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    const std::string summary = summary_path(resolve_output_path(cfg));
    std::ofstream csv(summary);
    csv << "eta0,final_loss,final_eta,iterations,iters_to_threshold,status,trace\n";
    out << std::left << std::setw(24) << "eta0" << std::setw(24) << "final_loss" << std::setw(24) << "final_eta"
        << std::setw(12) << "iters" << std::setw(14) << "to_threshold" << "status\n";
    bool all_ok = true;
    for (const auto& r : rows) {
        const std::string to_thr = r.iters_to_threshold ? std::to_string(*r.iters_to_threshold) : "-";
        csv << format_real(r.eta0) << ',' << format_real(r.final_loss) << ',' << format_real(r.final_eta) << ','
            << r.iterations << ',' << to_thr << ',' << '"' << r.status << '"' << ',' << r.trace_path << '\n';
        out << std::left << std::setw(24) << format_real(r.eta0) << std::setw(24) << format_real(r.final_loss)
            << std::setw(24) << format_real(r.final_eta) << std::setw(12) << r.iterations << std::setw(14) << to_thr
            << r.status << '\n';
        all_ok = all_ok && r.status == "ok";
    }
    out << "summary " << summary << '\n';
    if (!csv) {
        err << "error: cannot write summary '" << summary << "'\n";
        return kExitConfig;
    }
    return all_ok ? kExitOk : kExitDiverged;
}

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Learning-rate adaptation by Gaussian inference: experiment runner"};
    app.require_subcommand(1);

    std::string config;
    RunOverrides overrides;
    std::optional<std::string> noise;
    auto* run_cmd = app.add_subcommand("run", "Run one experiment and write its trace CSV");
    run_cmd->add_option("--config", config, "Config file")->required();
    run_cmd->add_option("--eta0", overrides.eta0, "Initial learning rate");
    run_cmd->add_option("--optimizer", overrides.optimizer, "sgd|adagrad|rmsprop|momentum|adam");
    run_cmd->add_option("--fstar", overrides.fstar, "Known lower bound f* or 'none'");
    run_cmd->add_option("--noise", overrides.noise, "zero|fixed:R|clt|proportional:C");
    run_cmd->add_option("--iters", overrides.iters, "Iteration budget");
    run_cmd->add_option("--seed", overrides.seed, "Random seed");
    run_cmd->add_option("--out", overrides.out, "Trace CSV path");

    std::string sweep_config;
    std::string etas;
    int jobs = 1;
    std::optional<std::string> sweep_out;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a grid of initial learning rates");
    sweep_cmd->add_option("--config", sweep_config, "Config file")->required();
    sweep_cmd->add_option("--etas", etas, "Comma-separated initial learning rates")->required();
    sweep_cmd->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out", sweep_out, "Base trace path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
    }
    if (run_cmd->parsed()) return cmd_run(config, overrides, out, err);
    return cmd_sweep(sweep_config, etas, jobs, sweep_out, out, err);
}

}  // namespace lradapt::cli
