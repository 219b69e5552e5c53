#pragma once

#include "lradapt/adapter.hpp"
#include "lradapt/cli/config.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace lradapt::cli {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "LRADAPT_OUT_DIR";

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitDiverged = 2 };

struct RunOverrides {
    std::optional<double> eta0;
    std::optional<std::string> optimizer;
    std::optional<std::string> fstar;  ///< number or "none"
    std::optional<std::string> noise;  ///< MODE[:VALUE]
    std::optional<std::int64_t> iters;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

/// Loads the config file and applies command-line overrides on top.
RunConfig resolve_config(const std::string& config_path, const RunOverrides& overrides);

/// Output trace path: explicit setting, else $LRADAPT_OUT_DIR/trace.csv, else ./trace.csv.
std::string resolve_output_path(const RunConfig& cfg);

struct RunOutcome {
    RunResult result;
    double final_loss = 0.0;
    double final_eta = 0.0;
    ParamVector theta;
};

/// Builds problem and optimizer from the config and runs to completion.
RunOutcome execute(const RunConfig& cfg);

int cmd_run(const std::string& config_path, const RunOverrides& overrides, std::ostream& out, std::ostream& err);

struct SweepRow {
    double eta0 = 0.0;
    double final_loss = 0.0;
    double final_eta = 0.0;
    std::int64_t iterations = 0;
    std::optional<std::int64_t> iters_to_threshold;
    std::string status;  ///< "ok", "diverged" or "error: ..."
    std::string trace_path;
};

std::vector<double> parse_eta_grid(const std::string& text);

/// Runs every η₀ of the grid on `jobs` worker threads. One trace file per run
/// plus `<stem>_summary.csv` next to the output path.
int cmd_sweep(const std::string& config_path, const std::string& etas, int jobs, const std::optional<std::string>& out_path,
              std::ostream& out, std::ostream& err);
std::vector<SweepRow> sweep(const RunConfig& base, const std::vector<double>& grid, int jobs);

/// Full command-line entry point (`run` / `sweep` subcommands).
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace lradapt::cli
