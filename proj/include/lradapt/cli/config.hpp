#pragma once

#include "lradapt/core.hpp"
#include "lradapt/problems.hpp"

#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lradapt::cli {

enum class ProblemType { Quadratic, Rosenbrock, LogReg };

struct ProblemSpec {
    ProblemType type = ProblemType::Quadratic;
    std::optional<std::vector<double>> start;
    double value_noise = 0.0;  ///< σ of additive Gaussian value noise

    // quadratic
    Eigen::Index dim = 10;
    double condition = 10.0;
    double f_min = 0.0;
    bool rotated = false;

    // logistic regression
    Eigen::Index samples = 2000;
    Eigen::Index features = 20;
    double separation = 6.0;
    Eigen::Index batch_size = 100;
    double l2 = 0.0;
    std::string csv;  ///< replaces the synthetic data when non-empty
};

struct RunConfig {
    ProblemSpec problem;
    MetricKind optimizer = MetricKind::SGD;
    MetricHyper hyper;
    AdaptConfig adapt;
    std::int64_t iters = 500;
    std::uint64_t seed = 0;
    std::string out;
    std::optional<double> loss_tol;
    std::optional<double> grad_tol;
    std::optional<double> loss_threshold;  ///< for iterations-to-threshold in sweeps
};

/// Flat INI-style text: `[problem]`, `[optimizer]`, `[adapt]`, `[run]`
/// sections of `key = value` lines; `#` starts a comment. Unknown sections and
/// keys are rejected. Errors are Error(Parse) with "source:line: message".
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Applies one `section.key = value` setting, with the same validation as the
/// file parser. Used for command-line overrides.
void apply_setting(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value);

/// Cross-field checks (AdaptConfig/metric validity, problem ranges).
void check_config(const RunConfig& cfg);

std::unique_ptr<BatchObjective> make_problem(const RunConfig& cfg);
ParamVector initial_point(const RunConfig& cfg, const BatchObjective& problem);

}  // namespace lradapt::cli
