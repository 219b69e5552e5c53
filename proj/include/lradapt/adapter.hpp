#pragma once

#include "lradapt/core.hpp"
#include "lradapt/problems.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace lradapt {

/// Multiplicative learning-rate update from the observed/expected decrease
/// ratio. Non-finite ratios count as "too large" and set RatioNonFinite.
/// The result is clamped to [eta_min, eta_max]; clamping sets the matching flag.
double update_eta(double eta, double ratio, const AdaptConfig& cfg, StepFlags* flags = nullptr);

/// True when the cadence allows a ratio test in this (1-based) epoch.
bool adapts_in_epoch(Cadence cadence, std::int64_t epoch);

/// Wraps a base optimizer's search direction in the posterior-mean update and
/// adapts η by re-evaluating the same batch after each step.
class AdaptiveOptimizer {
public:
    /// Throws Error(InvalidConfig) on an invalid config, metric or θ₀.
    AdaptiveOptimizer(MetricState metric, AdaptConfig config, ParamVector theta0);

    /// One iteration on the objective's current batch; advances the batch
    /// afterwards. The returned record is also appended to trace().
    StepRecord step(BatchObjective& problem);

    [[nodiscard]] const ParamVector& params() const noexcept { return theta_; }
    [[nodiscard]] double eta() const noexcept { return eta_; }
    [[nodiscard]] std::int64_t iter() const noexcept { return iter_; }
    [[nodiscard]] const MetricState& metric() const noexcept { return metric_; }
    [[nodiscard]] const AdaptConfig& config() const noexcept { return config_; }
    [[nodiscard]] const std::vector<StepRecord>& trace() const noexcept { return trace_; }
    /// ‖g‖ from the most recent step's evaluation (NaN before the first step).
    [[nodiscard]] double last_gradient_norm() const noexcept { return last_grad_norm_; }

private:
    MetricState metric_;
    AdaptConfig config_;
    ParamVector theta_;
    double eta_;
    std::int64_t iter_ = 0;
    double last_grad_norm_ = std::numeric_limits<double>::quiet_NaN();
    std::vector<StepRecord> trace_;
};

struct StopCriteria {
    // Checked after each step against that step's own evaluation, so stopping
    // costs no extra objective calls.
    std::optional<double> loss_tol;       ///< f_before <= loss_tol
    std::optional<double> grad_norm_tol;  ///< ‖g‖ <= grad_norm_tol
};

enum class StopReason { MaxIters, LossTolerance, GradientTolerance, NonFiniteLoss };

std::string_view to_string(StopReason reason);

struct RunResult {
    std::vector<StepRecord> trace;
    StopReason reason = StopReason::MaxIters;
    std::int64_t iterations = 0;
};

/// Repeated step() calls until max_iters or a stopping criterion fires.
/// Non-NonFinite step errors are rethrown with the iteration index prepended.
RunResult run(AdaptiveOptimizer& opt, BatchObjective& problem, std::int64_t max_iters, const StopCriteria& stop = {});

}  // namespace lradapt
