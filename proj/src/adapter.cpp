#include "lradapt/adapter.hpp"

#include "lradapt/inference.hpp"
#include "lradapt/metrics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace lradapt {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double update_eta(double eta, double ratio, const AdaptConfig& cfg, StepFlags* flags) {
    StepFlags local;
    double next = eta;
    if (!std::isfinite(ratio)) {
        local.set(StepFlag::RatioNonFinite);
        next = eta * cfg.alpha_down;
    } else if (ratio > cfg.ratio_hi) {
        next = eta * cfg.alpha_up;
    } else if (ratio < cfg.ratio_lo) {
        next = eta * cfg.alpha_down;
    }
    if (next < cfg.eta_min) {
        next = cfg.eta_min;
        local.set(StepFlag::EtaClampedMin);
    } else if (next > cfg.eta_max) {
        next = cfg.eta_max;
        local.set(StepFlag::EtaClampedMax);
    }
    if (flags) *flags |= local;
    return next;
}

bool adapts_in_epoch(Cadence cadence, std::int64_t epoch) {
    if (cadence == Cadence::EveryStep) return true;
    return epoch >= 1 && (epoch & (epoch - 1)) == 0;
}

AdaptiveOptimizer::AdaptiveOptimizer(MetricState metric, AdaptConfig config, ParamVector theta0)
    : metric_(std::move(metric)), config_(std::move(config)), theta_(std::move(theta0)), eta_(config_.eta0) {
    if (auto p = validate(config_); !p.empty()) throw Error(ErrorCode::InvalidConfig, p.front());
    if (auto p = validate(metric_); !p.empty()) throw Error(ErrorCode::InvalidConfig, p.front());
    if (auto p = validate_params(theta_); !p.empty()) throw Error(ErrorCode::InvalidConfig, p.front());
    if (theta_.size() != metric_.dim) throw Error(ErrorCode::DimensionMismatch, "theta0 length does not match metric");
}

StepRecord AdaptiveOptimizer::step(BatchObjective& problem) {
    if (problem.dim() != theta_.size()) throw Error(ErrorCode::DimensionMismatch, "objective dimension does not match theta");

    StepRecord rec;
    rec.iter = iter_ + 1;
    rec.epoch = iter_ / problem.batches_per_epoch() + 1;
    rec.eta_before = eta_;
    rec.f_after = kNaN;
    rec.ratio = kNaN;
    rec.delta_f = kNaN;

    const Observation obs = problem.evaluate(theta_);
    if (!std::isfinite(obs.value)) throw Error(ErrorCode::NonFinite, "objective value is not finite");
    if (!obs.gradient.allFinite()) throw Error(ErrorCode::NonFinite, "gradient is not finite");
    const double f = obs.value;
    rec.f_before = f;
    last_grad_norm_ = obs.gradient.norm();

    if (pd_violation(metric_, obs.gradient)) rec.flags.set(StepFlag::PDViolation);
    const Vector v = eta_ * direction(metric_, obs.gradient);
    const double phi = obs.gradient.dot(v);
    rec.phi = phi;

    const double noise = resolve_noise(config_.noise, obs, f);
    rec.noise_var = noise;

    bool ratio_test = config_.enabled && adapts_in_epoch(config_.cadence, rec.epoch);
    ParamVector next;
    if (!(phi > config_.phi_eps)) {
        // No valid implied minimum along an ascent/degenerate direction.
        rec.flags.set(StepFlag::PhiNonPositive);
        if (config_.f_star) rec.delta_f = f - *config_.f_star;
        next = theta_ - v;
    } else if (config_.f_star && f < *config_.f_star) {
        rec.flags.set(StepFlag::DeltaFClamped);
        rec.delta_f = 0.0;
        next = theta_;
    } else {
        rec.delta_f = config_.f_star ? f - *config_.f_star : implied_gap(f, phi, config_.phi_eps);
        next = posterior_step({theta_, v, phi, f, rec.delta_f, noise}, config_.phi_eps);
    }

    if (rec.flags.has(StepFlag::DeltaFClamped)) {
        // θ does not move, so there is nothing to re-evaluate.
        ratio_test = false;
        rec.f_after = f;
    }

    double eta_next = eta_;
    if (ratio_test) {
        const double f_plus = problem.evaluate_value(next);
        rec.f_after = f_plus;
        if (!std::isfinite(f_plus)) {
            rec.flags.set(StepFlag::TrialRejected);
            next = theta_;
            eta_next = update_eta(eta_, kNaN, config_, &rec.flags);
        } else if (!rec.flags.has(StepFlag::PhiNonPositive)) {
            rec.ratio = (f - f_plus) / (phi / 2.0);
            eta_next = update_eta(eta_, rec.ratio, config_, &rec.flags);
        }
    } else {
        rec.flags.set(StepFlag::AdaptSkipped);
    }

    rec.step_norm = (next - theta_).norm();
    theta_ = std::move(next);
    eta_ = eta_next;
    rec.eta_after = eta_;
    ++iter_;
    problem.advance();
    trace_.push_back(rec);
    return rec;
}

std::string_view to_string(StopReason reason) {
    switch (reason) {
        case StopReason::MaxIters: return "max_iters";
        case StopReason::LossTolerance: return "loss_tolerance";
        case StopReason::GradientTolerance: return "gradient_tolerance";
        case StopReason::NonFiniteLoss: return "non_finite_loss";
    }
    return "unknown";
}

RunResult run(AdaptiveOptimizer& opt, BatchObjective& problem, std::int64_t max_iters, const StopCriteria& stop) {
    if (max_iters < 1) throw Error(ErrorCode::InvalidConfig, "max_iters must be >= 1");
    RunResult result;
    const auto first = opt.trace().size();
    for (std::int64_t k = 0; k < max_iters; ++k) {
        StepRecord rec;
        try {
            rec = opt.step(problem);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NonFinite) {
                result.reason = StopReason::NonFiniteLoss;
                break;
            }
            std::ostringstream os;
            os << "iteration " << opt.iter() + 1 << ": " << e.what();
            throw Error(e.code(), os.str());
        }
        if (stop.loss_tol && rec.f_before <= *stop.loss_tol) {
            result.reason = StopReason::LossTolerance;
            break;
        }
        if (stop.grad_norm_tol && opt.last_gradient_norm() <= *stop.grad_norm_tol) {
            result.reason = StopReason::GradientTolerance;
            break;
        }
    }
    result.trace.assign(opt.trace().begin() + static_cast<std::ptrdiff_t>(first), opt.trace().end());
    result.iterations = static_cast<std::int64_t>(result.trace.size());
    return result;
}

}  // namespace lradapt
