#include "lradapt/core.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

namespace lradapt {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
        case ErrorCode::NonPositivePhi: return "NonPositivePhi";
        case ErrorCode::InsufficientSamples: return "InsufficientSamples";
        case ErrorCode::MissingPerExample: return "MissingPerExample";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::SingularSolve: return "SingularSolve";
        case ErrorCode::EmptyBatch: return "EmptyBatch";
        case ErrorCode::Parse: return "Parse";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

bool all_finite(const Vector& v) { return v.allFinite(); }

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
    return std::string(buf.data(), end);
}

std::optional<double> parse_real(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

Observation observation_from_per_example(Vector per_example, Vector gradient, double noise_var) {
    if (per_example.size() == 0) throw Error(ErrorCode::EmptyBatch, "observation needs at least one per-example loss");
    Observation obs;
    obs.value = per_example.mean();
    obs.gradient = std::move(gradient);
    obs.per_example = std::move(per_example);
    obs.noise_var = noise_var;
    return obs;
}

std::vector<std::string> validate_params(const ParamVector& theta) {
    std::vector<std::string> out;
    if (theta.size() < 1) out.emplace_back("parameter vector is empty");
    if (!theta.allFinite()) out.emplace_back("parameter vector has non-finite entries");
    return out;
}

std::vector<std::string> validate(const Observation& obs, Eigen::Index dim) {
    std::vector<std::string> out;
    if (obs.gradient.size() != dim) {
        std::ostringstream os;
        os << "gradient length " << obs.gradient.size() << " != dimension " << dim;
        out.push_back(os.str());
    }
    if (!std::isfinite(obs.value)) out.emplace_back("loss value is not finite");
    if (!obs.gradient.allFinite()) out.emplace_back("gradient has non-finite entries");
    if (!(obs.noise_var >= 0.0)) out.emplace_back("noise_var must be >= 0");
    if (obs.per_example) {
        const Vector& pe = *obs.per_example;
        if (pe.size() == 0) {
            out.emplace_back("per_example is present but empty");
        } else {
            const double mean = pe.mean();
            const double scale = std::max({std::abs(mean), std::abs(obs.value), 1e-300});
            if (std::abs(mean - obs.value) > 1e-9 * scale) out.emplace_back("per_example mean does not match value");
        }
    }
    return out;
}

std::string_view to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::SGD: return "sgd";
        case MetricKind::Adagrad: return "adagrad";
        case MetricKind::RMSprop: return "rmsprop";
        case MetricKind::Momentum: return "momentum";
        case MetricKind::Adam: return "adam";
    }
    return "unknown";
}

std::optional<MetricKind> parse_metric_kind(std::string_view name) {
    for (auto k : {MetricKind::SGD, MetricKind::Adagrad, MetricKind::RMSprop, MetricKind::Momentum, MetricKind::Adam}) {
        if (name == to_string(k)) return k;
    }
    return std::nullopt;
}

std::vector<std::string> validate(const MetricHyper& h) {
    std::vector<std::string> out;
    auto in_unit = [](double x) { return x >= 0.0 && x < 1.0; };
    if (!in_unit(h.beta)) out.emplace_back("beta must lie in [0,1)");
    if (!in_unit(h.beta1)) out.emplace_back("beta1 must lie in [0,1)");
    if (!in_unit(h.beta2)) out.emplace_back("beta2 must lie in [0,1)");
    if (!(h.alpha > 0.0 && h.alpha < 1.0)) out.emplace_back("alpha must lie in (0,1)");
    if (!(h.epsilon > 0.0) || !std::isfinite(h.epsilon)) out.emplace_back("epsilon must be > 0");
    return out;
}

std::vector<std::string> validate(const MetricState& s) {
    std::vector<std::string> out = validate(s.hyper);
    if (s.dim < 1) out.emplace_back("metric dimension must be >= 1");
    const bool uses_diag = s.kind == MetricKind::Adagrad || s.kind == MetricKind::RMSprop || s.kind == MetricKind::Adam;
    const bool uses_mom = s.kind == MetricKind::Momentum || s.kind == MetricKind::Adam;
    if (uses_diag) {
        if (s.diag_accum.size() != s.dim) out.emplace_back("diag_accum length does not match dimension");
        else if ((s.diag_accum.array() < 0.0).any()) out.emplace_back("diag_accum has negative entries");
    }
    if (uses_mom && s.momentum_buf.size() != s.dim) out.emplace_back("momentum_buf length does not match dimension");
    if (s.step_count < 0) out.emplace_back("step_count must be >= 0");
    return out;
}

std::string to_string(const NoiseMode& mode) {
    struct Visitor {
        std::string operator()(const NoiseZero&) const { return "zero"; }
        std::string operator()(const NoiseFixed& m) const { return "fixed:" + format_real(m.variance); }
        std::string operator()(const NoiseCLT&) const { return "clt"; }
        std::string operator()(const NoiseProportional& m) const { return "proportional:" + format_real(m.coefficient); }
    };
    return std::visit(Visitor{}, mode);
}

std::optional<NoiseMode> parse_noise_mode(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view head = text.substr(0, colon);
    const std::optional<std::string_view> arg =
        colon == std::string_view::npos ? std::nullopt : std::optional(text.substr(colon + 1));
    if (head == "zero" && !arg) return NoiseZero{};
    if (head == "clt" && !arg) return NoiseCLT{};
    if (!arg) return std::nullopt;
    const auto value = parse_real(*arg);
    if (!value || !(*value >= 0.0) || !std::isfinite(*value)) return std::nullopt;
    if (head == "fixed") return NoiseFixed{*value};
    if (head == "proportional") return NoiseProportional{*value};
    return std::nullopt;
}

std::string_view to_string(Cadence cadence) {
    return cadence == Cadence::EveryStep ? "every_step" : "pow2_epochs";
}

std::optional<Cadence> parse_cadence(std::string_view text) {
    if (text == "every_step") return Cadence::EveryStep;
    if (text == "pow2_epochs") return Cadence::PowerOfTwoEpochs;
    return std::nullopt;
}

std::vector<std::string> validate(const AdaptConfig& c) {
    std::vector<std::string> out;
    if (!(c.eta0 > 0.0)) out.emplace_back("eta0 must be > 0");
    if (!(c.alpha_up > 1.0)) out.emplace_back("alpha_up must be > 1");
    if (!(c.alpha_down > 0.0 && c.alpha_down < 1.0)) out.emplace_back("alpha_down must lie in (0,1)");
    if (!(c.ratio_lo < 1.0 && 1.0 < c.ratio_hi)) out.emplace_back("ratio thresholds must satisfy ratio_lo < 1 < ratio_hi");
    if (!(c.phi_eps > 0.0)) out.emplace_back("phi_eps must be > 0");
    if (!(c.eta_min > 0.0 && c.eta_min <= c.eta0 && c.eta0 <= c.eta_max))
        out.emplace_back("eta bounds must satisfy 0 < eta_min <= eta0 <= eta_max");
    if (c.f_star && !std::isfinite(*c.f_star)) out.emplace_back("f_star must be finite");
    if (const auto* f = std::get_if<NoiseFixed>(&c.noise); f && !(f->variance >= 0.0))
        out.emplace_back("fixed noise variance must be >= 0");
    if (const auto* p = std::get_if<NoiseProportional>(&c.noise); p && !(p->coefficient >= 0.0))
        out.emplace_back("proportional noise coefficient must be >= 0");
    return out;
}

namespace {
constexpr std::array kAllFlags = {
    StepFlag::PhiNonPositive, StepFlag::DeltaFClamped, StepFlag::PDViolation,  StepFlag::EtaClampedMin,
    StepFlag::EtaClampedMax,  StepFlag::TrialRejected, StepFlag::RatioNonFinite, StepFlag::AdaptSkipped,
};
}  // namespace

std::string_view to_string(StepFlag flag) {
    switch (flag) {
        case StepFlag::PhiNonPositive: return "PhiNonPositive";
        case StepFlag::DeltaFClamped: return "DeltaFClamped";
        case StepFlag::PDViolation: return "PDViolation";
        case StepFlag::EtaClampedMin: return "EtaClampedMin";
        case StepFlag::EtaClampedMax: return "EtaClampedMax";
        case StepFlag::TrialRejected: return "TrialRejected";
        case StepFlag::RatioNonFinite: return "RatioNonFinite";
        case StepFlag::AdaptSkipped: return "AdaptSkipped";
    }
    return "Unknown";
}

std::string StepFlags::to_string() const {
    std::string out;
    for (auto f : kAllFlags) {
        if (!has(f)) continue;
        if (!out.empty()) out += ';';
        out += lradapt::to_string(f);
    }
    return out;
}

std::optional<StepFlags> StepFlags::parse(std::string_view text) {
    StepFlags flags;
    while (!text.empty()) {
        const auto sep = text.find(';');
        const auto token = text.substr(0, sep);
        bool found = false;
        for (auto f : kAllFlags) {
            if (token == lradapt::to_string(f)) {
                flags.set(f);
                found = true;
                break;
            }
        }
        if (!found) return std::nullopt;
        if (sep == std::string_view::npos) break;
        text.remove_prefix(sep + 1);
    }
    return flags;
}

}  // namespace lradapt
