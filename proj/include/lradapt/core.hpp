#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lradapt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Optimization state θ. Plain Eigen vector; finiteness is checked by
/// validate_params() rather than enforced on every write.
using ParamVector = Eigen::VectorXd;

enum class ErrorCode {
    DimensionMismatch,
    NonFinite,
    DegenerateDenominator,
    NonPositivePhi,
    InsufficientSamples,
    MissingPerExample,
    InvalidConfig,
    SingularSolve,
    EmptyBatch,
    Parse,
    Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

bool all_finite(const Vector& v);

/// Shortest-round-trip-safe text form (17 significant digits, "nan"/"inf").
std::string format_real(double x);
/// Strict parse of a whole string as a double; nullopt on trailing junk.
std::optional<double> parse_real(std::string_view text);

/// One minibatch evaluation of the objective.
struct Observation {
    double value = 0.0;
    Vector gradient;
    std::optional<Vector> per_example;  ///< individual losses, regularizer included
    double noise_var = 0.0;             ///< R_i
};

/// Builds an observation whose value is the mean of `per_example`.
Observation observation_from_per_example(Vector per_example, Vector gradient, double noise_var = 0.0);

std::vector<std::string> validate_params(const ParamVector& theta);
std::vector<std::string> validate(const Observation& obs, Eigen::Index dim);

// ---------------------------------------------------------------------------
// Metric state

enum class MetricKind { SGD, Adagrad, RMSprop, Momentum, Adam };

std::string_view to_string(MetricKind kind);
std::optional<MetricKind> parse_metric_kind(std::string_view name);

struct MetricHyper {
    double beta = 0.5;     ///< Momentum
    double beta1 = 0.5;    ///< Adam first moment
    double beta2 = 0.999;  ///< Adam second moment
    double alpha = 0.99;   ///< RMSprop decay
    double epsilon = 1e-10;
};

/// Accumulators realizing the diagonal/rank-1 prior covariance of one
/// optimizer family. Buffers a kind does not use stay empty.
struct MetricState {
    MetricKind kind = MetricKind::SGD;
    Eigen::Index dim = 0;
    Vector diag_accum;    ///< G_i (Adagrad, RMSprop, Adam second moment)
    Vector momentum_buf;  ///< m_i (Momentum, Adam)
    std::int64_t step_count = 0;
    MetricHyper hyper;
};

std::vector<std::string> validate(const MetricHyper& hyper);
std::vector<std::string> validate(const MetricState& state);

// ---------------------------------------------------------------------------
// Adaptation config

struct NoiseZero {};
struct NoiseFixed {
    double variance = 0.0;
};
/// Sample variance of per-example losses divided by the batch size.
struct NoiseCLT {};
struct NoiseProportional {
    double coefficient = 0.0;
};
using NoiseMode = std::variant<NoiseZero, NoiseFixed, NoiseCLT, NoiseProportional>;

std::string to_string(const NoiseMode& mode);
/// Parses "zero", "fixed:R", "clt", "proportional:C".
std::optional<NoiseMode> parse_noise_mode(std::string_view text);

enum class Cadence { EveryStep, PowerOfTwoEpochs };

std::string_view to_string(Cadence cadence);
std::optional<Cadence> parse_cadence(std::string_view text);

struct AdaptConfig {
    double eta0 = 1e-3;
    double alpha_up = 1.2;
    double alpha_down = 0.5;
    double ratio_hi = 4.0 / 3.0;
    double ratio_lo = 3.0 / 4.0;
    std::optional<double> f_star;
    NoiseMode noise = NoiseZero{};
    Cadence cadence = Cadence::EveryStep;
    double phi_eps = 1e-12;
    double eta_min = 1e-12;
    double eta_max = 1e6;
    /// When false η stays at eta0 and the same-batch re-evaluation is skipped.
    bool enabled = true;
};

std::vector<std::string> validate(const AdaptConfig& cfg);

// ---------------------------------------------------------------------------
// Trace

enum class StepFlag : std::uint32_t {
    PhiNonPositive = 1u << 0,
    DeltaFClamped = 1u << 1,
    PDViolation = 1u << 2,
    EtaClampedMin = 1u << 3,
    EtaClampedMax = 1u << 4,
    TrialRejected = 1u << 5,   ///< non-finite f_+, θ restored
    RatioNonFinite = 1u << 6,
    AdaptSkipped = 1u << 7,    ///< cadence or config skipped the ratio test
};

class StepFlags {
public:
    constexpr StepFlags() = default;

    constexpr void set(StepFlag f) noexcept { bits_ |= static_cast<std::uint32_t>(f); }
    [[nodiscard]] constexpr bool has(StepFlag f) const noexcept {
        return (bits_ & static_cast<std::uint32_t>(f)) != 0;
    }
    [[nodiscard]] constexpr bool empty() const noexcept { return bits_ == 0; }
    [[nodiscard]] constexpr std::uint32_t bits() const noexcept { return bits_; }
    constexpr StepFlags& operator|=(StepFlags other) noexcept {
        bits_ |= other.bits_;
        return *this;
    }
    friend constexpr bool operator==(StepFlags, StepFlags) = default;

    /// Semicolon-joined flag names in bit order; empty string when no flag is set.
    [[nodiscard]] std::string to_string() const;
    static std::optional<StepFlags> parse(std::string_view text);

private:
    std::uint32_t bits_ = 0;
};

std::string_view to_string(StepFlag flag);

struct StepRecord {
    std::int64_t iter = 0;
    std::int64_t epoch = 0;
    double f_before = 0.0;
    double f_after = 0.0;  ///< same-batch re-evaluation, NaN when skipped
    double phi = 0.0;
    double delta_f = 0.0;
    double ratio = 0.0;    ///< NaN when no ratio test ran
    double eta_before = 0.0;
    double eta_after = 0.0;
    double step_norm = 0.0;
    StepFlags flags;
    double noise_var = 0.0;
};

}  // namespace lradapt
