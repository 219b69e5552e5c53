#include "lradapt/inference.hpp"

#include <algorithm>
#include <cmath>

namespace lradapt {

double posterior_factor(double delta_f, double phi, double noise_var, double phi_eps) {
    if (!std::isfinite(delta_f) || !std::isfinite(phi) || !std::isfinite(noise_var))
        throw Error(ErrorCode::NonFinite, "posterior step received a non-finite scalar");
    const double denom = phi + noise_var;
    if (!(denom > phi_eps)) throw Error(ErrorCode::DegenerateDenominator, "phi + R is not above phi_eps");
    return 2.0 * delta_f / denom;
}

ParamVector posterior_step(const InferenceInputs& in, double phi_eps) {
    if (in.theta.size() != in.v.size()) throw Error(ErrorCode::DimensionMismatch, "theta and v differ in length");
    if (!in.theta.allFinite() || !in.v.allFinite() || !std::isfinite(in.f))
        throw Error(ErrorCode::NonFinite, "posterior step received a non-finite vector or loss");
    const double factor = posterior_factor(in.delta_f, in.phi, in.noise_var, phi_eps);
    return in.theta - factor * in.v;
}

double implied_gap(double /*f*/, double phi, double phi_eps) {
    if (!(phi > phi_eps)) throw Error(ErrorCode::NonPositivePhi, "phi is not above phi_eps");
    return phi / 2.0;
}

double estimate_noise(std::span<const double> xs) {
    if (xs.size() < 2) throw Error(ErrorCode::InsufficientSamples, "noise estimate needs at least two samples");
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return ss / (n - 1.0) / n;
}

double estimate_noise(const Vector& per_example) {
    return estimate_noise(std::span<const double>(per_example.data(), static_cast<std::size_t>(per_example.size())));
}

double resolve_noise(const NoiseMode& mode, const Observation& obs, double f) {
    if (std::holds_alternative<NoiseZero>(mode)) return 0.0;
    if (const auto* fixed = std::get_if<NoiseFixed>(&mode)) return fixed->variance;
    if (std::holds_alternative<NoiseCLT>(mode)) {
        if (!obs.per_example) throw Error(ErrorCode::MissingPerExample, "CLT noise mode needs per-example losses");
        return estimate_noise(*obs.per_example);
    }
    const auto& prop = std::get<NoiseProportional>(mode);
    return std::max(0.0, prop.coefficient * f);
}

}  // namespace lradapt
