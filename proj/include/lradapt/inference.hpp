#pragma once

#include "lradapt/core.hpp"

#include <span>

namespace lradapt {

/// Scalars and vectors entering one posterior-mean update. The vectors are
/// borrowed; the caller keeps them alive for the duration of the call.
struct InferenceInputs {
    const ParamVector& theta;
    const Vector& v;  ///< η W g
    double phi;       ///< gᵀv
    double f;         ///< batch loss at theta
    double delta_f;   ///< f - f*
    double noise_var; ///< R
};

/// Multiplier 2Δf/(φ+R) applied to v.
double posterior_factor(double delta_f, double phi, double noise_var, double phi_eps = 1e-12);

/// Posterior mean θ - v·2Δf/(φ+R) of the Gaussian prior centred at θ with
/// covariance ηW, conditioned on the linearised observation of f - f*.
///
/// Throws Error(DegenerateDenominator) when φ+R <= phi_eps and
/// Error(NonFinite) for non-finite inputs.
ParamVector posterior_step(const InferenceInputs& in, double phi_eps = 1e-12);

/// Gap f - f*_implied of the implied quadratic, which is φ/2 independent of f.
/// Throws Error(NonPositivePhi) when φ <= phi_eps.
double implied_gap(double f, double phi, double phi_eps = 1e-12);

/// s²/B with s² the unbiased sample variance. Requires B >= 2.
double estimate_noise(std::span<const double> per_example);
double estimate_noise(const Vector& per_example);

/// Observation variance R for the configured mode.
double resolve_noise(const NoiseMode& mode, const Observation& obs, double f);

}  // namespace lradapt
