#pragma once

#include "lradapt/core.hpp"

namespace lradapt {

/// Fresh accumulator state for one optimizer family: G_0 = 0, m_0 = 0, i = 0.
/// Throws Error(InvalidConfig) on out-of-range hyperparameters or dim < 1.
MetricState make_metric(MetricKind kind, Eigen::Index dim, const MetricHyper& hyper = {});

/// Unscaled search direction u_i = W_i g_i. Advances the state by one step.
///
/// Momentum and Adam use the exponential-average closed forms
///   Momentum: m_i = β m_{i-1} + g,                        u = m_i
///   Adam:     m_i = β₁ m_{i-1} + (1-β₁) g,
///             G_i = β₂ G_{i-1} + (1-β₂) g²,
///             u = γ_i m_i / sqrt(G_i + ε),  γ_i = sqrt(1-β₂ⁱ)/(1-β₁ⁱ)
/// which equal the diagonal-plus-rank-1 covariance applied to g.
Vector direction(MetricState& state, const Vector& g);

/// True iff β⟨m_prev, g⟩ < -⟨g, g⟩, i.e. the momentum covariance is not
/// positive definite along g.
bool pd_violation(const Vector& m_prev, const Vector& g, double beta);

/// Kind-aware variant evaluated on the state *before* direction() consumes g.
/// SGD/Adagrad/RMSprop never violate; Adam uses β₁⟨V m_prev, g⟩ < -(1-β₁)⟨g, V g⟩.
bool pd_violation(const MetricState& state, const Vector& g);

}  // namespace lradapt
