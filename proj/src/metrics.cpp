#include "lradapt/metrics.hpp"

#include <cmath>
#include <sstream>

namespace lradapt {

namespace {

void check_gradient(const MetricState& state, const Vector& g) {
    if (g.size() != state.dim) {
        std::ostringstream os;
        os << "gradient length " << g.size() << " does not match metric dimension " << state.dim;
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
    if (!g.allFinite()) throw Error(ErrorCode::NonFinite, "gradient has non-finite entries");
}

// Adam's V_i diagonal for step i given the already-updated second moment.
Vector adam_scale(const MetricState& s, const Vector& second_moment, std::int64_t i) {
    const auto& h = s.hyper;
    const double gamma = std::sqrt(1.0 - std::pow(h.beta2, static_cast<double>(i))) /
                         (1.0 - std::pow(h.beta1, static_cast<double>(i)));
    return gamma * (second_moment.array() + h.epsilon).rsqrt();
}

}  // namespace

MetricState make_metric(MetricKind kind, Eigen::Index dim, const MetricHyper& hyper) {
    MetricState s;
    s.kind = kind;
    s.dim = dim;
    s.hyper = hyper;
    if (dim < 1) throw Error(ErrorCode::InvalidConfig, "metric dimension must be >= 1");
    if (auto problems = validate(hyper); !problems.empty()) throw Error(ErrorCode::InvalidConfig, problems.front());

    switch (kind) {
        case MetricKind::SGD: break;
        case MetricKind::Adagrad:
        case MetricKind::RMSprop: s.diag_accum = Vector::Zero(dim); break;
        case MetricKind::Momentum: s.momentum_buf = Vector::Zero(dim); break;
        case MetricKind::Adam:
            s.diag_accum = Vector::Zero(dim);
            s.momentum_buf = Vector::Zero(dim);
            break;
    }
    return s;
}

Vector direction(MetricState& s, const Vector& g) {
    check_gradient(s, g);
    const auto& h = s.hyper;
    ++s.step_count;

    switch (s.kind) {
        case MetricKind::SGD: return g;
        case MetricKind::Adagrad:
            s.diag_accum.array() += g.array().square();
            return g.array() * (s.diag_accum.array() + h.epsilon).rsqrt();
        case MetricKind::RMSprop:
            s.diag_accum = h.alpha * s.diag_accum.array() + (1.0 - h.alpha) * g.array().square();
            return g.array() * (s.diag_accum.array() + h.epsilon).rsqrt();
        case MetricKind::Momentum:
            s.momentum_buf = h.beta * s.momentum_buf + g;
            return s.momentum_buf;
        case MetricKind::Adam: {
            s.momentum_buf = h.beta1 * s.momentum_buf + (1.0 - h.beta1) * g;
            s.diag_accum = h.beta2 * s.diag_accum.array() + (1.0 - h.beta2) * g.array().square();
            return adam_scale(s, s.diag_accum, s.step_count).cwiseProduct(s.momentum_buf);
        }
    }
    return g;
}

bool pd_violation(const Vector& m_prev, const Vector& g, double beta) {
    return beta * m_prev.dot(g) < -g.dot(g);
}

bool pd_violation(const MetricState& s, const Vector& g) {
    check_gradient(s, g);
    const auto& h = s.hyper;
    switch (s.kind) {
        case MetricKind::Momentum: return pd_violation(s.momentum_buf, g, h.beta);
        case MetricKind::Adam: {
            const Vector second = h.beta2 * s.diag_accum.array() + (1.0 - h.beta2) * g.array().square();
            const Vector v = adam_scale(s, second, s.step_count + 1);
            const double cross = v.cwiseProduct(s.momentum_buf).dot(g);
            const double diag = v.cwiseProduct(g).dot(g);
            return h.beta1 * cross < -(1.0 - h.beta1) * diag;
        }
        default: return false;
    }
}

}  // namespace lradapt
