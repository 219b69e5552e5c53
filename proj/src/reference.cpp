// Independent textbook optimizers used as oracles. Deliberately scalar loops
// with no calls into the metrics module.
#include "lradapt/problems.hpp"

#include <cmath>

namespace lradapt {

ReferenceOptimizer::ReferenceOptimizer(MetricKind kind, Eigen::Index dim, const MetricHyper& hyper)
    : kind_(kind), hyper_(hyper), first_(static_cast<std::size_t>(dim), 0.0), second_(static_cast<std::size_t>(dim), 0.0) {}

ParamVector ReferenceOptimizer::step(const ParamVector& theta, const Vector& g, double eta) {
    ParamVector next = theta;
    ++t_;
    const double eps = hyper_.epsilon;
    for (std::size_t k = 0; k < first_.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        const double gi = g(i);
        double update = 0.0;
        switch (kind_) {
            case MetricKind::SGD: update = gi; break;
            case MetricKind::Adagrad:
                second_[k] += gi * gi;
                update = gi / std::sqrt(second_[k] + eps);
                break;
            case MetricKind::RMSprop:
                second_[k] = hyper_.alpha * second_[k] + (1.0 - hyper_.alpha) * gi * gi;
                update = gi / std::sqrt(second_[k] + eps);
                break;
            case MetricKind::Momentum:
                // PyTorch SGD with momentum (dampening 0)
                first_[k] = hyper_.beta * first_[k] + gi;
                update = first_[k];
                break;
            case MetricKind::Adam: {
                first_[k] = hyper_.beta1 * first_[k] + (1.0 - hyper_.beta1) * gi;
                second_[k] = hyper_.beta2 * second_[k] + (1.0 - hyper_.beta2) * gi * gi;
                const double c1 = 1.0 - std::pow(hyper_.beta1, static_cast<double>(t_));
                const double c2 = 1.0 - std::pow(hyper_.beta2, static_cast<double>(t_));
                const double m_hat = first_[k] / c1;
                const double v_hat = second_[k] / c2;
                // ε sits under the square root of the uncorrected moment.
                update = m_hat / std::sqrt(v_hat + eps / c2);
                break;
            }
        }
        next(i) = theta(i) - eta * update;
    }
    return next;
}

}  // namespace lradapt
