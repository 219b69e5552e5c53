#include "lradapt/problems.hpp"

#include <Eigen/QR>

#include <cmath>
#include <sstream>

namespace lradapt {

Observation BatchObjective::evaluate(const ParamVector& theta) {
    if (theta.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "theta length does not match objective");
    ++counters_.value_evals;
    ++counters_.gradient_evals;
    return do_evaluate(theta);
}

double BatchObjective::evaluate_value(const ParamVector& theta) {
    if (theta.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "theta length does not match objective");
    ++counters_.value_evals;
    return do_evaluate_value(theta);
}

// ---------------------------------------------------------------------------

QuadraticProblem::QuadraticProblem(Matrix hessian, Vector minimizer, double f_min)
    : hessian_(std::move(hessian)), minimizer_(std::move(minimizer)), f_min_(f_min) {
    const auto n = minimizer_.size();
    if (n < 1) throw Error(ErrorCode::DimensionMismatch, "quadratic needs dimension >= 1");
    if (hessian_.rows() != n || hessian_.cols() != n)
        throw Error(ErrorCode::DimensionMismatch, "hessian shape does not match minimizer length");
    if (!hessian_.allFinite() || !minimizer_.allFinite() || !std::isfinite(f_min_))
        throw Error(ErrorCode::NonFinite, "quadratic has non-finite data");
    const double scale = std::max(1.0, hessian_.cwiseAbs().maxCoeff());
    if ((hessian_ - hessian_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw Error(ErrorCode::InvalidConfig, "hessian is not symmetric");
    Eigen::LLT<Matrix> llt(hessian_);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::InvalidConfig, "hessian is not positive definite");
}

Observation quadratic_eval(const QuadraticProblem& p, const ParamVector& theta) {
    if (theta.size() != p.dim()) throw Error(ErrorCode::DimensionMismatch, "theta length does not match quadratic");
    const Vector d = theta - p.minimizer();
    Observation obs;
    obs.gradient = p.hessian() * d;
    obs.value = 0.5 * d.dot(obs.gradient) + p.f_min();
    return obs;
}

namespace {
Vector log_spectrum(Eigen::Index dim, double condition) {
    if (!(condition >= 1.0)) throw Error(ErrorCode::InvalidConfig, "condition number must be >= 1");
    Vector lambda(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double t = dim == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(dim - 1);
        lambda(i) = std::pow(condition, t);
    }
    return lambda;
}
}  // namespace

QuadraticProblem random_quadratic(Rng& rng, Eigen::Index dim, double condition, double f_min) {
    const Vector lambda = log_spectrum(dim, condition);
    Matrix gauss(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index i = 0; i < dim; ++i) gauss(i, j) = rng.normal();
    const Matrix q = Eigen::HouseholderQR<Matrix>(gauss).householderQ();
    Matrix b = q * lambda.asDiagonal() * q.transpose();
    b = 0.5 * (b + b.transpose()).eval();
    Vector minimizer(dim);
    for (Eigen::Index i = 0; i < dim; ++i) minimizer(i) = rng.normal();
    return QuadraticProblem(std::move(b), std::move(minimizer), f_min);
}

QuadraticProblem diagonal_quadratic(Eigen::Index dim, double condition, double f_min) {
    return QuadraticProblem(log_spectrum(dim, condition).asDiagonal(), Vector::Zero(dim), f_min);
}

// ---------------------------------------------------------------------------

Observation rosenbrock_eval(const ParamVector& theta) {
    if (theta.size() != 2) throw Error(ErrorCode::DimensionMismatch, "rosenbrock is two-dimensional");
    const double x = theta(0);
    const double y = theta(1);
    const double a = 1.0 - x;
    const double b = y - x * x;
    Observation obs;
    obs.value = a * a + 100.0 * b * b;
    obs.gradient.resize(2);
    obs.gradient << -2.0 * a - 400.0 * x * b, 200.0 * b;
    return obs;
}

double RosenbrockObjective::do_evaluate_value(const ParamVector& theta) {
    const double a = 1.0 - theta(0);
    const double b = theta(1) - theta(0) * theta(0);
    return a * a + 100.0 * b * b;
}

// ---------------------------------------------------------------------------

NoisyValueObjective::NoisyValueObjective(std::unique_ptr<BatchObjective> inner, double sigma, std::uint64_t seed)
    : inner_(std::move(inner)), sigma_(sigma), rng_(seed) {
    if (!inner_) throw Error(ErrorCode::InvalidConfig, "noisy objective needs an inner objective");
    if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) throw Error(ErrorCode::InvalidConfig, "noise sigma must be >= 0");
    current_ = rng_.normal(0.0, sigma_);
}

void NoisyValueObjective::advance() {
    inner_->advance();
    current_ = rng_.normal(0.0, sigma_);
}

Observation NoisyValueObjective::do_evaluate(const ParamVector& theta) {
    Observation obs = inner_->evaluate(theta);
    obs.value += current_;
    if (obs.per_example) obs.per_example->array() += current_;
    obs.noise_var = sigma_ * sigma_;
    return obs;
}

double NoisyValueObjective::do_evaluate_value(const ParamVector& theta) {
    return inner_->evaluate_value(theta) + current_;
}

// ---------------------------------------------------------------------------

HessianMetric::HessianMetric(const Matrix& hessian) : llt_(hessian) {
    if (hessian.rows() != hessian.cols()) throw Error(ErrorCode::DimensionMismatch, "hessian must be square");
    if (llt_.info() != Eigen::Success) throw Error(ErrorCode::SingularSolve, "hessian factorization failed");
}

Vector HessianMetric::direction(const Vector& g) const {
    if (g.size() != llt_.rows()) throw Error(ErrorCode::DimensionMismatch, "gradient length does not match hessian");
    Vector out = llt_.solve(g);
    if (!out.allFinite()) throw Error(ErrorCode::SingularSolve, "hessian solve produced non-finite values");
    return out;
}

}  // namespace lradapt
