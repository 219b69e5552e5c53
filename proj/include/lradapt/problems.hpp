#pragma once

#include "lradapt/core.hpp"
#include "lradapt/random.hpp"

#include <Eigen/Cholesky>

#include <cstdint>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lradapt {

struct EvalCounters {
    std::int64_t value_evals = 0;
    std::int64_t gradient_evals = 0;
};

/// A stochastic objective with a current minibatch.
///
/// evaluate()/evaluate_value() never move the batch; calling either twice at
/// the same θ without advance() in between returns identical results. The
/// public entry points maintain the evaluation counters.
class BatchObjective {
public:
    virtual ~BatchObjective() = default;

    [[nodiscard]] virtual Eigen::Index dim() const = 0;

    /// Loss and gradient on the current batch (one value + one gradient evaluation).
    Observation evaluate(const ParamVector& theta);
    /// Loss only on the current batch (one value evaluation).
    double evaluate_value(const ParamVector& theta);

    /// Moves to the next minibatch.
    virtual void advance() {}
    [[nodiscard]] virtual std::int64_t batches_per_epoch() const { return 1; }

    [[nodiscard]] const EvalCounters& counters() const noexcept { return counters_; }
    void reset_counters() noexcept { counters_ = {}; }

protected:
    virtual Observation do_evaluate(const ParamVector& theta) = 0;
    virtual double do_evaluate_value(const ParamVector& theta) { return do_evaluate(theta).value; }

private:
    EvalCounters counters_;
};

// ---------------------------------------------------------------------------
// Quadratic

/// f(θ) = ½(θ-θ*)ᵀB(θ-θ*) + f_min with B symmetric positive definite.
class QuadraticProblem {
public:
    /// Throws Error(InvalidConfig) if B is not square/symmetric to 1e-12 or
    /// fails a Cholesky factorization, Error(DimensionMismatch) on size errors.
    QuadraticProblem(Matrix hessian, Vector minimizer, double f_min = 0.0);

    [[nodiscard]] const Matrix& hessian() const noexcept { return hessian_; }
    [[nodiscard]] const Vector& minimizer() const noexcept { return minimizer_; }
    [[nodiscard]] double f_min() const noexcept { return f_min_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return minimizer_.size(); }

private:
    Matrix hessian_;
    Vector minimizer_;
    double f_min_;
};

Observation quadratic_eval(const QuadraticProblem& p, const ParamVector& theta);

/// Random rotation of diag(logspace(1, condition)), minimizer ~ N(0, I).
QuadraticProblem random_quadratic(Rng& rng, Eigen::Index dim, double condition, double f_min = 0.0);
/// diag(logspace(1, condition)) with minimizer at the origin.
QuadraticProblem diagonal_quadratic(Eigen::Index dim, double condition, double f_min = 0.0);

class QuadraticObjective final : public BatchObjective {
public:
    explicit QuadraticObjective(QuadraticProblem problem) : problem_(std::move(problem)) {}
    [[nodiscard]] Eigen::Index dim() const override { return problem_.dim(); }
    [[nodiscard]] const QuadraticProblem& problem() const noexcept { return problem_; }

protected:
    Observation do_evaluate(const ParamVector& theta) override { return quadratic_eval(problem_, theta); }

private:
    QuadraticProblem problem_;
};

// ---------------------------------------------------------------------------
// Rosenbrock

/// (1-x)² + 100(y-x²)², minimum 0 at (1, 1).
Observation rosenbrock_eval(const ParamVector& theta);

class RosenbrockObjective final : public BatchObjective {
public:
    [[nodiscard]] Eigen::Index dim() const override { return 2; }

protected:
    Observation do_evaluate(const ParamVector& theta) override { return rosenbrock_eval(theta); }
    double do_evaluate_value(const ParamVector& theta) override;
};

// ---------------------------------------------------------------------------
// Additive value noise

/// Adds ε ~ N(0, σ²) to the wrapped objective's value. One draw per batch, so
/// re-evaluation of the same batch sees the same ε. noise_var is set to σ².
class NoisyValueObjective final : public BatchObjective {
public:
    NoisyValueObjective(std::unique_ptr<BatchObjective> inner, double sigma, std::uint64_t seed);

    [[nodiscard]] Eigen::Index dim() const override { return inner_->dim(); }
    void advance() override;
    [[nodiscard]] std::int64_t batches_per_epoch() const override { return inner_->batches_per_epoch(); }

protected:
    Observation do_evaluate(const ParamVector& theta) override;
    double do_evaluate_value(const ParamVector& theta) override;

private:
    std::unique_ptr<BatchObjective> inner_;
    double sigma_;
    Rng rng_;
    double current_ = 0.0;
};

// ---------------------------------------------------------------------------
// Logistic regression

struct LogRegDataset {
    Matrix features;          ///< D x N
    std::vector<int> labels;  ///< {0, 1}, length D
    double l2_reg = 0.0;
    Eigen::Index batch_size = 1;

    [[nodiscard]] Eigen::Index size() const noexcept { return features.rows(); }
    [[nodiscard]] Eigen::Index dim() const noexcept { return features.cols(); }
};

std::vector<std::string> validate(const LogRegDataset& ds);

/// Mean log-loss over `batch` plus l2_reg·‖θ‖². per_example carries each
/// example's loss with the regularizer added, so its mean equals value.
Observation logreg_batch_eval(const LogRegDataset& ds, const ParamVector& theta, std::span<const Eigen::Index> batch,
                              bool with_noise_estimate = false);
double logreg_batch_value(const LogRegDataset& ds, const ParamVector& theta, std::span<const Eigen::Index> batch);
double logreg_full_loss(const LogRegDataset& ds, const ParamVector& theta);

/// Two unit-variance Gaussian clusters whose means are `separation` apart
/// along a random unit direction. Labels are balanced.
LogRegDataset make_synthetic_logreg(std::uint64_t seed, Eigen::Index samples, Eigen::Index features,
                                    double separation, Eigen::Index batch_size = 100, double l2_reg = 0.0);

/// Header row, then N feature columns followed by one {0,1} label column.
/// Throws Error(Parse) naming the row and column of the first bad cell.
LogRegDataset load_logreg_csv(std::istream& in, Eigen::Index batch_size, double l2_reg = 0.0);
LogRegDataset load_logreg_csv(const std::string& path, Eigen::Index batch_size, double l2_reg = 0.0);

/// Shuffled minibatches; a new permutation is drawn at every epoch boundary.
/// The dataset is shared read-only, the batch cursor is owned.
class LogRegObjective final : public BatchObjective {
public:
    LogRegObjective(std::shared_ptr<const LogRegDataset> data, std::uint64_t seed, bool with_noise_estimate = false);

    [[nodiscard]] Eigen::Index dim() const override { return data_->dim(); }
    void advance() override;
    [[nodiscard]] std::int64_t batches_per_epoch() const override;

    [[nodiscard]] std::span<const Eigen::Index> current_batch() const;
    [[nodiscard]] double full_loss(const ParamVector& theta) const { return logreg_full_loss(*data_, theta); }
    [[nodiscard]] const LogRegDataset& data() const noexcept { return *data_; }

protected:
    Observation do_evaluate(const ParamVector& theta) override;
    double do_evaluate_value(const ParamVector& theta) override;

private:
    std::shared_ptr<const LogRegDataset> data_;
    Rng rng_;
    bool with_noise_;
    std::vector<Eigen::Index> order_;
    std::int64_t cursor_ = 0;
};

// ---------------------------------------------------------------------------
// Oracles

/// Textbook update of each optimizer family, written independently of the
/// metrics module. Used to cross-check the inference wrapper.
class ReferenceOptimizer {
public:
    ReferenceOptimizer(MetricKind kind, Eigen::Index dim, const MetricHyper& hyper = {});
    /// Returns the next iterate θ - η·(update).
    ParamVector step(const ParamVector& theta, const Vector& g, double eta);

private:
    MetricKind kind_;
    MetricHyper hyper_;
    std::vector<double> first_;
    std::vector<double> second_;
    std::int64_t t_ = 0;
};

/// Newton metric W = B⁻¹ of a quadratic. Dense Cholesky solve; meant for
/// small problems.
class HessianMetric {
public:
    /// Throws Error(SingularSolve) if `hessian` is not positive definite.
    explicit HessianMetric(const Matrix& hessian);
    explicit HessianMetric(const QuadraticProblem& p) : HessianMetric(p.hessian()) {}
    [[nodiscard]] Vector direction(const Vector& g) const;

private:
    Eigen::LLT<Matrix> llt_;
};

}  // namespace lradapt
