#include "lradapt/inference.hpp"
#include "lradapt/problems.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace lradapt {

namespace {

// log(1 + exp(t)) without overflow.
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

// 1 / (1 + exp(t))
double logistic_tail(double t) {
    if (t >= 0.0) {
        const double e = std::exp(-t);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(t));
}

double sign_of(int label) { return label == 1 ? 1.0 : -1.0; }

void check_batch(const LogRegDataset& ds, const ParamVector& theta, std::span<const Eigen::Index> batch) {
    if (batch.empty()) throw Error(ErrorCode::EmptyBatch, "logistic regression batch is empty");
    if (theta.size() != ds.dim()) throw Error(ErrorCode::DimensionMismatch, "theta length does not match features");
    for (auto idx : batch) {
        if (idx < 0 || idx >= ds.size()) throw Error(ErrorCode::DimensionMismatch, "batch index out of range");
    }
}

}  // namespace

std::vector<std::string> validate(const LogRegDataset& ds) {
    std::vector<std::string> out;
    if (ds.size() < 1 || ds.dim() < 1) out.emplace_back("dataset must have at least one row and one feature");
    if (static_cast<Eigen::Index>(ds.labels.size()) != ds.size()) out.emplace_back("label count does not match rows");
    for (int y : ds.labels) {
        if (y != 0 && y != 1) {
            out.emplace_back("labels must be 0 or 1");
            break;
        }
    }
    if (!(ds.l2_reg >= 0.0)) out.emplace_back("l2_reg must be >= 0");
    if (ds.batch_size < 1 || ds.batch_size > ds.size()) out.emplace_back("batch size must lie in [1, D]");
    if (!ds.features.allFinite()) out.emplace_back("features contain non-finite values");
    return out;
}

Observation logreg_batch_eval(const LogRegDataset& ds, const ParamVector& theta, std::span<const Eigen::Index> batch,
                              bool with_noise_estimate) {
    check_batch(ds, theta, batch);
    const double reg = ds.l2_reg * theta.squaredNorm();
    const auto b = static_cast<Eigen::Index>(batch.size());
    Vector losses(b);
    Vector grad = Vector::Zero(ds.dim());
    for (Eigen::Index k = 0; k < b; ++k) {
        const auto row = batch[static_cast<std::size_t>(k)];
        const double s = sign_of(ds.labels[static_cast<std::size_t>(row)]);
        const double margin = s * ds.features.row(row).dot(theta);
        losses(k) = softplus(-margin) + reg;
        grad.noalias() -= (s * logistic_tail(margin)) * ds.features.row(row).transpose();
    }
    grad /= static_cast<double>(b);
    grad += 2.0 * ds.l2_reg * theta;
    const double noise = with_noise_estimate && b >= 2 ? estimate_noise(losses) : 0.0;
    return observation_from_per_example(std::move(losses), std::move(grad), noise);
}

double logreg_batch_value(const LogRegDataset& ds, const ParamVector& theta, std::span<const Eigen::Index> batch) {
    // Same arithmetic as logreg_batch_eval so re-evaluation at the same θ is bit-identical.
    check_batch(ds, theta, batch);
    const double reg = ds.l2_reg * theta.squaredNorm();
    Vector losses(static_cast<Eigen::Index>(batch.size()));
    for (Eigen::Index k = 0; k < losses.size(); ++k) {
        const auto row = batch[static_cast<std::size_t>(k)];
        const double s = sign_of(ds.labels[static_cast<std::size_t>(row)]);
        losses(k) = softplus(-s * ds.features.row(row).dot(theta)) + reg;
    }
    return losses.mean();
}

double logreg_full_loss(const LogRegDataset& ds, const ParamVector& theta) {
    std::vector<Eigen::Index> all(static_cast<std::size_t>(ds.size()));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    return logreg_batch_value(ds, theta, all);
}

LogRegDataset make_synthetic_logreg(std::uint64_t seed, Eigen::Index samples, Eigen::Index features,
                                    double separation, Eigen::Index batch_size, double l2_reg) {
    if (samples < 2 || features < 1) throw Error(ErrorCode::InvalidConfig, "synthetic dataset needs D >= 2 and N >= 1");
    Rng rng(seed);
    Vector direction(features);
    for (Eigen::Index j = 0; j < features; ++j) direction(j) = rng.normal();
    direction.normalize();

    LogRegDataset ds;
    ds.features.resize(samples, features);
    ds.labels.resize(static_cast<std::size_t>(samples));
    ds.l2_reg = l2_reg;
    ds.batch_size = std::min(batch_size, samples);
    for (Eigen::Index i = 0; i < samples; ++i) {
        const int label = static_cast<int>(i % 2);
        ds.labels[static_cast<std::size_t>(i)] = label;
        const double offset = (label == 1 ? 0.5 : -0.5) * separation;
        for (Eigen::Index j = 0; j < features; ++j) ds.features(i, j) = rng.normal() + offset * direction(j);
    }
    if (auto problems = validate(ds); !problems.empty()) throw Error(ErrorCode::InvalidConfig, problems.front());
    return ds;
}

LogRegDataset load_logreg_csv(std::istream& in, Eigen::Index batch_size, double l2_reg) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::Parse, "dataset CSV is empty (missing header row)");
    std::size_t columns = 1;
    for (char c : line) columns += c == ',' ? 1 : 0;
    if (columns < 2) throw Error(ErrorCode::Parse, "dataset CSV needs at least one feature column and a label column");

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> values;
        std::stringstream cells(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(cells, cell, ',')) {
            ++col;
            const auto value = parse_real(cell);
            if (!value || !std::isfinite(*value)) {
                std::ostringstream os;
                os << "row " << row_no << " column " << col << ": non-numeric cell '" << cell << "'";
                throw Error(ErrorCode::Parse, os.str());
            }
            values.push_back(*value);
        }
        if (values.size() != columns) {
            std::ostringstream os;
            os << "row " << row_no << ": expected " << columns << " columns, found " << values.size();
            throw Error(ErrorCode::Parse, os.str());
        }
        const double label = values.back();
        if (label != 0.0 && label != 1.0) {
            std::ostringstream os;
            os << "row " << row_no << " column " << columns << ": label must be 0 or 1";
            throw Error(ErrorCode::Parse, os.str());
        }
        labels.push_back(static_cast<int>(label));
        values.pop_back();
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw Error(ErrorCode::Parse, "dataset CSV has no data rows");

    LogRegDataset ds;
    ds.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(columns - 1));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j + 1 < columns; ++j)
            ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    ds.labels = std::move(labels);
    ds.l2_reg = l2_reg;
    ds.batch_size = std::min(batch_size, ds.size());
    if (auto problems = validate(ds); !problems.empty()) throw Error(ErrorCode::InvalidConfig, problems.front());
    return ds;
}

LogRegDataset load_logreg_csv(const std::string& path, Eigen::Index batch_size, double l2_reg) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open dataset CSV '" + path + "'");
    return load_logreg_csv(in, batch_size, l2_reg);
}

// ---------------------------------------------------------------------------

LogRegObjective::LogRegObjective(std::shared_ptr<const LogRegDataset> data, std::uint64_t seed,
                                 bool with_noise_estimate)
    : data_(std::move(data)), rng_(seed), with_noise_(with_noise_estimate) {
    if (!data_) throw Error(ErrorCode::InvalidConfig, "logistic objective needs a dataset");
    if (auto problems = validate(*data_); !problems.empty()) throw Error(ErrorCode::InvalidConfig, problems.front());
    order_.resize(static_cast<std::size_t>(data_->size()));
    std::iota(order_.begin(), order_.end(), Eigen::Index{0});
    rng_.shuffle(order_);
}

std::int64_t LogRegObjective::batches_per_epoch() const {
    return (data_->size() + data_->batch_size - 1) / data_->batch_size;
}

std::span<const Eigen::Index> LogRegObjective::current_batch() const {
    const auto begin = static_cast<std::size_t>(cursor_ * data_->batch_size);
    const auto end = std::min(order_.size(), begin + static_cast<std::size_t>(data_->batch_size));
    return std::span<const Eigen::Index>(order_).subspan(begin, end - begin);
}

void LogRegObjective::advance() {
    if (++cursor_ >= batches_per_epoch()) {
        cursor_ = 0;
        rng_.shuffle(order_);
    }
}

Observation LogRegObjective::do_evaluate(const ParamVector& theta) {
    return logreg_batch_eval(*data_, theta, current_batch(), with_noise_);
}

double LogRegObjective::do_evaluate_value(const ParamVector& theta) {
    return logreg_batch_value(*data_, theta, current_batch());
}

}  // namespace lradapt
