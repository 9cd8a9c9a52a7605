#include "adlkit/estimator.hpp"

#include "adlkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adlkit {

namespace {

constexpr Eigen::Index kPending = 64;

} // namespace

void to_json(nlohmann::json& j, const EstimatorReport& r)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < r.second_moment.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(r.second_moment.cols()));
        for (Eigen::Index c = 0; c < r.second_moment.cols(); ++c) {
            row[static_cast<std::size_t>(c)] = r.second_moment(i, c);
        }
        rows.push_back(row);
    }
    j = nlohmann::json{{"bias_max", r.bias_max},
                       {"bias_z_max", std::isfinite(r.bias_z_max) ? nlohmann::json(r.bias_z_max)
                                                                  : nlohmann::json("inf")},
                       {"lambda_max", r.lambda_max},
                       {"lambda_std_err", r.lambda_std_err},
                       {"mean_bits", r.mean_bits},
                       {"bits_std_err", r.bits_std_err},
                       {"trials", r.trials},
                       {"confidence_radius", r.confidence_radius},
                       {"second_moment", rows}};
}

MomentAccumulator::MomentAccumulator(std::size_t num_points, std::size_t dim, std::span<const double> weights)
    : num_points_(num_points), dim_(dim), weights_(weights.begin(), weights.end()), sum_(num_points * dim, 0.0),
      sum_sq_(num_points * dim, 0.0), cross_(Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))),
      pending_(static_cast<Eigen::Index>(dim), kPending)
{
    if (weights_.size() != num_points_) {
        throw InvariantError("moment accumulator: weight count does not match point count");
    }
}

void MomentAccumulator::add_point_dense(std::size_t point, std::span<const double> values)
{
    double* s = sum_.data() + point * dim_;
    double* q = sum_sq_.data() + point * dim_;
    for (std::size_t c = 0; c < dim_; ++c) {
        s[c] += values[c];
        q[c] += values[c] * values[c];
    }
    const double w = weights_[point];
    if (w == 0.0) {
        return;
    }
    const double root = std::sqrt(w);
    for (std::size_t c = 0; c < dim_; ++c) {
        pending_(static_cast<Eigen::Index>(c), pending_cols_) = root * values[c];
    }
    if (++pending_cols_ == kPending) {
        flush();
    }
}

void MomentAccumulator::add_point_sparse(std::size_t point, std::span<const std::pair<std::size_t, double>> entries)
{
    // Merge repeated coordinates so per-coordinate squares are exact.
    std::vector<std::pair<std::size_t, double>> merged(entries.begin(), entries.end());
    std::sort(merged.begin(), merged.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t out = 0;
    for (std::size_t i = 0; i < merged.size(); ++i) {
        if (out > 0 && merged[out - 1].first == merged[i].first) {
            merged[out - 1].second += merged[i].second;
        } else {
            merged[out++] = merged[i];
        }
    }
    merged.resize(out);

    double* s = sum_.data() + point * dim_;
    double* q = sum_sq_.data() + point * dim_;
    const double w = weights_[point];
    for (std::size_t i = 0; i < merged.size(); ++i) {
        const auto [ci, vi] = merged[i];
        s[ci] += vi;
        q[ci] += vi * vi;
        if (w == 0.0) {
            continue;
        }
        // Sorted ascending, so ci >= cj: lower triangle.
        for (std::size_t j = 0; j <= i; ++j) {
            const auto [cj, vj] = merged[j];
            cross_(static_cast<Eigen::Index>(ci), static_cast<Eigen::Index>(cj)) += w * vi * vj;
        }
    }
}

void MomentAccumulator::end_sample(std::size_t bits)
{
    ++samples_;
    const auto b = static_cast<double>(bits);
    bits_sum_ += b;
    bits_sq_ += b * b;
}

void MomentAccumulator::flush() const
{
    if (pending_cols_ == 0) {
        return;
    }
    cross_.selfadjointView<Eigen::Lower>().rankUpdate(pending_.leftCols(pending_cols_));
    pending_cols_ = 0;
}

Matrix MomentAccumulator::centered_second_moment(const FunctionValues& target) const
{
    flush();
    const auto d = static_cast<Eigen::Index>(dim_);
    if (samples_ == 0) {
        return Matrix::Zero(d, d);
    }
    const double t = static_cast<double>(samples_);
    Matrix m = cross_.selfadjointView<Eigen::Lower>();
    m /= t;
    for (std::size_t x = 0; x < num_points_; ++x) {
        const double w = weights_[x];
        if (w == 0.0) {
            continue;
        }
        Vector mean(d);
        Vector h(d);
        for (std::size_t c = 0; c < dim_; ++c) {
            mean(static_cast<Eigen::Index>(c)) = sum_[x * dim_ + c] / t;
            h(static_cast<Eigen::Index>(c)) = target.at(x, c);
        }
        m.noalias() -= w * (mean * h.transpose() + h * mean.transpose() - h * h.transpose());
    }
    return 0.5 * (m + m.transpose());
}

void MomentAccumulator::merge(const MomentAccumulator& other)
{
    if (num_points_ == 0 && dim_ == 0) {
        *this = other;
        flush();
        return;
    }
    flush();
    other.flush();
    samples_ += other.samples_;
    for (std::size_t i = 0; i < sum_.size(); ++i) {
        sum_[i] += other.sum_[i];
        sum_sq_[i] += other.sum_sq_[i];
    }
    cross_ += other.cross_;
    bits_sum_ += other.bits_sum_;
    bits_sq_ += other.bits_sq_;
}

EstimatorReport summarize(std::span<const MomentAccumulator> batches, const FunctionValues& target)
{
    if (batches.empty()) {
        throw InvariantError("summarize: no batches");
    }
    MomentAccumulator total;
    for (const auto& b : batches) {
        total.merge(b);
    }
    if (total.num_points_ != target.num_points() || total.dim_ != target.dim()) {
        throw InvariantError("summarize: target shape does not match the accumulated samples");
    }

    EstimatorReport r;
    r.trials = total.samples_;
    const double t = static_cast<double>(r.trials);
    if (r.trials == 0) {
        r.second_moment = Matrix::Zero(static_cast<Eigen::Index>(target.dim()), static_cast<Eigen::Index>(target.dim()));
        return r;
    }

    for (std::size_t x = 0; x < total.num_points_; ++x) {
        for (std::size_t c = 0; c < total.dim_; ++c) {
            const std::size_t i = x * total.dim_ + c;
            const double mean = total.sum_[i] / t;
            const double err = std::abs(mean - target.at(x, c));
            r.bias_max = std::max(r.bias_max, err);
            const double var =
                r.trials > 1 ? std::max(0.0, (total.sum_sq_[i] - t * mean * mean) / (t - 1.0)) : 0.0;
            const double se = std::sqrt(var / t);
            double z = 0.0;
            if (se > 0.0) {
                z = err / se;
            } else if (err > 1e-12 * (1.0 + std::abs(target.at(x, c)))) {
                z = std::numeric_limits<double>::infinity();
            }
            r.bias_z_max = std::max(r.bias_z_max, z);
        }
    }

    r.second_moment = total.centered_second_moment(target);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(r.second_moment);
    const Eigen::Index top = solver.eigenvalues().size() - 1;
    r.lambda_max = std::max(0.0, solver.eigenvalues()(top));
    const Vector u = solver.eigenvectors().col(top);

    std::vector<double> per_batch;
    for (const auto& b : batches) {
        if (b.samples() > 0) {
            per_batch.push_back(u.dot(b.centered_second_moment(target) * u));
        }
    }
    if (per_batch.size() > 1) {
        double mean = 0.0;
        for (double v : per_batch) {
            mean += v;
        }
        mean /= static_cast<double>(per_batch.size());
        double ss = 0.0;
        for (double v : per_batch) {
            ss += (v - mean) * (v - mean);
        }
        const double n = static_cast<double>(per_batch.size());
        r.lambda_std_err = std::sqrt(ss / (n - 1.0) / n);
    }
    r.confidence_radius = 5.0 * r.lambda_std_err;

    r.mean_bits = total.bits_sum_ / t;
    if (r.trials > 1) {
        const double var = std::max(0.0, (total.bits_sq_ - t * r.mean_bits * r.mean_bits) / (t - 1.0));
        r.bits_std_err = std::sqrt(var / t);
    }
    return r;
}

} // namespace adlkit
