#pragma once

#include "adlkit/function_class.hpp"
#include "adlkit/linalg.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace adlkit {

// Monte Carlo summary of a stochastic estimate f~ of a fixed function f.
//
// second_moment is E_{x~D} E_w (f~(x)-f(x))(f~(x)-f(x))^T, pooled over the
// sample points with the distribution's weights, so lambda_max is the
// worst directional variance sup_u E_x E_w <u, f~(x)-f(x)>^2.
struct EstimatorReport {
    double bias_max = 0.0;        // max over points/coords of |mean - f|
    double bias_z_max = 0.0;      // same, in units of std/sqrt(trials)
    Matrix second_moment;         // dim x dim
    double lambda_max = 0.0;
    double lambda_std_err = 0.0;  // batch-means standard error of lambda_max
    double mean_bits = 0.0;
    double bits_std_err = 0.0;
    std::size_t trials = 0;
    double confidence_radius = 0.0; // 5 * lambda_std_err
};

void to_json(nlohmann::json& j, const EstimatorReport& r);

// Raw moment sums of a batch of samples. Samples are added one at a time,
// point by point, densely or as sparse (coordinate, value) lists.
class MomentAccumulator {
public:
    MomentAccumulator() = default;
    MomentAccumulator(std::size_t num_points, std::size_t dim, std::span<const double> weights);

    void add_point_dense(std::size_t point, std::span<const double> values);
    void add_point_sparse(std::size_t point, std::span<const std::pair<std::size_t, double>> entries);
    // Closes the current sample and records its code length.
    void end_sample(std::size_t bits);

    std::size_t samples() const noexcept { return samples_; }

    // Pooled second moment of (estimate - target) over this batch alone.
    Matrix centered_second_moment(const FunctionValues& target) const;

    void merge(const MomentAccumulator& other);

    friend EstimatorReport summarize(std::span<const MomentAccumulator> batches, const FunctionValues& target);

private:
    void flush() const;

    std::size_t num_points_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> weights_;
    std::size_t samples_ = 0;
    std::vector<double> sum_;      // [point][coord]
    std::vector<double> sum_sq_;   // [point][coord]
    mutable Matrix cross_;         // sum_x w_x f~ f~^T (lower triangle valid after flush)
    mutable Matrix pending_;       // dim x kPending buffer of sqrt(w_x) f~ columns
    mutable Eigen::Index pending_cols_ = 0;
    double bits_sum_ = 0.0;
    double bits_sq_ = 0.0;
};

// Merges batch accumulators (in order) and summarizes against target.
EstimatorReport summarize(std::span<const MomentAccumulator> batches, const FunctionValues& target);

} // namespace adlkit
