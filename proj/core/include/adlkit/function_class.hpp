#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adlkit {

// Values of one function on a finite sample: [point][coordinate].
class FunctionValues {
public:
    FunctionValues() = default;
    FunctionValues(std::size_t num_points, std::size_t dim)
        : num_points_(num_points), dim_(dim), data_(num_points * dim, 0.0)
    {
    }

    std::size_t num_points() const noexcept { return num_points_; }
    std::size_t dim() const noexcept { return dim_; }

    double& at(std::size_t point, std::size_t coord) { return data_[point * dim_ + coord]; }
    double at(std::size_t point, std::size_t coord) const { return data_[point * dim_ + coord]; }

    std::span<double> point(std::size_t j) { return {data_.data() + j * dim_, dim_}; }
    std::span<const double> point(std::size_t j) const { return {data_.data() + j * dim_, dim_}; }

    std::span<double> flat() noexcept { return data_; }
    std::span<const double> flat() const noexcept { return data_; }

    friend bool operator==(const FunctionValues&, const FunctionValues&) = default;

private:
    std::size_t num_points_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

// A hypothesis class restricted to a finite sample A: a dense tensor of
// values indexed [hypothesis][point][coordinate]. Immutable once built.
class FiniteFunctionClass {
public:
    // Throws InvariantError on extent mismatch or a non-finite entry.
    FiniteFunctionClass(std::size_t num_hypotheses, std::size_t num_points, std::size_t dim,
                        std::vector<double> values, std::vector<std::string> point_ids = {});

    // Builds a class from per-hypothesis value tensors of equal shape.
    static FiniteFunctionClass from_functions(std::span<const FunctionValues> functions);

    std::size_t num_hypotheses() const noexcept { return num_hypotheses_; }
    std::size_t num_points() const noexcept { return num_points_; }
    std::size_t dim() const noexcept { return dim_; }

    double value(std::size_t h, std::size_t point, std::size_t coord) const
    {
        return values_[(h * num_points_ + point) * dim_ + coord];
    }
    std::span<const double> point_values(std::size_t h, std::size_t point) const
    {
        return {values_.data() + (h * num_points_ + point) * dim_, dim_};
    }
    // All m*d values of hypothesis h, point-major.
    std::span<const double> hypothesis(std::size_t h) const
    {
        return {values_.data() + h * num_points_ * dim_, num_points_ * dim_};
    }
    FunctionValues function(std::size_t h) const;

    std::span<const double> values() const noexcept { return values_; }
    const std::vector<std::string>& point_ids() const noexcept { return point_ids_; }

    bool same_shape(const FiniteFunctionClass& other) const noexcept
    {
        return num_hypotheses_ == other.num_hypotheses_ && num_points_ == other.num_points_ &&
               dim_ == other.dim_;
    }

    friend bool operator==(const FiniteFunctionClass&, const FiniteFunctionClass&) = default;

private:
    std::size_t num_hypotheses_;
    std::size_t num_points_;
    std::size_t dim_;
    std::vector<double> values_;
    std::vector<std::string> point_ids_;
};

// A distribution over the m sample points.
class EmpiricalDistribution {
public:
    // Weights must be nonnegative, finite and sum to 1 within 1e-12.
    explicit EmpiricalDistribution(std::vector<double> weights);
    static EmpiricalDistribution uniform(std::size_t num_points);

    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    std::span<const double> weights() const noexcept { return weights_; }

    // Throws InvariantError unless size() == cls.num_points().
    void check_compatible(const FiniteFunctionClass& cls) const;

private:
    std::vector<double> weights_;
};

// values[h][j] = original[h][point_subset[j]]. Indices must be in range,
// non-empty and duplicate-free.
FiniteFunctionClass restrict(const FiniteFunctionClass& cls, std::span<const std::size_t> point_subset);

// Sub-class made of the listed hypotheses, in the given order.
FiniteFunctionClass select_hypotheses(const FiniteFunctionClass& cls, std::span<const std::size_t> hypotheses);

} // namespace adlkit
