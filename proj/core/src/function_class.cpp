#include "adlkit/function_class.hpp"

#include "adlkit/error.hpp"

#include <cmath>
#include <numeric>

namespace adlkit {

FiniteFunctionClass::FiniteFunctionClass(std::size_t num_hypotheses, std::size_t num_points, std::size_t dim,
                                         std::vector<double> values, std::vector<std::string> point_ids)
    : num_hypotheses_(num_hypotheses), num_points_(num_points), dim_(dim), values_(std::move(values)),
      point_ids_(std::move(point_ids))
{
    if (num_hypotheses_ == 0 || num_points_ == 0 || dim_ == 0) {
        throw InvariantError("function class: num_hypotheses, num_points and dim must be positive");
    }
    if (values_.size() != num_hypotheses_ * num_points_ * dim_) {
        throw InvariantError("function class: expected " + std::to_string(num_hypotheses_ * num_points_ * dim_) +
                             " values, got " + std::to_string(values_.size()));
    }
    if (!point_ids_.empty() && point_ids_.size() != num_points_) {
        throw InvariantError("function class: point_ids has " + std::to_string(point_ids_.size()) +
                             " labels for " + std::to_string(num_points_) + " points");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            const std::size_t h = i / (num_points_ * dim_);
            const std::size_t j = (i / dim_) % num_points_;
            const std::size_t c = i % dim_;
            throw InvariantError("function class: non-finite value at [" + std::to_string(h) + "][" +
                                 std::to_string(j) + "][" + std::to_string(c) + "]");
        }
    }
}

FiniteFunctionClass FiniteFunctionClass::from_functions(std::span<const FunctionValues> functions)
{
    if (functions.empty()) {
        throw InvariantError("function class: no functions given");
    }
    const std::size_t m = functions.front().num_points();
    const std::size_t d = functions.front().dim();
    std::vector<double> values;
    values.reserve(functions.size() * m * d);
    for (std::size_t h = 0; h < functions.size(); ++h) {
        if (functions[h].num_points() != m || functions[h].dim() != d) {
            throw InvariantError("function class: function " + std::to_string(h) + " has a different shape");
        }
        values.insert(values.end(), functions[h].flat().begin(), functions[h].flat().end());
    }
    return {functions.size(), m, d, std::move(values)};
}

FunctionValues FiniteFunctionClass::function(std::size_t h) const
{
    FunctionValues f(num_points_, dim_);
    const auto src = hypothesis(h);
    std::copy(src.begin(), src.end(), f.flat().begin());
    return f;
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> weights) : weights_(std::move(weights))
{
    if (weights_.empty()) {
        throw InvariantError("distribution: no weights");
    }
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (!std::isfinite(weights_[i]) || weights_[i] < 0.0) {
            throw InvariantError("distribution: invalid weight at index " + std::to_string(i));
        }
    }
    const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) {
        throw InvariantError("distribution: weights sum to " + std::to_string(total) + ", not 1");
    }
}

EmpiricalDistribution EmpiricalDistribution::uniform(std::size_t num_points)
{
    if (num_points == 0) {
        throw InvariantError("distribution: no points");
    }
    std::vector<double> w(num_points, 1.0 / static_cast<double>(num_points));
    // Put the rounding residue on the first entry so the sum is 1 to the last ulp.
    w[0] += 1.0 - std::accumulate(w.begin(), w.end(), 0.0);
    return EmpiricalDistribution(std::move(w));
}

void EmpiricalDistribution::check_compatible(const FiniteFunctionClass& cls) const
{
    if (weights_.size() != cls.num_points()) {
        throw InvariantError("distribution has " + std::to_string(weights_.size()) + " weights, class has " +
                             std::to_string(cls.num_points()) + " points");
    }
}

FiniteFunctionClass restrict(const FiniteFunctionClass& cls, std::span<const std::size_t> point_subset)
{
    if (point_subset.empty()) {
        throw RangeError("restrict: empty point subset");
    }
    std::vector<bool> seen(cls.num_points(), false);
    for (std::size_t j = 0; j < point_subset.size(); ++j) {
        const std::size_t p = point_subset[j];
        if (p >= cls.num_points()) {
            throw RangeError("restrict: index " + std::to_string(p) + " at position " + std::to_string(j) +
                             " out of range");
        }
        if (seen[p]) {
            throw RangeError("restrict: duplicate index " + std::to_string(p) + " at position " +
                             std::to_string(j));
        }
        seen[p] = true;
    }
    const std::size_t m = point_subset.size();
    const std::size_t d = cls.dim();
    std::vector<double> values;
    values.reserve(cls.num_hypotheses() * m * d);
    for (std::size_t h = 0; h < cls.num_hypotheses(); ++h) {
        for (std::size_t p : point_subset) {
            const auto row = cls.point_values(h, p);
            values.insert(values.end(), row.begin(), row.end());
        }
    }
    std::vector<std::string> ids;
    if (!cls.point_ids().empty()) {
        for (std::size_t p : point_subset) {
            ids.push_back(cls.point_ids()[p]);
        }
    }
    return {cls.num_hypotheses(), m, d, std::move(values), std::move(ids)};
}

FiniteFunctionClass select_hypotheses(const FiniteFunctionClass& cls, std::span<const std::size_t> hypotheses)
{
    std::vector<double> values;
    values.reserve(hypotheses.size() * cls.num_points() * cls.dim());
    for (std::size_t h : hypotheses) {
        if (h >= cls.num_hypotheses()) {
            throw RangeError("select_hypotheses: index " + std::to_string(h) + " out of range");
        }
        const auto src = cls.hypothesis(h);
        values.insert(values.end(), src.begin(), src.end());
    }
    return {hypotheses.size(), cls.num_points(), cls.dim(), std::move(values), cls.point_ids()};
}

} // namespace adlkit
