#include "adlkit/compressor.hpp"

#include "adlkit/error.hpp"
#include "adlkit/parallel.hpp"
#include "adlkit/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace adlkit {

BitString Compressor::encode(RandomStream& rng, const FiniteFunctionClass& cls, std::size_t h) const
{
    BitString out;
    bind(cls)->encode(rng, h, out);
    return out;
}

FunctionValues Compressor::decode(const BitString& bits) const
{
    BitReader in(bits);
    auto values = decode(in);
    if (!in.at_end()) {
        throw DecodeError(describe() + ": " + std::to_string(in.remaining()) + " trailing bits");
    }
    return values;
}

double lower_median(std::span<double> values)
{
    if (values.empty()) {
        throw RangeError("lower_median: empty input");
    }
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
    std::nth_element(values.begin(), mid, values.end());
    return *mid;
}

namespace {

void check_class_shape(const Compressor& c, const FiniteFunctionClass& cls)
{
    if (cls.num_points() != c.num_points() || cls.dim() != c.dim()) {
        throw InvariantError(c.describe() + ": class has " + std::to_string(cls.num_points()) + " points of dim " +
                             std::to_string(cls.dim()) + ", compressor expects " + std::to_string(c.num_points()) +
                             " points of dim " + std::to_string(c.dim()));
    }
}

void check_hypothesis(const FiniteFunctionClass& cls, std::size_t h)
{
    if (h >= cls.num_hypotheses()) {
        throw RangeError("hypothesis " + std::to_string(h) + " out of range (class has " +
                         std::to_string(cls.num_hypotheses()) + ")");
    }
}

// --- exact -----------------------------------------------------------------

class ExactCompressor final : public Compressor {
public:
    explicit ExactCompressor(FiniteFunctionClass cls) : cls_(std::move(cls)) {}

    class Bound final : public Encoder {
    public:
        explicit Bound(const ExactCompressor& parent) : parent_(parent) {}
        void encode(RandomStream&, std::size_t h, BitString& out) const override
        {
            check_hypothesis(parent_.cls_, h);
            out.append_bits(h, fixed_width(parent_.cls_.num_hypotheses()));
        }

    private:
        const ExactCompressor& parent_;
    };

    std::unique_ptr<const Encoder> bind(const FiniteFunctionClass& cls) const override
    {
        if (!(cls == cls_)) {
            throw InvariantError("exact compressor: bound to a different class");
        }
        return std::make_unique<Bound>(*this);
    }

    FunctionValues decode(BitReader& in) const override
    {
        const std::uint64_t h = in.read_bits(fixed_width(cls_.num_hypotheses()));
        if (h >= cls_.num_hypotheses()) {
            throw DecodeError("exact compressor: index " + std::to_string(h) + " out of range");
        }
        return cls_.function(h);
    }

    std::size_t num_points() const override { return cls_.num_points(); }
    std::size_t dim() const override { return cls_.dim(); }
    double sigma() const override { return 0.0; }
    double budget() const override { return fixed_width(cls_.num_hypotheses()); }
    std::string describe() const override { return "exact"; }

private:
    FiniteFunctionClass cls_;
};

// --- pointwise k-sketch ------------------------------------------------------

class SketchCompressor final : public Compressor {
public:
    SketchCompressor(std::size_t dim, std::size_t k, std::size_t num_points, double radius)
        : dim_(dim), k_(k), num_points_(num_points), radius_(radius)
    {
        if (dim_ == 0 || k_ == 0 || num_points_ == 0) {
            throw RangeError("sketch compressor: dim, k and num_points must be positive");
        }
        if (!(radius_ > 0.0)) {
            throw RangeError("sketch compressor: radius must be positive");
        }
    }

    class Bound final : public Encoder {
    public:
        Bound(const SketchCompressor& parent, const FiniteFunctionClass& cls) : parent_(parent)
        {
            sketchers_.reserve(cls.num_hypotheses() * cls.num_points());
            for (std::size_t h = 0; h < cls.num_hypotheses(); ++h) {
                for (std::size_t j = 0; j < cls.num_points(); ++j) {
                    sketchers_.emplace_back(cls.point_values(h, j));
                }
            }
            num_hypotheses_ = cls.num_hypotheses();
        }

        void encode(RandomStream& rng, std::size_t h, BitString& out) const override
        {
            if (h >= num_hypotheses_) {
                throw RangeError("sketch compressor: hypothesis " + std::to_string(h) + " out of range");
            }
            for (std::size_t j = 0; j < parent_.num_points_; ++j) {
                const auto& sketcher = sketchers_[h * parent_.num_points_ + j];
                for (std::size_t i = 0; i < parent_.k_; ++i) {
                    append_sketch(out, sketcher.sample(rng), parent_.dim_);
                }
            }
        }

    private:
        const SketchCompressor& parent_;
        std::vector<VectorSketcher> sketchers_;
        std::size_t num_hypotheses_ = 0;
    };

    std::unique_ptr<const Encoder> bind(const FiniteFunctionClass& cls) const override
    {
        check_class_shape(*this, cls);
        return std::make_unique<Bound>(*this, cls);
    }

    FunctionValues decode(BitReader& in) const override
    {
        FunctionValues out(num_points_, dim_);
        const double inv_k = 1.0 / static_cast<double>(k_);
        for (std::size_t j = 0; j < num_points_; ++j) {
            for (std::size_t i = 0; i < k_; ++i) {
                const auto o = read_sketch(in, dim_);
                out.at(j, o.index) += static_cast<double>(o.value) * inv_k;
            }
        }
        return out;
    }

    std::size_t num_points() const override { return num_points_; }
    std::size_t dim() const override { return dim_; }
    double sigma() const override
    {
        return std::sqrt((0.25 + 2.0 * radius_ * radius_) / static_cast<double>(k_));
    }
    double budget() const override
    {
        return static_cast<double>(num_points_ * k_) * sketch_bits_envelope(dim_, radius_);
    }
    std::string describe() const override
    {
        std::ostringstream s;
        s << "sketch(d=" << dim_ << ", k=" << k_ << ", m=" << num_points_ << ")";
        return s.str();
    }

private:
    std::size_t dim_;
    std::size_t k_;
    std::size_t num_points_;
    double radius_;
};

// --- averaging and median over independent copies ---------------------------

enum class Combine { mean, median };

class CopiesCompressor final : public Compressor {
public:
    CopiesCompressor(CompressorPtr inner, std::size_t copies, Combine mode, double sigma)
        : inner_(std::move(inner)), copies_(copies), mode_(mode), sigma_(sigma)
    {
    }

    class Bound final : public Encoder {
    public:
        Bound(std::size_t copies, std::unique_ptr<const Encoder> inner) : copies_(copies), inner_(std::move(inner)) {}
        void encode(RandomStream& rng, std::size_t h, BitString& out) const override
        {
            for (std::size_t i = 0; i < copies_; ++i) {
                RandomStream copy = rng.substream(i);
                inner_->encode(copy, h, out);
            }
        }

    private:
        std::size_t copies_;
        std::unique_ptr<const Encoder> inner_;
    };

    std::unique_ptr<const Encoder> bind(const FiniteFunctionClass& cls) const override
    {
        return std::make_unique<Bound>(copies_, inner_->bind(cls));
    }

    FunctionValues decode(BitReader& in) const override
    {
        if (mode_ == Combine::mean) {
            FunctionValues acc = inner_->decode(in);
            for (std::size_t i = 1; i < copies_; ++i) {
                const auto next = inner_->decode(in);
                for (std::size_t t = 0; t < acc.flat().size(); ++t) {
                    acc.flat()[t] += next.flat()[t];
                }
            }
            for (double& v : acc.flat()) {
                v /= static_cast<double>(copies_);
            }
            return acc;
        }
        std::vector<FunctionValues> parts;
        parts.reserve(copies_);
        for (std::size_t i = 0; i < copies_; ++i) {
            parts.push_back(inner_->decode(in));
        }
        FunctionValues out(inner_->num_points(), inner_->dim());
        std::vector<double> column(copies_);
        for (std::size_t t = 0; t < out.flat().size(); ++t) {
            for (std::size_t i = 0; i < copies_; ++i) {
                column[i] = parts[i].flat()[t];
            }
            out.flat()[t] = lower_median(column);
        }
        return out;
    }

    std::size_t num_points() const override { return inner_->num_points(); }
    std::size_t dim() const override { return inner_->dim(); }
    double sigma() const override { return sigma_; }
    double budget() const override { return inner_->budget() * static_cast<double>(copies_); }
    std::string describe() const override
    {
        return std::string(mode_ == Combine::mean ? "amplify(" : "median(") + inner_->describe() + ", " +
               std::to_string(copies_) + ")";
    }

private:
    CompressorPtr inner_;
    std::size_t copies_;
    Combine mode_;
    double sigma_;
};

// --- orthonormal transport ---------------------------------------------------

class TransportedCompressor final : public Compressor {
public:
    TransportedCompressor(CompressorPtr inner, Matrix u) : inner_(std::move(inner)), u_(std::move(u)) {}

    class Bound final : public Encoder {
    public:
        Bound(std::shared_ptr<const FiniteFunctionClass> pulled, std::unique_ptr<const Encoder> inner)
            : pulled_(std::move(pulled)), inner_(std::move(inner))
        {
        }
        void encode(RandomStream& rng, std::size_t h, BitString& out) const override
        {
            inner_->encode(rng, h, out);
        }

    private:
        std::shared_ptr<const FiniteFunctionClass> pulled_;
        std::unique_ptr<const Encoder> inner_;
    };

    std::unique_ptr<const Encoder> bind(const FiniteFunctionClass& cls) const override
    {
        check_class_shape(*this, cls);
        const auto rows = u_.rows();
        const auto cols = u_.cols();
        std::vector<double> values;
        values.reserve(cls.num_hypotheses() * cls.num_points() * static_cast<std::size_t>(cols));
        for (std::size_t h = 0; h < cls.num_hypotheses(); ++h) {
            for (std::size_t j = 0; j < cls.num_points(); ++j) {
                const auto row = cls.point_values(h, j);
                const Eigen::Map<const Vector> y(row.data(), rows);
                const Vector x = u_.transpose() * y;
                values.insert(values.end(), x.data(), x.data() + cols);
            }
        }
        auto pulled = std::make_shared<const FiniteFunctionClass>(cls.num_hypotheses(), cls.num_points(),
                                                                  static_cast<std::size_t>(cols), std::move(values));
        auto inner = inner_->bind(*pulled);
        return std::make_unique<Bound>(std::move(pulled), std::move(inner));
    }

    FunctionValues decode(BitReader& in) const override
    {
        const auto inner = inner_->decode(in);
        FunctionValues out(inner.num_points(), static_cast<std::size_t>(u_.rows()));
        for (std::size_t j = 0; j < inner.num_points(); ++j) {
            const Eigen::Map<const Vector> x(inner.point(j).data(), u_.cols());
            Eigen::Map<Vector> y(out.point(j).data(), u_.rows());
            y.noalias() = u_ * x;
        }
        return out;
    }

    std::size_t num_points() const override { return inner_->num_points(); }
    std::size_t dim() const override { return static_cast<std::size_t>(u_.rows()); }
    double sigma() const override { return inner_->sigma(); }
    double budget() const override { return inner_->budget(); }
    std::string describe() const override
    {
        return "transport(" + inner_->describe() + ", " + std::to_string(u_.rows()) + "x" +
               std::to_string(u_.cols()) + ")";
    }

private:
    CompressorPtr inner_;
    Matrix u_;
};

} // namespace

CompressorPtr exact_compressor(FiniteFunctionClass cls)
{
    return std::make_shared<ExactCompressor>(std::move(cls));
}

CompressorPtr sketch_compressor(std::size_t dim, std::size_t k, std::size_t num_points, double radius)
{
    return std::make_shared<SketchCompressor>(dim, k, num_points, radius);
}

CompressorPtr ball_compressor(double radius, std::size_t dim, double sigma_target, std::size_t num_points)
{
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw RangeError("ball compressor: radius must be positive and finite");
    }
    const double base = 0.25 + 2.0 * radius * radius;
    if (!(sigma_target > 0.0) || sigma_target > std::sqrt(base) * (1.0 + 1e-12)) {
        throw RangeError("ball compressor: sigma_target must lie in (0, sqrt(1/4 + 2 M^2)]");
    }
    const double ratio = base / (sigma_target * sigma_target);
    const auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(ratio - 1e-9)));
    return sketch_compressor(dim, k, num_points, radius);
}

std::size_t amplification_copies(double eps)
{
    if (!(eps > 0.0) || eps > 1.0) {
        throw RangeError("amplify: eps must lie in (0, 1]");
    }
    return static_cast<std::size_t>(std::ceil(1.0 / (eps * eps) - 1e-9));
}

CompressorPtr amplify(CompressorPtr c, double eps)
{
    const std::size_t copies = amplification_copies(eps);
    if (copies == 1) {
        return c;
    }
    const double sigma = c->sigma() * eps;
    return std::make_shared<CopiesCompressor>(std::move(c), copies, Combine::mean, sigma);
}

CompressorPtr amplify_copies(CompressorPtr c, std::size_t copies)
{
    if (copies == 0) {
        throw RangeError("amplify: copy count must be positive");
    }
    if (copies == 1) {
        return c;
    }
    const double sigma = c->sigma() / std::sqrt(static_cast<double>(copies));
    return std::make_shared<CopiesCompressor>(std::move(c), copies, Combine::mean, sigma);
}

CompressorPtr median_boost(CompressorPtr c, std::size_t k)
{
    if (k == 0) {
        throw RangeError("median_boost: k must be positive");
    }
    if (k == 1) {
        return c;
    }
    const double sigma = c->sigma();
    return std::make_shared<CopiesCompressor>(std::move(c), k, Combine::median, sigma);
}

CompressorPtr transport(CompressorPtr c, const Matrix& u)
{
    if (static_cast<std::size_t>(u.cols()) != c->dim()) {
        throw InvariantError("transport: U has " + std::to_string(u.cols()) + " columns, compressor dim is " +
                             std::to_string(c->dim()));
    }
    if (u.rows() < u.cols() || orthonormality_defect(u) > 1e-9) {
        throw InvariantError("transport: U does not have orthonormal columns");
    }
    return std::make_shared<TransportedCompressor>(std::move(c), u);
}

EstimatorReport verify_estimator(const Compressor& c, const FiniteFunctionClass& cls,
                                 const EmpiricalDistribution& dist, std::size_t h, std::size_t trials,
                                 const RandomStream& rng, unsigned workers)
{
    if (trials < 1000) {
        throw RangeError("verify_estimator: need at least 1000 trials");
    }
    dist.check_compatible(cls);
    check_class_shape(c, cls);
    check_hypothesis(cls, h);
    const auto encoder = c.bind(cls);
    const auto batches = make_batches(trials, 64);
    const auto parts = map_batches(batches, workers, [&](const BatchRange& batch) {
        MomentAccumulator acc(cls.num_points(), cls.dim(), dist.weights());
        for (std::size_t t = batch.begin; t < batch.end; ++t) {
            RandomStream trial = rng.substream(t);
            BitString bits;
            encoder->encode(trial, h, bits);
            FunctionValues est;
            try {
                BitReader in(bits);
                est = c.decode(in);
                if (!in.at_end()) {
                    throw DecodeError(std::to_string(in.remaining()) + " trailing bits");
                }
            } catch (const DecodeError& e) {
                throw DecodeError("verify_estimator: trial " + std::to_string(t) + ": " + e.what());
            }
            for (std::size_t j = 0; j < cls.num_points(); ++j) {
                acc.add_point_dense(j, est.point(j));
            }
            acc.end_sample(bits.size());
        }
        return acc;
    });
    return summarize(parts, cls.function(h));
}

} // namespace adlkit
