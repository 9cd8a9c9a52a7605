#include "adlkit/bounds.hpp"

#include "adlkit/bitstring.hpp"
#include "adlkit/error.hpp"
#include "adlkit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adlkit {

LossSpec LossSpec::squared_clipped(double bound)
{
    if (!(bound > 0.0) || !std::isfinite(bound)) {
        throw RangeError("loss: B must be positive and finite");
    }
    return {LossKind::squared_clipped, bound};
}

LossSpec LossSpec::absolute_clipped(double bound)
{
    if (!(bound > 0.0) || !std::isfinite(bound)) {
        throw RangeError("loss: B must be positive and finite");
    }
    return {LossKind::absolute_clipped, bound};
}

double LossSpec::lipschitz() const
{
    return kind == LossKind::squared_clipped ? 2.0 * std::sqrt(bound) : 1.0;
}

double LossSpec::operator()(std::span<const double> prediction, std::span<const double> label) const
{
    double gap = 0.0;
    for (std::size_t c = 0; c < prediction.size(); ++c) {
        gap = std::max(gap, std::abs(prediction[c] - label[c]));
    }
    return std::min(kind == LossKind::squared_clipped ? gap * gap : gap, bound);
}

std::string to_string(LossKind k)
{
    return k == LossKind::squared_clipped ? "squared-clipped" : "absolute-clipped";
}

LossKind parse_loss_kind(const std::string& s)
{
    if (s == "squared-clipped") {
        return LossKind::squared_clipped;
    }
    if (s == "absolute-clipped") {
        return LossKind::absolute_clipped;
    }
    throw ParseError("unknown loss kind '" + s + "'");
}

JointDistribution::JointDistribution(std::vector<LabeledAtom> atoms) : atoms_(std::move(atoms))
{
    if (atoms_.empty()) {
        throw RangeError("joint distribution: empty support");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const double p = atoms_[i].probability;
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw InvariantError("joint distribution: atom " + std::to_string(i) + " has an invalid probability");
        }
        total += p;
        cdf_.push_back(total);
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw InvariantError("joint distribution: probabilities sum to " + std::to_string(total));
    }
}

std::size_t JointDistribution::locate(double u) const
{
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end() - 1, u);
    return static_cast<std::size_t>(it - cdf_.begin());
}

RepEstimate rep_estimate(const FiniteFunctionClass& cls, const JointDistribution& joint, const LossSpec& loss,
                         std::size_t m, std::size_t trials, const RandomStream& rng, unsigned workers)
{
    if (m == 0 || trials < 2) {
        throw RangeError("rep_estimate: need m >= 1 and at least 2 trials");
    }
    const std::size_t hyps = cls.num_hypotheses();
    const std::size_t atoms = joint.size();
    // table[h * atoms + s] = loss of h on atom s
    std::vector<double> table(hyps * atoms);
    std::vector<double> population(hyps, 0.0);
    for (std::size_t s = 0; s < atoms; ++s) {
        const auto& a = joint.atoms()[s];
        if (a.point >= cls.num_points() || a.label.size() != cls.dim()) {
            throw InvariantError("rep_estimate: atom " + std::to_string(s) + " does not match the class");
        }
        for (std::size_t h = 0; h < hyps; ++h) {
            table[h * atoms + s] = loss(cls.point_values(h, a.point), a.label);
            population[h] += a.probability * table[h * atoms + s];
        }
    }

    struct Sums {
        double sum = 0.0;
        double sum_sq = 0.0;
    };
    const auto batches = make_batches(trials, 64);
    const auto parts = map_batches(batches, workers, [&](const BatchRange& b) {
        Sums out;
        std::vector<std::size_t> counts(atoms);
        for (std::size_t t = b.begin; t < b.end; ++t) {
            RandomStream r = rng.substream(t);
            std::fill(counts.begin(), counts.end(), 0);
            for (std::size_t i = 0; i < m; ++i) {
                ++counts[joint.locate(r.uniform())];
            }
            double rep = -std::numeric_limits<double>::infinity();
            for (std::size_t h = 0; h < hyps; ++h) {
                double empirical = 0.0;
                for (std::size_t s = 0; s < atoms; ++s) {
                    empirical += static_cast<double>(counts[s]) * table[h * atoms + s];
                }
                rep = std::max(rep, population[h] - empirical / static_cast<double>(m));
            }
            out.sum += rep;
            out.sum_sq += rep * rep;
        }
        return out;
    });
    Sums total;
    for (const auto& p : parts) {
        total.sum += p.sum;
        total.sum_sq += p.sum_sq;
    }
    const double n = static_cast<double>(trials);
    RepEstimate est;
    est.trials = trials;
    est.m = m;
    est.mean_rep = total.sum / n;
    const double var = std::max(0.0, (total.sum_sq - n * est.mean_rep * est.mean_rep) / (n - 1.0));
    est.std_err = std::sqrt(var / n);
    return est;
}

namespace {

// ceil that ignores rounding noise, so 4 / 0.1^2 gives 400.
double ceil_clean(double x)
{
    return std::ceil(x * (1.0 - 1e-12));
}

} // namespace

double adl_to_cover_bound(double n, double eps, std::size_t d, std::size_t m, CoverBoundForm form)
{
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw RangeError("adl_to_cover_bound: n must be positive");
    }
    if (!(eps > 0.0) || eps > 1.0) {
        throw RangeError("adl_to_cover_bound: eps must lie in (0, 1]");
    }
    if (d == 0 || m == 0) {
        throw RangeError("adl_to_cover_bound: d and m must be positive");
    }
    const double inv_sq = 1.0 / (eps * eps);
    switch (form) {
    case CoverBoundForm::single:
        return 2.0 * ceil_clean(4.0 * inv_sq) * n;
    case CoverBoundForm::multi_proof: {
        const double k = std::max(1.0, static_cast<double>(fixed_width(d)));
        return 2.0 * k * ceil_clean(16.0 * inv_sq) * n;
    }
    case CoverBoundForm::multi_statement: {
        const double k = std::max(1.0, ceil_clean(std::log(static_cast<double>(d) * static_cast<double>(m))));
        return ceil_clean(16.0 * inv_sq) * k * n;
    }
    }
    throw RangeError("adl_to_cover_bound: unknown form");
}

double cover_to_rep_bound(double n, std::size_t m, double lipschitz, double bound, std::optional<double> delta)
{
    if (m < 2) {
        throw RangeError("cover_to_rep_bound: m must be at least 2");
    }
    if (!(n >= 0.0) || !(lipschitz >= 0.0) || !(bound >= 0.0)) {
        throw RangeError("cover_to_rep_bound: n, L and B must be nonnegative");
    }
    const double md = static_cast<double>(m);
    double value = (lipschitz + bound) * std::sqrt(n / md) * std::log(md);
    if (delta) {
        if (!(*delta > 0.0) || *delta > 2.0) {
            throw RangeError("cover_to_rep_bound: delta must lie in (0, 2]");
        }
        value += bound * std::sqrt(2.0 * std::log(2.0 / *delta) / md);
    }
    return value;
}

double haussler_bound(std::size_t vc, double eps)
{
    if (!(eps > 0.0)) {
        throw RangeError("haussler_bound: eps must be positive");
    }
    return static_cast<double>(vc) / eps;
}

FiniteFunctionClass threshold_class(std::size_t points)
{
    if (points == 0) {
        throw RangeError("threshold class: need at least one point");
    }
    std::vector<double> values((points + 1) * points);
    for (std::size_t t = 0; t <= points; ++t) {
        for (std::size_t i = 0; i < points; ++i) {
            values[t * points + i] = i >= t ? 1.0 : 0.0;
        }
    }
    return FiniteFunctionClass(points + 1, points, 1, std::move(values));
}

JointDistribution noisy_threshold_joint(std::size_t points, std::size_t threshold, double noise)
{
    if (points == 0 || threshold > points) {
        throw RangeError("noisy threshold: threshold must lie in [0, points]");
    }
    if (!(noise >= 0.0) || noise > 1.0) {
        throw RangeError("noisy threshold: noise must lie in [0, 1]");
    }
    std::vector<LabeledAtom> atoms;
    const double share = 1.0 / static_cast<double>(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double clean = i >= threshold ? 1.0 : 0.0;
        atoms.push_back({i, {clean}, share * (1.0 - noise)});
        atoms.push_back({i, {1.0 - clean}, share * noise});
    }
    // Absorb the rounding residue so the masses sum to 1 within tolerance.
    double total = 0.0;
    for (const auto& a : atoms) {
        total += a.probability;
    }
    atoms.front().probability += 1.0 - total;
    return JointDistribution(std::move(atoms));
}

void to_json(nlohmann::json& j, const RepEstimate& r)
{
    j = nlohmann::json{{"mean_rep", r.mean_rep}, {"std_err", r.std_err}, {"trials", r.trials}, {"m", r.m}};
}

void to_json(nlohmann::json& j, const RepBoundRow& r)
{
    j = nlohmann::json{{"m", r.m}, {"bound", r.bound}, {"measured_rep", r.measured_rep}, {"std_err", r.std_err}};
}

} // namespace adlkit
