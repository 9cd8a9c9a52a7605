#include "adlkit/cover.hpp"

#include "adlkit/error.hpp"
#include "adlkit/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace adlkit {

std::string to_string(InnerNorm n)
{
    return n == InnerNorm::sup ? "sup" : "euclidean";
}

InnerNorm parse_inner_norm(const std::string& s)
{
    if (s == "sup") {
        return InnerNorm::sup;
    }
    if (s == "euclidean") {
        return InnerNorm::euclidean;
    }
    throw RangeError("unknown inner norm \"" + s + "\" (expected sup or euclidean)");
}

double distance(const FiniteFunctionClass& a, std::size_t i, const FiniteFunctionClass& b, std::size_t j,
                const EmpiricalDistribution& dist, NormSpec norm)
{
    double total = 0.0;
    for (std::size_t x = 0; x < a.num_points(); ++x) {
        const auto fa = a.point_values(i, x);
        const auto fb = b.point_values(j, x);
        double inner = 0.0;
        for (std::size_t c = 0; c < fa.size(); ++c) {
            const double diff = fa[c] - fb[c];
            if (norm.inner == InnerNorm::sup) {
                inner = std::max(inner, diff * diff);
            } else {
                inner += diff * diff;
            }
        }
        total += dist[x] * inner;
    }
    return std::sqrt(total);
}

bool within(double distance, double eps) noexcept
{
    return distance <= eps * (1.0 + 1e-12);
}

DistanceMatrix::DistanceMatrix(const FiniteFunctionClass& cls, const EmpiricalDistribution& dist, NormSpec norm,
                               unsigned workers)
    : n_(cls.num_hypotheses()), d_(n_ * n_, 0.0)
{
    dist.check_compatible(cls);
    const auto rows = make_batches(n_, n_);
    map_batches(rows, workers, [&](const BatchRange& r) {
        for (std::size_t i = r.begin; i < r.end; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                d_[i * n_ + j] = distance(cls, i, cls, j, dist, norm);
            }
        }
        return 0;
    });
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            d_[i * n_ + j] = d_[j * n_ + i];
        }
    }
}

double DistanceMatrix::min_positive() const noexcept
{
    double best = 0.0;
    for (double v : d_) {
        if (v > 0.0 && (best == 0.0 || v < best)) {
            best = v;
        }
    }
    return best;
}

double DistanceMatrix::diameter() const noexcept
{
    return d_.empty() ? 0.0 : *std::max_element(d_.begin(), d_.end());
}

namespace {

class ExactSetCover {
public:
    ExactSetCover(std::vector<std::uint32_t> coverage, std::uint32_t universe)
        : coverage_(std::move(coverage)), universe_(universe)
    {
        for (auto c : coverage_) {
            max_cover_ = std::max(max_cover_, std::popcount(c));
        }
    }

    IndexSet solve()
    {
        const int elements = std::popcount(universe_);
        for (int budget = 1; budget <= elements; ++budget) {
            chosen_.clear();
            if (search(universe_, budget)) {
                IndexSet out(chosen_.begin(), chosen_.end());
                std::sort(out.begin(), out.end());
                return out;
            }
        }
        return {};
    }

private:
    bool search(std::uint32_t uncovered, int budget)
    {
        if (uncovered == 0) {
            return true;
        }
        if (budget == 0 || std::popcount(uncovered) > budget * max_cover_) {
            return false;
        }
        // Branch on the uncovered element with the fewest candidate centers.
        int best_element = -1;
        int best_count = std::numeric_limits<int>::max();
        for (std::uint32_t rest = uncovered; rest != 0; rest &= rest - 1) {
            const int e = std::countr_zero(rest);
            int count = 0;
            for (auto c : coverage_) {
                count += static_cast<int>((c >> e) & 1U);
            }
            if (count < best_count) {
                best_count = count;
                best_element = e;
            }
        }
        for (std::size_t c = 0; c < coverage_.size(); ++c) {
            if (((coverage_[c] >> best_element) & 1U) == 0) {
                continue;
            }
            chosen_.push_back(c);
            if (search(uncovered & ~coverage_[c], budget - 1)) {
                return true;
            }
            chosen_.pop_back();
        }
        return false;
    }

    std::vector<std::uint32_t> coverage_;
    std::uint32_t universe_;
    int max_cover_ = 0;
    std::vector<std::size_t> chosen_;
};

} // namespace

IndexSet exact_cover_with_centers(const FiniteFunctionClass& cls, const FiniteFunctionClass& centers,
                                  const EmpiricalDistribution& dist, double eps, NormSpec norm)
{
    const std::size_t n = cls.num_hypotheses();
    if (n > kExactGuard) {
        throw RangeError("exact cover: |H| = " + std::to_string(n) + " exceeds the guard of " +
                         std::to_string(kExactGuard));
    }
    if (centers.num_hypotheses() > 64) {
        throw RangeError("exact cover: more than 64 candidate centers");
    }
    if (centers.num_points() != cls.num_points() || centers.dim() != cls.dim()) {
        throw InvariantError("exact cover: centers and class differ in shape");
    }
    if (!(eps >= 0.0)) {
        throw RangeError("exact cover: eps must be nonnegative");
    }
    dist.check_compatible(cls);
    std::vector<std::uint32_t> coverage(centers.num_hypotheses(), 0);
    std::uint32_t reachable = 0;
    for (std::size_t c = 0; c < centers.num_hypotheses(); ++c) {
        for (std::size_t h = 0; h < n; ++h) {
            if (within(distance(centers, c, cls, h, dist, norm), eps)) {
                coverage[c] |= std::uint32_t{1} << h;
            }
        }
        reachable |= coverage[c];
    }
    const std::uint32_t universe = n == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << n) - 1;
    if (reachable != universe) {
        throw InvariantError("exact cover: some hypothesis is farther than eps from every center");
    }
    return ExactSetCover(std::move(coverage), universe).solve();
}

IndexSet exact_cover(const FiniteFunctionClass& cls, const EmpiricalDistribution& dist, double eps, NormSpec norm)
{
    return exact_cover_with_centers(cls, cls, dist, eps, norm);
}

Traversal farthest_point_traversal(const DistanceMatrix& dm)
{
    Traversal t;
    const std::size_t n = dm.size();
    if (n == 0) {
        return t;
    }
    std::vector<double> nearest(n);
    std::vector<bool> taken(n, false);
    t.order.push_back(0);
    t.radius.push_back(std::numeric_limits<double>::infinity());
    taken[0] = true;
    for (std::size_t i = 0; i < n; ++i) {
        nearest[i] = dm(0, i);
    }
    while (t.order.size() < n) {
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!taken[i] && (best == n || nearest[i] > nearest[best])) {
                best = i;
            }
        }
        t.order.push_back(best);
        t.radius.push_back(nearest[best]);
        taken[best] = true;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], dm(best, i));
        }
    }
    return t;
}

namespace {

IndexSet traversal_prefix(const Traversal& t, double eps)
{
    IndexSet out{t.order.front()};
    for (std::size_t k = 1; k < t.order.size() && !within(t.radius[k], eps); ++k) {
        out.push_back(t.order[k]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

IndexSet greedy_cover(const FiniteFunctionClass& cls, const EmpiricalDistribution& dist, double eps, NormSpec norm,
                      GreedyRule rule)
{
    const DistanceMatrix dm(cls, dist, norm);
    if (rule == GreedyRule::farthest_point) {
        return traversal_prefix(farthest_point_traversal(dm), eps);
    }
    const std::size_t n = dm.size();
    std::vector<bool> covered(n, false);
    std::size_t remaining = n;
    IndexSet out;
    while (remaining > 0) {
        std::size_t best = 0;
        std::size_t best_gain = 0;
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t gain = 0;
            for (std::size_t h = 0; h < n; ++h) {
                gain += (!covered[h] && within(dm(c, h), eps)) ? 1 : 0;
            }
            if (gain > best_gain) {
                best_gain = gain;
                best = c;
            }
        }
        out.push_back(best);
        for (std::size_t h = 0; h < n; ++h) {
            if (!covered[h] && within(dm(best, h), eps)) {
                covered[h] = true;
                --remaining;
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

IndexSet greedy_packing(const FiniteFunctionClass& cls, const EmpiricalDistribution& dist, double eps, NormSpec norm)
{
    // The traversal prefix whose radii exceed eps is pairwise farther than
    // eps apart and leaves every other point within eps: a maximal packing.
    const DistanceMatrix dm(cls, dist, norm);
    return traversal_prefix(farthest_point_traversal(dm), eps);
}

bool is_cover(const FiniteFunctionClass& cls, const EmpiricalDistribution& dist, const IndexSet& members, double eps,
              NormSpec norm)
{
    for (std::size_t h = 0; h < cls.num_hypotheses(); ++h) {
        const bool ok = std::any_of(members.begin(), members.end(), [&](std::size_t c) {
            return within(distance(cls, c, cls, h, dist, norm), eps);
        });
        if (!ok) {
            return false;
        }
    }
    return true;
}

std::size_t vc_dimension(const FiniteFunctionClass& cls)
{
    if (cls.dim() != 1) {
        throw InvariantError("vc_dimension: class must be scalar-valued (dim = 1)");
    }
    const std::size_t m = cls.num_points();
    if (m > kExactGuard) {
        throw RangeError("vc_dimension: m = " + std::to_string(m) + " exceeds the guard of " +
                         std::to_string(kExactGuard));
    }
    std::vector<std::uint32_t> labelings;
    for (std::size_t h = 0; h < cls.num_hypotheses(); ++h) {
        std::uint32_t mask = 0;
        for (std::size_t x = 0; x < m; ++x) {
            const double v = cls.value(h, x, 0);
            if (v != 0.0 && v != 1.0) {
                throw InvariantError("vc_dimension: non-binary value at [" + std::to_string(h) + "][" +
                                     std::to_string(x) + "]");
            }
            mask |= static_cast<std::uint32_t>(v == 1.0) << x;
        }
        labelings.push_back(mask);
    }
    std::sort(labelings.begin(), labelings.end());
    labelings.erase(std::unique(labelings.begin(), labelings.end()), labelings.end());

    std::size_t best = 0;
    std::vector<bool> seen;
    for (std::size_t size = 1; size <= m && (std::size_t{1} << size) <= labelings.size(); ++size) {
        bool found = false;
        // Enumerate subsets of the m points with `size` elements (Gosper's hack).
        for (std::uint32_t subset = (std::uint32_t{1} << size) - 1; subset < (std::uint32_t{1} << m) && !found;) {
            seen.assign(std::size_t{1} << size, false);
            std::size_t distinct = 0;
            for (auto lab : labelings) {
                // Compress the bits of lab selected by subset.
                std::uint32_t pattern = 0;
                int out = 0;
                for (std::uint32_t rest = subset; rest != 0; rest &= rest - 1, ++out) {
                    pattern |= ((lab >> std::countr_zero(rest)) & 1U) << out;
                }
                if (!seen[pattern]) {
                    seen[pattern] = true;
                    ++distinct;
                }
            }
            found = distinct == (std::size_t{1} << size);
            const std::uint32_t c = subset & (~subset + 1);
            const std::uint32_t r = subset + c;
            subset = (((r ^ subset) >> 2) / c) | r;
        }
        if (!found) {
            break; // shattering is hereditary: no larger set is shattered either
        }
        best = size;
    }
    return best;
}

CoverChain build_cover_chain(const FiniteFunctionClass& cls, const EmpiricalDistribution& dist, NormSpec norm,
                             bool use_exact)
{
    dist.check_compatible(cls);
    for (std::size_t i = 0; i < cls.values().size(); ++i) {
        const double v = cls.values()[i];
        if (v < 0.0 || v > 1.0) {
            throw InvariantError("cover chain: value " + std::to_string(v) + " at flat index " + std::to_string(i) +
                                 " lies outside [0, 1]");
        }
    }
    const std::size_t n_h = cls.num_hypotheses();
    std::vector<double> values(cls.num_points() * cls.dim(), 0.0);
    values.insert(values.end(), cls.values().begin(), cls.values().end());
    FiniteFunctionClass extended(n_h + 1, cls.num_points(), cls.dim(), std::move(values), cls.point_ids());

    bool all_zero = true;
    for (std::size_t h = 0; h < n_h; ++h) {
        const double d0 = distance(extended, 0, cls, h, dist, norm);
        if (!within(d0, 1.0)) {
            throw InvariantError("cover chain: the zero function is not a 1-cover (hypothesis " +
                                 std::to_string(h) + " at distance " + std::to_string(d0) + ")");
        }
        all_zero = all_zero && std::all_of(cls.hypothesis(h).begin(), cls.hypothesis(h).end(),
                                           [](double v) { return v == 0.0; });
    }

    const DistanceMatrix dm(cls, dist, norm);
    std::size_t n_max = 0;
    if (!all_zero) {
        n_max = 1;
        const double delta = dm.min_positive();
        if (delta > 0.0) {
            while (std::ldexp(1.0, -static_cast<int>(n_max)) >= delta / 2.0) {
                ++n_max;
            }
        }
    }

    CoverChain chain{std::move(extended), dist, norm, n_max, {}, {}, {}};
    for (std::size_t n = 0; n <= n_max; ++n) {
        const double eps = std::ldexp(1.0, -static_cast<int>(n));
        chain.scales.push_back(eps);
        IndexSet cover;
        if (n == 0) {
            cover = {0};
        } else if (n == n_max) {
            for (std::size_t h = 0; h < n_h; ++h) {
                cover.push_back(h + 1);
            }
        } else {
            const IndexSet members = use_exact ? exact_cover(cls, dist, eps, norm)
                                               : traversal_prefix(farthest_point_traversal(dm), eps);
            for (std::size_t h : members) {
                cover.push_back(h + 1);
            }
        }
        std::vector<std::size_t> assign(n_h);
        for (std::size_t h = 0; h < n_h; ++h) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t pos = 0; pos < cover.size(); ++pos) {
                const std::size_t e = cover[pos];
                const double d = e == 0 ? distance(chain.extended, 0, cls, h, dist, norm) : dm(e - 1, h);
                if (d < best) {
                    best = d;
                    assign[h] = pos;
                }
            }
        }
        chain.covers.push_back(std::move(cover));
        chain.assignment.push_back(std::move(assign));
    }
    return chain;
}

std::string check_cover_chain(const CoverChain& chain)
{
    if (chain.covers.size() != chain.n_max + 1 || chain.scales.size() != chain.n_max + 1 ||
        chain.assignment.size() != chain.n_max + 1) {
        return "chain has inconsistent scale counts";
    }
    if (chain.covers[0] != IndexSet{0}) {
        return "covers[0] is not the zero function";
    }
    const std::size_t n_h = chain.num_hypotheses();
    for (std::size_t n = 0; n <= chain.n_max; ++n) {
        if (chain.scales[n] != std::ldexp(1.0, -static_cast<int>(n))) {
            return "scale " + std::to_string(n) + " is not 2^-n";
        }
        for (std::size_t h = 0; h < n_h; ++h) {
            const double d = distance(chain.extended, chain.member(n, h), chain.extended, h + 1, chain.distribution,
                                      chain.norm);
            if (!within(d, chain.scales[n])) {
                return "hypothesis " + std::to_string(h) + " is " + std::to_string(d) + " from its scale-" +
                       std::to_string(n) + " center";
            }
            if (n == chain.n_max && d != 0.0) {
                return "terminal scale is not exact for hypothesis " + std::to_string(h);
            }
        }
    }
    return {};
}

void to_json(nlohmann::json& j, const CoverReportRow& r)
{
    j = nlohmann::json{{"scale", r.scale},
                       {"size", r.size},
                       {"members", r.members},
                       {"method", r.method},
                       {"certifies", r.certifies}};
}

} // namespace adlkit
