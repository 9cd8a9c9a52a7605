#pragma once

#include "adlkit/function_class.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace adlkit {

// Per-point norm on R^d; the outer norm is always the root mean square over
// the empirical distribution:
//   dist(f, g) = sqrt( sum_x D(x) |f(x) - g(x)|_inner^2 ).
enum class InnerNorm { sup, euclidean };

struct NormSpec {
    InnerNorm inner = InnerNorm::sup;
};

std::string to_string(InnerNorm n);
InnerNorm parse_inner_norm(const std::string& s);

// Distance between hypothesis i of a and hypothesis j of b (same sample).
double distance(const FiniteFunctionClass& a, std::size_t i, const FiniteFunctionClass& b, std::size_t j,
                const EmpiricalDistribution& dist, NormSpec norm);

// Symmetric |H| x |H| distance matrix, row-major.
class DistanceMatrix {
public:
    DistanceMatrix(const FiniteFunctionClass& cls, const EmpiricalDistribution& dist, NormSpec norm,
                   unsigned workers = 0);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
    // Smallest strictly positive entry; 0 when every pair coincides.
    double min_positive() const noexcept;
    double diameter() const noexcept;

private:
    std::size_t n_;
    std::vector<double> d_;
};

// "within eps" and "farther than eps" share one relative slack so the two
// predicates are exact complements.
bool within(double distance, double eps) noexcept;

using IndexSet = std::vector<std::size_t>;

// Size guard for exact (exponential-time) searches.
inline constexpr std::size_t kExactGuard = 24;

// Minimum-cardinality internal cover: smallest set C of class members with
// every h within eps of some member of C. Throws RangeError if |H| > 24.
IndexSet exact_cover(const FiniteFunctionClass& cls, const EmpiricalDistribution& dist, double eps,
                     NormSpec norm);

// Minimum cover of `cls` by elements of `centers` (which may lie outside
// the class). Returns indices into centers. Throws RangeError if |H| > 24
// or |centers| > 64, and InvariantError if no cover exists.
IndexSet exact_cover_with_centers(const FiniteFunctionClass& cls, const FiniteFunctionClass& centers,
                                  const EmpiricalDistribution& dist, double eps, NormSpec norm);

enum class GreedyRule {
    farthest_point, // net from the farthest-point traversal; size <= maximum eps-packing
    set_cover       // classical greedy set cover; within ln|H| + 1 of the optimum
};

IndexSet greedy_cover(const FiniteFunctionClass& cls, const EmpiricalDistribution& dist, double eps, NormSpec norm,
                      GreedyRule rule = GreedyRule::farthest_point);

// Maximal set with pairwise distances > eps, taken from the farthest-point
// traversal. Its size is a certified LOWER bound on the cover number at
// eps/2 (each eps/2-ball holds at most one member).
IndexSet greedy_packing(const FiniteFunctionClass& cls, const EmpiricalDistribution& dist, double eps,
                        NormSpec norm);

// Farthest-point (Gonzalez) traversal from hypothesis 0: order[k] is the
// point farthest from order[0..k-1] (lowest index on ties) and radius[k] its
// distance to them (radius[0] = +inf). Radii are non-increasing.
struct Traversal {
    IndexSet order;
    std::vector<double> radius;
};
Traversal farthest_point_traversal(const DistanceMatrix& dm);

bool is_cover(const FiniteFunctionClass& cls, const EmpiricalDistribution& dist, const IndexSet& members, double eps,
              NormSpec norm);

// Largest shattered subset of a {0,1}-valued class with d = 1 and m <= 24,
// by ascending-size subset search. Throws InvariantError on non-binary
// values or d != 1, RangeError when m > 24.
std::size_t vc_dimension(const FiniteFunctionClass& cls);

// Nested covers at scales eps_n = 2^-n, n = 0..n_max, over the extended
// class whose member 0 is the zero function g0 and member i+1 is
// hypothesis i. covers[0] = {g0}; covers[n_max] is the whole class, so the
// chain is exact at its last scale.
struct CoverChain {
    FiniteFunctionClass extended;           // g0 followed by the class
    EmpiricalDistribution distribution;
    NormSpec norm;
    std::size_t n_max = 0;
    std::vector<double> scales;             // eps_n
    std::vector<IndexSet> covers;           // indices into extended, ascending
    // assignment[n][h]: position within covers[n] of the member nearest to h
    // (lowest position on ties).
    std::vector<std::vector<std::size_t>> assignment;

    std::size_t num_hypotheses() const noexcept { return extended.num_hypotheses() - 1; }
    // Extended-class index of h_n.
    std::size_t member(std::size_t n, std::size_t h) const { return covers[n][assignment[n][h]]; }
};

// Requires every value in [0, 1] and g0 within distance 1 of every h.
// n_max is 0 when every hypothesis is the zero function, otherwise the
// smallest n >= 1 with eps_n < (minimum positive pairwise distance) / 2.
// Intermediate covers use exact_cover (use_exact, |H| <= 24) or the
// farthest-point greedy cover.
CoverChain build_cover_chain(const FiniteFunctionClass& cls, const EmpiricalDistribution& dist, NormSpec norm,
                             bool use_exact);

// Checks the chain invariants; returns an empty string when they hold.
std::string check_cover_chain(const CoverChain& chain);

struct CoverReportRow {
    double scale = 0.0;
    std::size_t size = 0;
    IndexSet members;
    std::string method;      // exact, greedy-net, greedy-set-cover, greedy-packing
    std::string certifies;   // e.g. "upper bound on N(eps)"
};
void to_json(nlohmann::json& j, const CoverReportRow& r);

} // namespace adlkit
