#include "adlkit/cli.hpp"

#include "adlkit/bounds.hpp"
#include "adlkit/chain.hpp"
#include "adlkit/class_io.hpp"
#include "adlkit/compressor.hpp"
#include "adlkit/cover.hpp"
#include "adlkit/error.hpp"
#include "adlkit/separation.hpp"
#include "adlkit/sketch.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

namespace adlkit::cli {

namespace {

using nlohmann::json;

// Result of one command: a JSON body, the same data as CSV rows, and the
// named checks that decide the exit status.
struct CommandOutput {
    json result = json::object();
    std::vector<std::string> header;
    std::vector<std::vector<json>> rows;
    std::vector<std::pair<std::string, bool>> checks;

    void check(std::string name, bool passed) { checks.emplace_back(std::move(name), passed); }
};

std::size_t trials_or(const RunConfig& c, std::size_t fallback)
{
    return c.trials == 0 ? fallback : c.trials;
}

ClassFile load_input(const RunConfig& c)
{
    if (!c.input_path) {
        throw RangeError(c.command + ": --input is required");
    }
    return read_class_file(*c.input_path);
}

EmpiricalDistribution distribution_of(const ClassFile& f)
{
    return f.distribution ? *f.distribution : EmpiricalDistribution::uniform(f.function_class.num_points());
}

std::vector<double> eps_or(const RunConfig& c, std::vector<double> fallback)
{
    return c.eps.empty() ? fallback : c.eps;
}

CommandOutput sketch_verify(const RunConfig& c, const RandomStream& rng)
{
    if (c.d == 0 || c.k == 0 || !(c.M >= 0.0)) {
        throw RangeError("sketch-verify: need d >= 1, k >= 1 and M >= 0");
    }
    RandomStream draw = rng.substream(0);
    std::vector<double> w(c.d);
    double norm = 0.0;
    for (auto& x : w) {
        x = draw.normal();
        norm += x * x;
    }
    norm = std::sqrt(norm);
    for (auto& x : w) {
        x = norm > 0.0 ? x * c.M / norm : 0.0;
    }
    const std::size_t trials = trials_or(c, 200000);
    const auto r = measure_k_sketch(w, c.k, trials, rng.substream(1), c.workers);
    const double envelope = (0.25 + 2.0 * c.M * c.M) / static_cast<double>(c.k);
    const double bits_envelope = static_cast<double>(c.k) * sketch_bits_envelope(c.d, c.M);

    CommandOutput out;
    out.result = {{"w", w}, {"estimator", r}, {"variance_envelope", envelope}, {"bits_envelope", bits_envelope}};
    out.header = {"d", "k", "norm", "trials", "bias_max", "bias_z_max", "lambda_max", "lambda_std_err",
                  "variance_envelope", "mean_bits", "bits_envelope"};
    out.rows.push_back({c.d, c.k, c.M, trials, r.bias_max, r.bias_z_max, r.lambda_max, r.lambda_std_err, envelope,
                        r.mean_bits, bits_envelope});
    out.check("bias within 5 standard errors", r.bias_z_max <= 5.0);
    out.check("lambda_max <= 1.05 * (1/4 + 2|w|^2) / k", r.lambda_max <= 1.05 * envelope);
    out.check("mean bits <= envelope", r.mean_bits <= bits_envelope);
    return out;
}

CommandOutput ball(const RunConfig& c, const RandomStream& rng)
{
    const auto comp = ball_compressor(c.M, c.d, c.sigma);
    // Probe hypotheses: the center, a boundary point on an axis, a random
    // boundary point and a random interior point.
    RandomStream draw = rng.substream(0);
    std::vector<FunctionValues> probes(4, FunctionValues(1, c.d));
    probes[1].at(0, 0) = c.M;
    for (std::size_t p = 2; p < 4; ++p) {
        double norm = 0.0;
        for (std::size_t j = 0; j < c.d; ++j) {
            probes[p].at(0, j) = draw.normal();
            norm += probes[p].at(0, j) * probes[p].at(0, j);
        }
        const double target = p == 2 ? c.M : c.M / 2.0;
        for (std::size_t j = 0; j < c.d; ++j) {
            probes[p].at(0, j) *= target / std::sqrt(norm);
        }
    }
    const auto cls = FiniteFunctionClass::from_functions(probes);
    const auto dist = EmpiricalDistribution::uniform(1);
    const std::size_t trials = trials_or(c, 20000);

    CommandOutput out;
    out.header = {"h", "norm", "lambda_max", "lambda_std_err", "sigma_sq_claim", "mean_bits", "budget"};
    json per = json::array();
    bool variance_ok = true;
    bool bits_ok = true;
    for (std::size_t h = 0; h < cls.num_hypotheses(); ++h) {
        const auto r = verify_estimator(*comp, cls, dist, h, trials, rng.substream(1 + h), c.workers);
        const double norm = std::sqrt(std::inner_product(probes[h].flat().begin(), probes[h].flat().end(),
                                                         probes[h].flat().begin(), 0.0));
        per.push_back({{"h", h}, {"norm", norm}, {"estimator", r}});
        out.rows.push_back({h, norm, r.lambda_max, r.lambda_std_err, comp->sigma() * comp->sigma(), r.mean_bits,
                            comp->budget()});
        variance_ok = variance_ok && r.lambda_max <= comp->sigma() * comp->sigma() + r.confidence_radius;
        bits_ok = bits_ok && r.mean_bits <= comp->budget();
    }
    out.result = {{"compressor", comp->describe()},
                  {"sigma_claim", comp->sigma()},
                  {"budget", comp->budget()},
                  {"hypotheses", per}};
    out.check("lambda_max <= sigma^2 within the confidence radius", variance_ok);
    out.check("mean bits <= budget", bits_ok);
    return out;
}

CommandOutput cover(const RunConfig& c)
{
    const auto file = load_input(c);
    const auto& cls = file.function_class;
    const auto dist = distribution_of(file);
    const NormSpec norm{parse_inner_norm(c.norm)};
    const bool exact_ok = cls.num_hypotheses() <= kExactGuard;

    CommandOutput out;
    out.header = {"eps", "method", "size", "certifies"};
    json rows = json::array();
    bool consistent = true;
    for (const double eps : eps_or(c, {0.5})) {
        std::vector<CoverReportRow> found;
        const auto net = greedy_cover(cls, dist, eps, norm, GreedyRule::farthest_point);
        const auto set = greedy_cover(cls, dist, eps, norm, GreedyRule::set_cover);
        const auto pack = greedy_packing(cls, dist, eps, norm);
        if (exact_ok) {
            const auto ex = exact_cover(cls, dist, eps, norm);
            consistent = consistent && ex.size() <= net.size() && ex.size() <= set.size() &&
                         is_cover(cls, dist, ex, eps, norm);
            found.push_back({eps, ex.size(), ex, "exact", "N(eps) exactly"});
        }
        consistent = consistent && is_cover(cls, dist, net, eps, norm) && is_cover(cls, dist, set, eps, norm);
        found.push_back({eps, net.size(), net, "greedy-net", "upper bound on N(eps)"});
        found.push_back({eps, set.size(), set, "greedy-set-cover", "upper bound on N(eps)"});
        found.push_back({eps, pack.size(), pack, "greedy-packing", "lower bound on N(eps/2)"});
        for (const auto& r : found) {
            rows.push_back(r);
            out.rows.push_back({r.scale, r.method, r.size, r.certifies});
        }
    }
    out.result = {{"num_hypotheses", cls.num_hypotheses()},
                  {"num_points", cls.num_points()},
                  {"dim", cls.dim()},
                  {"covers", rows}};
    out.check("covers are valid and exact <= greedy", consistent);
    return out;
}

CommandOutput vc(const RunConfig& c)
{
    const auto file = load_input(c);
    const std::size_t dim = vc_dimension(file.function_class);
    CommandOutput out;
    out.header = {"eps", "vc", "haussler_bound"};
    json rows = json::array();
    for (const double eps : eps_or(c, {0.1})) {
        const double b = haussler_bound(dim, eps);
        rows.push_back({{"eps", eps}, {"haussler_bound", b}});
        out.rows.push_back({eps, dim, b});
    }
    out.result = {{"vc_dimension", dim}, {"bounds", rows}, {"constant", "up to universal constant"}};
    return out;
}

CommandOutput chain(const RunConfig& c, const RandomStream& rng)
{
    const auto file = load_input(c);
    const auto& cls = file.function_class;
    const auto dist = distribution_of(file);
    const NormSpec norm{parse_inner_norm(c.norm)};
    auto comp = build_chain_compressor(build_cover_chain(cls, dist, norm, cls.num_hypotheses() <= kExactGuard), c.a);
    const auto& spec = comp->spec();
    const double bound = chain_variance_bound(spec.n_max, c.a);
    const std::size_t trials = trials_or(c, 100000);

    CommandOutput out;
    out.header = {"h", "exact_bias", "exact_bits", "exact_lambda", "measured_bias_z", "measured_lambda",
                  "lambda_std_err", "measured_bits", "bits_std_err", "variance_bound"};
    json per = json::array();
    bool unbiased = true;
    bool bits_exact = true;
    bool variance = true;
    bool measured_variance = true;
    bool measured_bits = true;
    for (std::size_t h = 0; h < cls.num_hypotheses(); ++h) {
        const auto ex = exact_chain_moments(*comp, h);
        const auto r = verify_estimator(*comp, cls, dist, h, trials, rng.substream(h), c.workers);
        per.push_back({{"h", h},
                       {"exact", {{"bias_max", ex.bias_max},
                                  {"expected_bits", ex.expected_bits},
                                  {"lambda_max", ex.lambda_max}}},
                       {"measured", r}});
        out.rows.push_back({h, ex.bias_max, ex.expected_bits, ex.lambda_max, r.bias_z_max, r.lambda_max,
                            r.lambda_std_err, r.mean_bits, r.bits_std_err, bound});
        unbiased = unbiased && ex.bias_max <= 1e-12;
        bits_exact = bits_exact && std::abs(ex.expected_bits - spec.expected_bits()) <= 1e-12 * spec.expected_bits();
        variance = variance && ex.lambda_max <= bound;
        measured_variance = measured_variance && r.lambda_max <= bound + r.confidence_radius;
        measured_bits = measured_bits && std::abs(r.mean_bits - spec.expected_bits()) <= 5.0 * r.bits_std_err + 1e-12;
    }
    const double log_size = chain_log_size_constant(spec);
    out.result = {{"compressor", comp->describe()},
                  {"spec", spec},
                  {"variance_bound", bound},
                  {"log_size_constant", log_size},
                  {"bits_envelope", chain_bits_envelope(c.a, log_size)},
                  {"hypotheses", per}};
    out.check("exact bias <= 1e-12", unbiased);
    out.check("exact expected bits equal sum q_n b_n", bits_exact);
    out.check("exact lambda_max <= sum 16 * 2^(-a n / 2)", variance);
    out.check("measured lambda_max within the confidence radius of the bound", measured_variance);
    out.check("measured mean bits within 5 standard errors of the exact value", measured_bits);
    return out;
}

CommandOutput separation(const RunConfig& c, const RandomStream& rng)
{
    const std::size_t trials = trials_or(c, 20000);
    const auto r = verify_separation(c.d, c.alpha, eps_or(c, {0.25, 0.05, 0.01}), trials, rng.substream(0), c.workers);
    const auto curve = sketch_cost_curve({2, 4, 6, 8}, trials, rng.substream(1), c.workers);
    CommandOutput out;
    out.header = {"d", "alpha", "n", "eps", "cover_size", "lower_bound", "exact", "sketch_bits_at_sigma1"};
    for (const auto& row : r.covers) {
        out.rows.push_back({r.d, r.alpha, r.n, row.eps, row.cover_size, row.lower_bound, row.exact,
                            r.cost.bits_at_sigma1});
    }
    out.result = r;
    out.result["cost_curve"] = curve;
    out.check("columns orthonormal within 1e-10", r.checks.orthonormality_defect <= 1e-10);
    out.check("isometry within 1e-10", r.checks.isometry_defect <= 1e-10);
    out.check("members within the sup envelope d/sqrt(n)", r.checks.max_sup_norm <= r.sup_envelope * (1 + 1e-12));
    return out;
}

CommandOutput repbound(const RunConfig& c, const RandomStream& rng)
{
    constexpr std::size_t kPoints = 64;
    const auto cls = threshold_class(kPoints);
    const auto joint = noisy_threshold_joint(kPoints, kPoints / 2, 0.1);
    const auto loss = LossSpec::absolute_clipped(1.0);
    const auto dist = EmpiricalDistribution::uniform(kPoints);
    const auto comp = build_chain_compressor(build_cover_chain(cls, dist, NormSpec{InnerNorm::euclidean}, false), c.a);
    const double n = comp->spec().expected_bits();
    const std::size_t trials = trials_or(c, 10000);
    const std::vector<std::size_t> ms = c.m.empty() ? std::vector<std::size_t>{25, 50, 100, 200} : c.m;

    CommandOutput out;
    out.header = {"m", "bound", "measured_rep", "std_err"};
    json rows = json::array();
    bool gap = true;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const auto est = rep_estimate(cls, joint, loss, ms[i], trials, rng.substream(i), c.workers);
        const RepBoundRow row{ms[i], cover_to_rep_bound(n, ms[i], loss.lipschitz(), loss.bound), est.mean_rep,
                              est.std_err};
        rows.push_back(row);
        out.rows.push_back({row.m, row.bound, row.measured_rep, row.std_err});
        gap = gap && std::isfinite(row.bound) && row.bound > row.measured_rep;
    }
    out.result = {{"class", "thresholds on 64 points, label noise 0.1"},
                  {"loss", to_string(loss.kind)},
                  {"chain_bits", n},
                  {"constant", "up to universal constant"},
                  {"rows", rows}};
    out.check("bound finite and above the measured representativeness", gap);
    return out;
}

json config_json(const RunConfig& c)
{
    json j = {{"command", c.command}, {"seed", c.seed},   {"trials", c.trials}, {"format", c.format},
              {"d", c.d},             {"alpha", c.alpha}, {"eps", c.eps},       {"a", c.a},
              {"k", c.k},             {"M", c.M},         {"m", c.m},           {"sigma", c.sigma},
              {"norm", c.norm}};
    j["input"] = c.input_path ? json(*c.input_path) : json(nullptr);
    return j;
}

std::string csv_cell(const json& v)
{
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) {
            return s;
        }
        std::string quoted = "\"";
        for (const char ch : s) {
            quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        }
        return quoted + "\"";
    }
    return v.dump();
}

} // namespace

Report render_report(const RunConfig& c)
{
    if (c.format != "json" && c.format != "csv") {
        throw RangeError("unknown format '" + c.format + "'");
    }
    const RandomStream rng(c.seed);
    CommandOutput out;
    if (c.command == "sketch-verify") {
        out = sketch_verify(c, rng);
    } else if (c.command == "ball") {
        out = ball(c, rng);
    } else if (c.command == "cover") {
        out = cover(c);
    } else if (c.command == "vc") {
        out = vc(c);
    } else if (c.command == "chain") {
        out = chain(c, rng);
    } else if (c.command == "separation") {
        out = separation(c, rng);
    } else if (c.command == "repbound") {
        out = repbound(c, rng);
    } else {
        throw RangeError("unknown command '" + c.command + "'");
    }

    Report report;
    json checks = json::array();
    for (const auto& [name, passed] : out.checks) {
        checks.push_back({{"name", name}, {"passed", passed}});
        if (!passed) {
            report.failed_checks.push_back(name);
        }
    }
    std::ostringstream text;
    if (c.format == "json") {
        const json doc = {{"command", c.command}, {"config", config_json(c)}, {"checks", checks}, {"result", out.result}};
        text << doc.dump(2) << '\n';
    } else {
        text << "# command: " << c.command << '\n';
        text << "# config: " << config_json(c).dump() << '\n';
        for (const auto& [name, passed] : out.checks) {
            text << "# check: " << name << ": " << (passed ? "pass" : "FAIL") << '\n';
        }
        for (std::size_t i = 0; i < out.header.size(); ++i) {
            text << (i ? "," : "") << out.header[i];
        }
        text << '\n';
        for (const auto& row : out.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                text << (i ? "," : "") << csv_cell(row[i]);
            }
            text << '\n';
        }
    }
    report.text = text.str();
    return report;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    Report report;
    try {
        report = render_report(config);
    } catch (const InvariantError& e) {
        err << "adlkit " << config.command << ": invariant violated: " << e.what() << '\n';
        return kExitAssertion;
    } catch (const DecodeError& e) {
        err << "adlkit " << config.command << ": decode failure: " << e.what() << '\n';
        return kExitAssertion;
    } catch (const std::exception& e) {
        err << "adlkit " << config.command << ": " << e.what() << '\n';
        return kExitUsage;
    }
    if (config.output_path) {
        std::ofstream file(*config.output_path, std::ios::binary);
        if (!file || !(file << report.text)) {
            err << "adlkit: cannot write " << *config.output_path << '\n';
            return kExitUsage;
        }
    } else {
        out << report.text;
    }
    for (const auto& name : report.failed_checks) {
        err << "adlkit " << config.command << ": check failed: " << name << '\n';
    }
    return report.failed_checks.empty() ? kExitOk : kExitAssertion;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Approximate description length toolkit"};
    app.require_subcommand(1);
    RunConfig c;

    struct Command {
        const char* name;
        const char* help;
        std::vector<std::string> params;
    };
    const std::vector<Command> commands = {
        {"sketch-verify", "Monte Carlo check of the random k-sketch of a random vector", {"d", "k", "M"}},
        {"ball", "Ball compressor: measured variance and bits against its claims", {"d", "M", "sigma"}},
        {"cover", "Exact and greedy covers and packings of a class file", {"eps", "norm"}},
        {"vc", "VC dimension of a binary class file", {"eps"}},
        {"chain", "Cover-chain compressor: exact and measured moments", {"a", "norm"}},
        {"separation", "Hadamard-embedded cube: covers and sketch cost", {"d", "alpha", "eps"}},
        {"repbound", "Representativeness of thresholds against the cover bound", {"a", "m"}},
    };
    std::vector<CLI::Option*> seed_options;
    for (const auto& cmd : commands) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->callback([&c, name = std::string(cmd.name)] { c.command = name; });
        seed_options.push_back(sub->add_option("--seed", c.seed, "Root seed (falls back to ADLKIT_SEED)"));
        sub->add_option("--trials", c.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
        sub->add_option("--input", c.input_path, "Class file (JSON)");
        sub->add_option("--output", c.output_path, "Report path (stdout when absent)");
        sub->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--workers", c.workers, "Worker threads (0 = all cores)");
        for (const auto& p : cmd.params) {
            if (p == "d") {
                sub->add_option("--d", c.d, "Dimension")->check(CLI::PositiveNumber);
            } else if (p == "k") {
                sub->add_option("--k", c.k, "Sketch copies")->check(CLI::PositiveNumber);
            } else if (p == "M") {
                sub->add_option("--M", c.M, "Norm bound")->check(CLI::NonNegativeNumber);
            } else if (p == "sigma") {
                sub->add_option("--sigma", c.sigma, "Target sigma")->check(CLI::PositiveNumber);
            } else if (p == "eps") {
                sub->add_option("--eps", c.eps, "Scales, comma separated")->delimiter(',');
            } else if (p == "norm") {
                sub->add_option("--norm", c.norm, "Inner norm")->check(CLI::IsMember({"sup", "euclidean"}));
            } else if (p == "a") {
                sub->add_option("--a", c.a, "Chain exponent in (0, 1]");
            } else if (p == "alpha") {
                sub->add_option("--alpha", c.alpha, "Cover exponent in (0, 1]");
            } else if (p == "m") {
                sub->add_option("--m", c.m, "Sample sizes, comma separated")->delimiter(',');
            }
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    const bool seed_given =
        std::any_of(seed_options.begin(), seed_options.end(), [](const CLI::Option* o) { return o->count() > 0; });
    if (!seed_given) {
        if (const char* env = std::getenv("ADLKIT_SEED")) {
            try {
                std::size_t used = 0;
                c.seed = std::stoull(env, &used);
                if (used != std::string_view(env).size()) {
                    throw std::invalid_argument("trailing characters");
                }
            } catch (const std::exception&) {
                err << "adlkit: ADLKIT_SEED is not a 64-bit unsigned integer\n";
                return kExitUsage;
            }
        }
    }
    return run(c, out, err);
}

} // namespace adlkit::cli
