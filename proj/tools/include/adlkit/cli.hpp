#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace adlkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAssertion = 2;

struct RunConfig {
    std::string command;
    std::uint64_t seed = 1;
    std::size_t trials = 0;               // 0 = command default
    std::optional<std::string> input_path;
    std::optional<std::string> output_path;  // stdout when absent
    std::string format = "json";
    unsigned workers = 0;                 // 0 = all cores; never changes results

    std::size_t d = 8;
    double alpha = 1.0;
    std::vector<double> eps;
    double a = 0.5;
    std::size_t k = 1;
    double M = 1.0;                       // radius / norm bound
    std::vector<std::size_t> m;
    double sigma = 1.0;
    std::string norm = "sup";
};

// Dispatches one command and writes its report to config.output_path (or
// out). Diagnostics go to err. Returns kExitOk, kExitAssertion when a
// checked property fails, or kExitUsage on bad parameters or input.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv (argv[0] is the program name) into a RunConfig and runs it.
// ADLKIT_SEED supplies the seed when --seed is absent.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct Report {
    std::string text;
    std::vector<std::string> failed_checks;
};

// The report run() would write, without writing it. Throws the library's
// exceptions on bad input or a violated invariant.
Report render_report(const RunConfig& config);

} // namespace adlkit::cli
