#include "adlkit/class_io.hpp"
#include "adlkit/cli.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

using namespace adlkit;
using nlohmann::json;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "adlkit");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string small_class_file()
{
    const auto path = std::filesystem::temp_directory_path() / "adlkit_cli_test_class.json";
    // Four points on a line, one point of dim 1.
    save_class(path, FiniteFunctionClass(4, 1, 1, {0.0, 0.3, 0.6, 1.0}));
    return path.string();
}

std::string binary_class_file()
{
    const auto path = std::filesystem::temp_directory_path() / "adlkit_cli_test_binary.json";
    // All four labelings of two points.
    save_class(path, FiniteFunctionClass(4, 2, 1, {0, 0, 0, 1, 1, 0, 1, 1}));
    return path.string();
}

} // namespace

TEST_CASE("usage errors exit 1")
{
    CHECK(invoke({}).code == cli::kExitUsage);
    CHECK(invoke({"nonsense"}).code == cli::kExitUsage);
    CHECK(invoke({"chain", "--bogus"}).code == cli::kExitUsage);
    CHECK(invoke({"cover"}).code == cli::kExitUsage);
    CHECK(invoke({"cover", "--input", "/nonexistent/class.json"}).code == cli::kExitUsage);
    CHECK(invoke({"sketch-verify", "--format", "xml"}).code == cli::kExitUsage);
    CHECK(invoke({"separation", "--d", "4", "--alpha", "2"}).code == cli::kExitUsage);
    CHECK(invoke({"--help"}).code == cli::kExitOk);
}

TEST_CASE("the JSON report carries the command, config and checks")
{
    const auto r = invoke({"sketch-verify", "--seed", "7", "--trials", "2000", "--d", "3"});
    REQUIRE(r.code == cli::kExitOk);
    const auto doc = json::parse(r.out);
    CHECK(doc["command"] == "sketch-verify");
    CHECK(doc["config"]["seed"] == 7);
    CHECK(doc["config"]["d"] == 3);
    CHECK_FALSE(doc["config"].contains("workers"));
    for (const auto& c : doc["checks"]) {
        CHECK(c["passed"] == true);
    }
}

TEST_CASE("ADLKIT_SEED is the fallback seed")
{
    ::setenv("ADLKIT_SEED", "99", 1);
    const auto r = invoke({"ball", "--trials", "1000", "--d", "2"});
    CHECK(r.code == cli::kExitOk);
    CHECK(json::parse(r.out)["config"]["seed"] == 99);
    const auto flag = invoke({"ball", "--trials", "1000", "--d", "2", "--seed", "5"});
    CHECK(json::parse(flag.out)["config"]["seed"] == 5);
    ::setenv("ADLKIT_SEED", "12x", 1);
    CHECK(invoke({"ball", "--trials", "1000", "--d", "2"}).code == cli::kExitUsage);
    ::unsetenv("ADLKIT_SEED");
}

TEST_CASE("separation CSV lists the cover sizes")
{
    const auto r = invoke({"separation", "--d", "4", "--trials", "2000", "--format", "csv"});
    REQUIRE(r.code == cli::kExitOk);
    std::istringstream lines(r.out);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line)) {
        if (!line.empty() && line[0] != '#') {
            rows.push_back(line);
        }
    }
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "d,alpha,n,eps,cover_size,lower_bound,exact,sketch_bits_at_sigma1");
    const std::vector<std::string> sizes = {"1", "16", "16"};
    for (std::size_t i = 0; i < 3; ++i) {
        std::vector<std::string> cells;
        std::istringstream cs(rows[i + 1]);
        std::string cell;
        while (std::getline(cs, cell, ',')) {
            cells.push_back(cell);
        }
        REQUIRE(cells.size() == 8);
        CHECK(cells[2] == "256");
        CHECK(cells[4] == sizes[i]);
    }
}

TEST_CASE("reports do not depend on workers and land in --output")
{
    const auto path = (std::filesystem::temp_directory_path() / "adlkit_cli_test_report.json").string();
    const auto a = invoke({"chain", "--input", small_class_file(), "--seed", "3", "--trials", "2000", "--workers", "1"});
    const auto b = invoke({"chain", "--input", small_class_file(), "--seed", "3", "--trials", "2000", "--workers", "4", "--output", path});
    REQUIRE(a.code == cli::kExitOk);
    REQUIRE(b.code == cli::kExitOk);
    CHECK(b.out.empty());
    std::ifstream in(path, std::ios::binary);
    const std::string written((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(written == a.out);
    const auto other = invoke({"chain", "--input", small_class_file(), "--seed", "4", "--trials", "2000"});
    CHECK(other.out != a.out);
}

TEST_CASE("every command runs with small budgets")
{
    const auto input = small_class_file();
    const auto binary = binary_class_file();
    const std::vector<std::vector<std::string>> cases = {
        {"sketch-verify", "--trials", "2000"},
        {"ball", "--trials", "1000"},
        {"cover", "--input", input, "--eps", "0.2,0.5"},
        {"vc", "--input", binary},
        {"chain", "--input", input, "--trials", "2000", "--a", "1"},
        {"separation", "--d", "2", "--trials", "2000"},
        {"repbound", "--trials", "500", "--m", "10,20"},
    };
    for (const auto& args : cases) {
        CAPTURE(args[0]);
        const auto r = invoke(args);
        CHECK(r.code == cli::kExitOk);
        CHECK(r.err.empty());
        const auto doc = json::parse(r.out);
        CHECK(doc["command"] == args[0]);
        CHECK(doc.contains("result"));
    }
    CHECK(json::parse(invoke({"vc", "--input", binary}).out)["result"]["vc_dimension"] == 2);
    CHECK(invoke({"vc", "--input", input}).code == cli::kExitAssertion);
}
