#pragma once

#include "adlkit/function_class.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace adlkit {

// Contents of a class file: the class and, when the file has a "weights"
// array, the paired distribution over its points.
struct ClassFile {
    FiniteFunctionClass function_class;
    std::optional<EmpiricalDistribution> distribution;
};

// Class-file format (UTF-8 JSON):
//   {"num_hypotheses": H, "num_points": m, "dim": d,
//    "values": [[[v, ...] x m] x H], "weights": [...], "point_ids": [...]}
// "weights" and "point_ids" are optional. Non-finite entries (written as
// null, NaN or Infinity) are rejected with their index.
ClassFile parse_class_file(std::string_view json_text);
ClassFile read_class_file(const std::filesystem::path& path);
FiniteFunctionClass load_class(const std::filesystem::path& path);

std::string format_class_file(const FiniteFunctionClass& cls,
                              const std::optional<EmpiricalDistribution>& dist = std::nullopt);
void save_class(const std::filesystem::path& path, const FiniteFunctionClass& cls,
                const std::optional<EmpiricalDistribution>& dist = std::nullopt);

} // namespace adlkit
