#include "adlkit/class_io.hpp"

#include "adlkit/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace adlkit {

namespace {

using nlohmann::json;

// Rewrites the bare tokens NaN, Infinity and -Infinity (as emitted by
// Python's json module) to null, leaving string literals untouched, so the
// strict JSON parser accepts the file and validation can report the entry.
std::string normalize_nonfinite_tokens(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            out.push_back(c);
            if (c == '\\' && i + 1 < text.size()) {
                out.push_back(text[++i]);
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
            out.push_back(c);
            continue;
        }
        bool replaced = false;
        for (std::string_view token : {"-Infinity", "Infinity", "NaN"}) {
            const std::size_t end = i + token.size();
            if (text.substr(i, token.size()) == token &&
                (end == text.size() || !std::isalnum(static_cast<unsigned char>(text[end])))) {
                out += "null";
                i = end - 1;
                replaced = true;
                break;
            }
        }
        if (!replaced) {
            out.push_back(c);
        }
    }
    return out;
}

std::size_t read_extent(const json& doc, const char* key)
{
    if (!doc.contains(key)) {
        throw ParseError(std::string("class file: missing field \"") + key + "\"");
    }
    const json& v = doc.at(key);
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
        throw InvariantError(std::string("class file: \"") + key + "\" must be a positive integer");
    }
    return v.get<std::size_t>();
}

double read_number(const json& v, const std::string& where)
{
    if (v.is_null()) {
        throw InvariantError("class file: non-finite value at " + where);
    }
    if (!v.is_number()) {
        throw ParseError("class file: expected a number at " + where);
    }
    return v.get<double>();
}

const json& expect_array(const json& v, std::size_t extent, const std::string& where)
{
    if (!v.is_array()) {
        throw ParseError("class file: expected an array at " + where);
    }
    if (v.size() != extent) {
        throw InvariantError("class file: extent mismatch at " + where + ": expected " + std::to_string(extent) +
                             ", got " + std::to_string(v.size()));
    }
    return v;
}

std::string index_path(std::initializer_list<std::size_t> idx)
{
    std::string s = "values";
    for (std::size_t i : idx) {
        s += "[" + std::to_string(i) + "]";
    }
    return s;
}

} // namespace

ClassFile parse_class_file(std::string_view json_text)
{
    json doc;
    try {
        doc = json::parse(normalize_nonfinite_tokens(json_text));
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("class file: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("class file: top level must be an object");
    }
    static const std::array<std::string_view, 6> known{"num_hypotheses", "num_points", "dim",
                                                       "values",         "weights",    "point_ids"};
    for (const auto& item : doc.items()) {
        if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
            throw ParseError("class file: unknown field \"" + item.key() + "\"");
        }
    }
    const std::size_t H = read_extent(doc, "num_hypotheses");
    const std::size_t m = read_extent(doc, "num_points");
    const std::size_t d = read_extent(doc, "dim");
    if (!doc.contains("values")) {
        throw ParseError("class file: missing field \"values\"");
    }
    const json& values = expect_array(doc.at("values"), H, "values");
    std::vector<double> flat;
    flat.reserve(H * m * d);
    for (std::size_t h = 0; h < H; ++h) {
        const json& points = expect_array(values[h], m, index_path({h}));
        for (std::size_t j = 0; j < m; ++j) {
            const json& coords = expect_array(points[j], d, index_path({h, j}));
            for (std::size_t c = 0; c < d; ++c) {
                const double x = read_number(coords[c], index_path({h, j, c}));
                if (!std::isfinite(x)) {
                    throw InvariantError("class file: non-finite value at " + index_path({h, j, c}));
                }
                flat.push_back(x);
            }
        }
    }
    std::vector<std::string> ids;
    if (doc.contains("point_ids")) {
        const json& p = expect_array(doc.at("point_ids"), m, "point_ids");
        for (const auto& id : p) {
            if (!id.is_string()) {
                throw ParseError("class file: point_ids must be strings");
            }
            ids.push_back(id.get<std::string>());
        }
    }
    ClassFile out{FiniteFunctionClass(H, m, d, std::move(flat), std::move(ids)), std::nullopt};
    if (doc.contains("weights")) {
        const json& w = expect_array(doc.at("weights"), m, "weights");
        std::vector<double> weights;
        for (std::size_t j = 0; j < m; ++j) {
            weights.push_back(read_number(w[j], "weights[" + std::to_string(j) + "]"));
        }
        out.distribution.emplace(std::move(weights));
    }
    return out;
}

ClassFile read_class_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("class file: cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_class_file(buf.str());
}

FiniteFunctionClass load_class(const std::filesystem::path& path)
{
    return read_class_file(path).function_class;
}

std::string format_class_file(const FiniteFunctionClass& cls, const std::optional<EmpiricalDistribution>& dist)
{
    json doc;
    doc["num_hypotheses"] = cls.num_hypotheses();
    doc["num_points"] = cls.num_points();
    doc["dim"] = cls.dim();
    json values = json::array();
    for (std::size_t h = 0; h < cls.num_hypotheses(); ++h) {
        json points = json::array();
        for (std::size_t j = 0; j < cls.num_points(); ++j) {
            const auto row = cls.point_values(h, j);
            points.push_back(json(std::vector<double>(row.begin(), row.end())));
        }
        values.push_back(std::move(points));
    }
    doc["values"] = std::move(values);
    if (!cls.point_ids().empty()) {
        doc["point_ids"] = cls.point_ids();
    }
    if (dist) {
        dist->check_compatible(cls);
        doc["weights"] = std::vector<double>(dist->weights().begin(), dist->weights().end());
    }
    return doc.dump() + "\n";
}

void save_class(const std::filesystem::path& path, const FiniteFunctionClass& cls,
                const std::optional<EmpiricalDistribution>& dist)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ParseError("class file: cannot write " + path.string());
    }
    out << format_class_file(cls, dist);
}

} // namespace adlkit
