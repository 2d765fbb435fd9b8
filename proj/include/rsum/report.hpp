#pragma once

#include <bit>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rsum/io.hpp"

// Result rows for benchmark runs, with CSV and JSON encodings. Floats are
// emitted twice: shortest round-trip decimal for reading, hex-float for
// exactness; parsers reconstruct from the hex column, so a parsed report
// matches the emitted one bit for bit.

namespace rsum {

struct report_row {
    std::string algorithm;
    std::string series;  // series name or dataset path
    std::uint64_t n = 0;
    std::string precision;  // "single" | "double"
    std::string order;      // "forward" | "reverse" | "shuffled:<seed>"
    double result = 0.0;
    double oracle_result = 0.0;
    double relative_error = 0.0;
    std::uint64_t wall_time_ns = 0;
    int max_recursion_level = -1;  // -1: algorithm keeps no histogram
    std::vector<std::uint64_t> histogram;
    bool overflow = false;
    bool saw_nan = false;
};

inline bool bits_equal(const report_row& a, const report_row& b) {
    auto db = [](double x) { return std::bit_cast<std::uint64_t>(x); };
    return a.algorithm == b.algorithm && a.series == b.series && a.n == b.n &&
           a.precision == b.precision && a.order == b.order &&
           db(a.result) == db(b.result) &&
           db(a.oracle_result) == db(b.oracle_result) &&
           db(a.relative_error) == db(b.relative_error) &&
           a.wall_time_ns == b.wall_time_ns &&
           a.max_recursion_level == b.max_recursion_level &&
           a.histogram == b.histogram && a.overflow == b.overflow &&
           a.saw_nan == b.saw_nan;
}

namespace detail {

inline std::string join_histogram(const std::vector<std::uint64_t>& h) {
    std::string s;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (i) s += ';';
        s += std::to_string(h[i]);
    }
    return s;
}

inline std::vector<std::uint64_t> split_histogram(const std::string& s) {
    std::vector<std::uint64_t> h;
    if (s.empty()) return h;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t next = s.find(';', pos);
        std::string tok = s.substr(pos, next == std::string::npos ? next : next - pos);
        h.push_back(std::stoull(tok));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return h;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    for (;;) {
        std::size_t next = line.find(',', pos);
        if (next == std::string::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
}

inline constexpr const char* csv_header =
    "algorithm,series,n,precision,order,result,result_hex,oracle_result,"
    "oracle_result_hex,relative_error,relative_error_hex,wall_time_ns,"
    "max_recursion_level,overflow,saw_nan,histogram";

}  // namespace detail

inline std::string to_csv(const std::vector<report_row>& rows) {
    std::ostringstream out;
    out << detail::csv_header << '\n';
    for (const auto& r : rows) {
        out << r.algorithm << ',' << r.series << ',' << r.n << ',' << r.precision
            << ',' << r.order << ',' << detail::shortest(r.result) << ','
            << detail::hexfloat(r.result) << ',' << detail::shortest(r.oracle_result)
            << ',' << detail::hexfloat(r.oracle_result) << ','
            << detail::shortest(r.relative_error) << ','
            << detail::hexfloat(r.relative_error) << ',' << r.wall_time_ns << ','
            << r.max_recursion_level << ',' << int(r.overflow) << ','
            << int(r.saw_nan) << ',' << detail::join_histogram(r.histogram) << '\n';
    }
    return out.str();
}

inline std::vector<report_row> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != detail::csv_header)
        throw std::runtime_error("parse_csv: missing or unexpected header");
    std::vector<report_row> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = detail::split_csv_line(line);
        if (f.size() != 16)
            throw std::runtime_error("parse_csv: wrong field count in row");
        report_row r;
        r.algorithm = f[0];
        r.series = f[1];
        r.n = std::stoull(f[2]);
        r.precision = f[3];
        r.order = f[4];
        r.result = detail::parse_double(f[6], "parse_csv");
        r.oracle_result = detail::parse_double(f[8], "parse_csv");
        r.relative_error = detail::parse_double(f[10], "parse_csv");
        r.wall_time_ns = std::stoull(f[11]);
        r.max_recursion_level = std::stoi(f[12]);
        r.overflow = f[13] == "1";
        r.saw_nan = f[14] == "1";
        r.histogram = detail::split_histogram(f[15]);
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::string to_json(const std::vector<report_row>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j;
        j["algorithm"] = r.algorithm;
        j["series"] = r.series;
        j["n"] = r.n;
        j["precision"] = r.precision;
        j["order"] = r.order;
        j["result"] = detail::shortest(r.result);
        j["result_hex"] = detail::hexfloat(r.result);
        j["oracle_result"] = detail::shortest(r.oracle_result);
        j["oracle_result_hex"] = detail::hexfloat(r.oracle_result);
        j["relative_error"] = detail::shortest(r.relative_error);
        j["relative_error_hex"] = detail::hexfloat(r.relative_error);
        j["wall_time_ns"] = r.wall_time_ns;
        j["max_recursion_level"] = r.max_recursion_level;
        j["overflow"] = r.overflow;
        j["saw_nan"] = r.saw_nan;
        j["histogram"] = r.histogram;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

inline std::vector<report_row> parse_json(const std::string& text) {
    nlohmann::json arr = nlohmann::json::parse(text);
    std::vector<report_row> rows;
    for (const auto& j : arr) {
        report_row r;
        r.algorithm = j.at("algorithm").get<std::string>();
        r.series = j.at("series").get<std::string>();
        r.n = j.at("n").get<std::uint64_t>();
        r.precision = j.at("precision").get<std::string>();
        r.order = j.at("order").get<std::string>();
        r.result = detail::parse_double(j.at("result_hex").get<std::string>(), "parse_json");
        r.oracle_result =
            detail::parse_double(j.at("oracle_result_hex").get<std::string>(), "parse_json");
        r.relative_error =
            detail::parse_double(j.at("relative_error_hex").get<std::string>(), "parse_json");
        r.wall_time_ns = j.at("wall_time_ns").get<std::uint64_t>();
        r.max_recursion_level = j.at("max_recursion_level").get<int>();
        r.overflow = j.at("overflow").get<bool>();
        r.saw_nan = j.at("saw_nan").get<bool>();
        r.histogram = j.at("histogram").get<std::vector<std::uint64_t>>();
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace rsum
