#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Dataset files. Two encodings: plain text with one value per line
// (decimal or hex-float, '#' starts a comment), and a raw format that is
// an 8-byte magic followed by little-endian 64-bit floats. load_dataset
// sniffs the magic and picks the right reader.

namespace rsum {

inline constexpr char raw_magic[8] = {'R', 'S', 'U', 'M', 'F', '6', '4', '\0'};

namespace detail {

inline std::uint64_t to_little_endian(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xff) << (8 * (7 - i));
        return r;
    }
    return v;
}

// shortest decimal string that parses back to the same bits
inline std::string shortest(double x) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, p);
}

inline std::string hexfloat(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

// strict strtod wrapper: the whole token must be consumed
inline double parse_double(const std::string& tok, const char* what) {
    const char* s = tok.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(s, &end);
    if (end == s || *end != '\0')
        throw std::runtime_error(std::string(what) + ": bad float '" + tok + "'");
    return v;
}

}  // namespace detail

inline void write_text(const std::string& path, std::span<const double> data) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    for (double x : data) f << detail::shortest(x) << '\n';
    if (!f) throw std::runtime_error("write failed: " + path);
}

inline void write_raw(const std::string& path, std::span<const double> data) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(raw_magic, sizeof raw_magic);
    for (double x : data) {
        std::uint64_t bits = detail::to_little_endian(std::bit_cast<std::uint64_t>(x));
        f.write(reinterpret_cast<const char*>(&bits), 8);
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

inline std::vector<double> read_text(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t\r");
        std::string tok = line.substr(b, e - b + 1);
        try {
            out.push_back(detail::parse_double(tok, "read_text"));
        } catch (const std::runtime_error&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": not a float: '" + tok + "'");
        }
    }
    return out;
}

inline std::vector<double> read_raw(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    char magic[8];
    if (!f.read(magic, 8) || std::memcmp(magic, raw_magic, 8) != 0)
        throw std::runtime_error("not a raw dataset (bad magic): " + path);
    std::vector<double> out;
    std::uint64_t bits;
    while (f.read(reinterpret_cast<char*>(&bits), 8))
        out.push_back(std::bit_cast<double>(detail::to_little_endian(bits)));
    if (f.gcount() != 0)
        throw std::runtime_error("truncated raw dataset: " + path);
    return out;
}

inline std::vector<double> load_dataset(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw std::runtime_error("cannot open: " + path);
    char magic[8] = {};
    probe.read(magic, 8);
    bool raw = probe.gcount() == 8 && std::memcmp(magic, raw_magic, 8) == 0;
    probe.close();
    return raw ? read_raw(path) : read_text(path);
}

}  // namespace rsum
