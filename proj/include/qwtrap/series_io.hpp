#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "qwtrap/ensemble.hpp"

namespace qwtrap {

// Shortest round-trip decimal form; locale independent by construction.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::runtime_error("not a number: '" + s + "'");
    return v;
}

// Survival curve schema shared by both engines: header `t,mean,stderr`, one
// row per step starting at t = 0, LF line endings.
inline std::string survival_csv(const SurvivalSeries& s) {
    std::string out = "t,mean,stderr\n";
    for (std::size_t t = 0; t < s.mean.size(); ++t) {
        out += std::to_string(t);
        out += ',';
        out += format_double(s.mean[t]);
        out += ',';
        out += format_double(s.std_error[t]);
        out += '\n';
    }
    return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

struct Curve {
    std::vector<double> mean;
    std::vector<double> std_error;
};

// Reads a survival CSV back; rows must be contiguous from t = 0.
inline Curve read_survival_csv(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path.string());
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("empty file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,mean,stderr")
        throw std::runtime_error(path.string() + ": expected header 't,mean,stderr', got '" + line + "'");
    Curve c;
    std::size_t expect_t = 0;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
        const auto t = static_cast<std::size_t>(parse_double(line.substr(0, c1)));
        if (t != expect_t)
            throw std::runtime_error(path.string() + ": rows must be contiguous from t=0, got t=" +
                                     std::to_string(t));
        c.mean.push_back(parse_double(line.substr(c1 + 1, c2 - c1 - 1)));
        c.std_error.push_back(parse_double(line.substr(c2 + 1)));
        ++expect_t;
    }
    if (c.mean.empty()) throw std::runtime_error(path.string() + ": no data rows");
    return c;
}

} // namespace qwtrap
