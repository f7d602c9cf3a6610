#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace logdiff {
namespace csv {

/// Full-precision, locale-independent double formatting (17 significant
/// digits round-trips any IEEE double). Used for every CSV emitter so
/// identical runs produce byte-identical files.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt(int v) { return std::to_string(v); }

inline std::string fmt(const std::string& v) { return v; }

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw std::runtime_error("csv: cannot parse number: '" + s + "'");
    return v;
}

/// Row-oriented writer; collects everything and flushes in one go.
class Writer {
public:
    explicit Writer(std::string header) { buf_ << header << '\n'; }

    template <typename... Ts>
    void row(Ts... vals) {
        bool first = true;
        ((buf_ << (first ? "" : ",") << fmt(vals), first = false), ...);
        buf_ << '\n';
    }

    std::string str() const { return buf_.str(); }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("csv: cannot open for writing: " + path);
        out << buf_.str();
    }

private:
    std::ostringstream buf_;
};

} // namespace csv
} // namespace logdiff
