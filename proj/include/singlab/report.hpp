#pragma once

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "singlab/common.hpp"

namespace singlab {

// FNV-1a over the canonical manifest text; identifies the input in reports.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// One experiment's machine-readable outcome: named scalars, pass/fail flags
/// and optional columnar plot data. The CSV serialization is deterministic
/// for a fixed manifest and seed; wall-clock time goes only to the JSON
/// summary.
struct ExperimentResult {
    std::string id;
    std::uint64_t digest = 0;
    std::vector<std::pair<std::string, double>> scalars;
    std::vector<std::pair<std::string, bool>> flags;
    std::vector<std::array<double, 2>> plot_xy;
    std::string plot_kind;
    double runtime_ms = 0;
    std::string error;  // non-empty when the experiment aborted

    void scalar(const std::string& k, double v) { scalars.emplace_back(k, v); }
    void flag(const std::string& k, bool v) { flags.emplace_back(k, v); }

    bool pass() const {
        if (!error.empty()) return false;
        for (const auto& [k, v] : flags) {
            (void)k;
            if (!v) return false;
        }
        return true;
    }
};

inline void write_report_csv(const std::vector<ExperimentResult>& rows, std::ostream& os) {
    os << "experiment,digest,key,value\n";
    for (const auto& r : rows) {
        for (const auto& [k, v] : r.scalars)
            os << r.id << ',' << std::hex << r.digest << std::dec << ',' << k << ','
               << format_double(v) << '\n';
        for (const auto& [k, v] : r.flags)
            os << r.id << ',' << std::hex << r.digest << std::dec << ',' << k << ','
               << (v ? "pass" : "fail") << '\n';
        if (!r.error.empty())
            os << r.id << ',' << std::hex << r.digest << std::dec << ",error," << r.error << '\n';
    }
}

inline void write_plot_columns(const ExperimentResult& r, std::ostream& os) {
    os << "# " << r.plot_kind << "\n";
    for (const auto& [x, y] : r.plot_xy) os << format_double(x) << ' ' << format_double(y) << '\n';
}

}  // namespace singlab
