#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace singlab {

using Index = std::int32_t;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct SinglabError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

[[noreturn]] inline void fail(const std::string& msg) { throw SinglabError(msg); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

// Euclidean helpers on ambient coordinate tuples.
inline double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
    require(a.size() == b.size(), "coordinate dimension mismatch");
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double dist(const std::vector<double>& a, const std::vector<double>& b) {
    return std::sqrt(sqdist(a, b));
}

inline double norm(const std::vector<double>& a) {
    double s = 0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

// Deterministic RNG stream; all sampling in the library goes through this.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // uniform in [0, n)
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng_);
    }

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(eng_);
    }

    // k distinct indices from [0, n), in draw order
    std::vector<std::size_t> distinct(std::size_t n, std::size_t k) {
        require(k <= n, "cannot draw more distinct samples than population");
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        std::vector<std::size_t> out;
        out.reserve(k);
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + index(n - i);
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
        return out;
    }

  private:
    std::mt19937_64 eng_;
};

inline bool approx_eq(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline double rel_err(double measured, double expected) {
    const double scale = std::max(std::abs(expected), 1e-300);
    return std::abs(measured - expected) / scale;
}

}  // namespace singlab
