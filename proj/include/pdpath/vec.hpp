#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdpath {

using Vec = std::vector<double>;

inline double dot(const Vec& x, const Vec& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("dot: size mismatch " + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

inline double norm_inf(const Vec& x) {
  double m = 0.0;
  for (double xi : x) m = std::max(m, std::abs(xi));
  return m;
}

inline bool all_finite(const Vec& x) {
  for (double xi : x)
    if (!std::isfinite(xi)) return false;
  return true;
}

inline Vec zeros(std::size_t n) { return Vec(n, 0.0); }

/// Deterministic standard-normal vector (mt19937_64 + Box-Muller; the
/// distribution is pinned explicitly because std::normal_distribution is
/// implementation-defined and would break cross-platform reproducibility).
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

  double uniform01() {
    // 53-bit mantissa uniform in [0, 1)
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  Vec normal_vec(std::size_t n) {
    Vec out(n);
    for (auto& x : out) x = normal();
    return out;
  }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pdpath
