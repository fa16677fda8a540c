// Deterministic random source. std::mt19937_64 is fully specified by the
// standard; the distributions are hand-rolled so that a given seed produces
// the same stream on every platform and standard library.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "mospc/common.hpp"

namespace mospc {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) {
      throw Error("Rng::below: n must be positive");
    }
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  // Box-Muller, cosine branch only; log argument kept in (0, 1].
  double gaussian(double mean, double sd) {
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + sd * z;
  }

  // Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 boosted through shape + 1.
  double gamma(double shape) {
    if (!(shape > 0.0)) {
      throw Error("Rng::gamma: shape must be positive");
    }
    if (shape < 1.0) {
      const double u = 1.0 - uniform01();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
      double x = gaussian(0.0, 1.0);
      double v = 1.0 + c * x;
      if (v <= 0.0) {
        continue;
      }
      v = v * v * v;
      const double u = 1.0 - uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) {
        return d * v;
      }
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
        return d * v;
      }
    }
  }

  double beta(double a, double b) {
    const double g1 = gamma(a);
    const double g2 = gamma(b);
    const double sum = g1 + g2;
    if (sum <= 0.0) {
      return 0.5;
    }
    return g1 / sum;
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mospc
