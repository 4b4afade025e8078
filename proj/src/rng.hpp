// Deterministic random number generation.
//
// All variate transforms are implemented here on top of a single mt19937_64
// stream, rather than through std:: distribution objects, so that a chain
// replays bit-for-bit for a given seed on any standard library.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace oasmix {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform on (0,1): 53-bit mantissa, zero excluded so log(u) is finite.
  double uniform01() {
    for (;;) {
      const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  // Unbiased integer draw from {0, ..., n-1}.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = gen_();
    } while (r >= limit);
    return r % n;
  }

  // Standard normal via the Marsaglia polar method. The second variate of
  // each accepted pair is discarded so the draw count per call is fixed
  // relative to the acceptance stream (no hidden cache state).
  double normal() {
    for (;;) {
      const double u = 2.0 * uniform01() - 1.0;
      const double v = 2.0 * uniform01() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  // Gamma(shape, rate 1) via Marsaglia-Tsang squeeze; shapes below one are
  // boosted through Gamma(shape+1) * U^(1/shape).
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("Rng::gamma: shape must be positive");
    if (shape < 1.0) {
      const double g = gamma(shape + 1.0);
      const double u = uniform01();
      double r = g * std::pow(u, 1.0 / shape);
      return r > 0.0 ? r : 1e-300;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Beta(a, b) as a gamma ratio, clamped into the open unit interval so the
  // stick-breaking recursions never produce exact zeros or ones.
  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    if (x + y <= 0.0) return 0.5;
    double r = x / (x + y);
    if (r < 1e-300) r = 1e-300;
    const double hi = 1.0 - 1e-16;
    if (r > hi) r = hi;
    return r;
  }

  // Uniform random permutation of {0, ..., n-1} (Fisher-Yates).
  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(below(static_cast<std::uint64_t>(i) + 1));
      std::swap(p[i], p[j]);
    }
    return p;
  }

  // Index draw proportional to exp(logw[i]). The maximum is subtracted before
  // exponentiation; the first index whose cumulative mass reaches the uniform
  // threshold wins, so exact ties resolve to the lowest index.
  int categorical_log(const std::vector<double>& logw) {
    if (logw.empty()) throw std::invalid_argument("Rng::categorical_log: empty weights");
    double m = logw[0];
    for (double w : logw) m = std::max(m, w);
    if (!std::isfinite(m)) throw std::invalid_argument("Rng::categorical_log: no finite mass");
    double total = 0.0;
    for (double w : logw) total += std::exp(w - m);
    const double u = uniform01() * total;
    double cum = 0.0;
    for (std::size_t i = 0; i < logw.size(); ++i) {
      cum += std::exp(logw[i] - m);
      if (u <= cum) return static_cast<int>(i);
    }
    return static_cast<int>(logw.size()) - 1;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace oasmix
