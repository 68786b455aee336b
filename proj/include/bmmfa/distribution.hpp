#pragma once

// Value distributions over [0,1]. Means are analytic, never estimated.

#include <cmath>
#include <string>

#include "bmmfa/errors.hpp"
#include "bmmfa/rng.hpp"

namespace bmmfa {

enum class DistKind { bernoulli, beta, point };

struct DistributionSpec {
  DistKind kind = DistKind::point;
  double a = 0.0;  // bernoulli: p, beta: alpha, point: v
  double b = 0.0;  // beta: beta (unused otherwise)

  static DistributionSpec bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw input_error("bernoulli p must be in [0,1]");
    return {DistKind::bernoulli, p, 0.0};
  }
  static DistributionSpec beta(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw input_error("beta parameters must be positive");
    return {DistKind::beta, alpha, beta};
  }
  static DistributionSpec point(double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw input_error("point value must be in [0,1]");
    return {DistKind::point, v, 0.0};
  }

  [[nodiscard]] double mean() const {
    switch (kind) {
      case DistKind::bernoulli: return a;
      case DistKind::beta: return a / (a + b);
      case DistKind::point: return a;
    }
    return 0.0;
  }

  [[nodiscard]] double sample(CounterRng& rng) const {
    switch (kind) {
      case DistKind::bernoulli: return rng.next_unit() < a ? 1.0 : 0.0;
      case DistKind::point: return a;
      case DistKind::beta: {
        const double x = sample_gamma(rng, a);
        const double y = sample_gamma(rng, b);
        double v = x / (x + y);
        if (v < 0.0) v = 0.0;
        if (v > 1.0) v = 1.0;
        return v;
      }
    }
    return 0.0;
  }

  bool operator==(const DistributionSpec&) const = default;

 private:
  // Marsaglia-Tsang; the shape<1 case is boosted through shape+1. We sample
  // gammas ourselves rather than via std::gamma_distribution because the
  // standard leaves the algorithm unspecified and runs must replay bit-for-bit
  // across standard libraries.
  static double sample_gamma(CounterRng& rng, double shape) {
    if (shape < 1.0) {
      const double u = rng.next_unit_open();
      return sample_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      const double x = rng.next_normal();
      const double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      const double v = t * t * t;
      const double u = rng.next_unit_open();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
  }
};

inline std::string to_string(DistKind k) {
  switch (k) {
    case DistKind::bernoulli: return "bernoulli";
    case DistKind::beta: return "beta";
    case DistKind::point: return "point";
  }
  return "?";
}

}  // namespace bmmfa
