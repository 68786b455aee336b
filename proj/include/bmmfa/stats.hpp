#pragma once

// Small statistics helpers for the experiment harness.

#include <cmath>
#include <span>
#include <utility>

#include "bmmfa/errors.hpp"

namespace bmmfa {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw input_error("mean of empty range");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Sample standard deviation (n-1 denominator); 0 for a single point.
inline double stddev(std::span<const double> xs) {
  if (xs.empty()) throw input_error("stddev of empty range");
  if (xs.size() == 1) return 0.0;
  const double mu = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

struct OlsFit {
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;
  double intercept_stderr = 0.0;
  int points = 0;
};

// Ordinary least squares of ln(mean regret) on ln(T). Needs at least three
// points and strictly positive means.
inline OlsFit fit_scaling_exponent(std::span<const std::pair<double, double>> series) {
  const int k = static_cast<int>(series.size());
  if (k < 3) throw input_error("fit_scaling_exponent: need at least 3 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [t, r] : series) {
    if (!(t > 0.0)) throw input_error("fit_scaling_exponent: nonpositive T");
    if (!(r > 0.0)) throw input_error("fit_scaling_exponent: nonpositive mean regret");
    sx += std::log(t);
    sy += std::log(r);
  }
  const double xbar = sx / k, ybar = sy / k;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [t, r] : series) {
    const double dx = std::log(t) - xbar;
    sxx += dx * dx;
    sxy += dx * (std::log(r) - ybar);
  }
  if (!(sxx > 0.0)) throw input_error("fit_scaling_exponent: degenerate T grid");
  OlsFit fit;
  fit.points = k;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double sse = 0.0;
  for (const auto& [t, r] : series) {
    const double resid = std::log(r) - (fit.intercept + fit.slope * std::log(t));
    sse += resid * resid;
  }
  const double s2 = k > 2 ? sse / (k - 2) : 0.0;
  fit.slope_stderr = std::sqrt(s2 / sxx);
  fit.intercept_stderr = std::sqrt(s2 * (1.0 / k + xbar * xbar / sxx));
  return fit;
}

}  // namespace bmmfa
