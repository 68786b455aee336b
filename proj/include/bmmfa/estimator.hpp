#pragma once

// Confidence-bound machinery: per-cell sample counts, empirical means, the
// confidence radius, and clipped upper-confidence values.

#include <cmath>
#include <vector>

#include "bmmfa/core.hpp"

namespace bmmfa {

// Confidence width added to an empirical mean:
//   radius(v, N) = sqrt(c_rad * v / N) + c_rad / N.
// Strictly positive, strictly decreasing in N, nondecreasing in v and c_rad.
inline double radius(double v_hat, long long n_samples, double c_rad) {
  if (n_samples < 1) throw input_error("radius: need at least one sample");
  const double n = static_cast<double>(n_samples);
  return std::sqrt(c_rad * v_hat / n) + c_rad / n;
}

// Default radius constant, 3 * ln(n*m*T) floored at 3.
inline double default_c_rad(int n, int m, long long T) {
  if (n < 1 || m < 1 || T < 1) throw input_error("default_c_rad: n, m, T must be >= 1");
  const double log_prod = std::log(static_cast<double>(n)) + std::log(static_cast<double>(m)) +
                          std::log(static_cast<double>(T));
  return std::max(3.0, 3.0 * log_prod);
}

struct UcbState {
  Grid<long long> counts;
  Grid<double> sums;
  double c_rad = 1.0;
  bool clip = true;  // clamp UCBs to <= 1

  UcbState() = default;
  UcbState(int n, int m, double c_rad_, bool clip_ = true)
      : counts(n, m, 0), sums(n, m, 0.0), c_rad(c_rad_), clip(clip_) {
    if (!(c_rad_ > 0.0)) throw input_error("c_rad must be positive");
  }

  [[nodiscard]] int agents() const { return counts.rows(); }
  [[nodiscard]] int items() const { return counts.cols(); }

  [[nodiscard]] double empirical_mean(int i, int e) const {
    const long long c = counts(i, e);
    if (c < 1) throw precondition_error("empirical_mean: cell has no samples");
    return sums(i, e) / static_cast<double>(c);
  }

  // Fold one round of feedback into the counters. Cells not mentioned are
  // untouched; values must lie in [0,1].
  void observe(const Feedback& fb) {
    for (const auto& [i, e, v] : fb.entries) {
      if (i < 0 || i >= agents() || e < 0 || e >= items())
        throw input_error("feedback entry out of range");
      if (!(v >= 0.0 && v <= 1.0)) throw input_error("feedback value outside [0,1]");
      counts(i, e) += 1;
      sums(i, e) += v;
    }
  }
};

// Copy-and-update variant of UcbState::observe.
inline UcbState update(UcbState state, const Feedback& fb) {
  state.observe(fb);
  return state;
}

// Upper-confidence value for one cell; recomputed on read.
inline double ucb_value(const UcbState& state, int i, int e) {
  const double v_hat = state.empirical_mean(i, e);
  const double u = v_hat + radius(v_hat, state.counts(i, e), state.c_rad);
  return state.clip ? std::min(u, 1.0) : u;
}

// Diagnostic: true iff every empirical mean is within its radius of the true
// mean. Needs ground truth, so this is for simulation-side checks only.
inline bool is_clean(const UcbState& state, const Grid<double>& true_means) {
  if (true_means.rows() != state.agents() || true_means.cols() != state.items())
    throw input_error("is_clean: means shape mismatch");
  for (int i = 0; i < state.agents(); ++i)
    for (int e = 0; e < state.items(); ++e) {
      const double v_hat = state.empirical_mean(i, e);
      if (std::abs(true_means(i, e) - v_hat) > radius(v_hat, state.counts(i, e), state.c_rad))
        return false;
    }
  return true;
}

// Same check but ignoring cells that were never sampled (matroid runs can
// have cells that are impossible to assign).
inline bool is_clean_sampled_cells(const UcbState& state, const Grid<double>& true_means) {
  if (true_means.rows() != state.agents() || true_means.cols() != state.items())
    throw input_error("is_clean: means shape mismatch");
  for (int i = 0; i < state.agents(); ++i)
    for (int e = 0; e < state.items(); ++e) {
      if (state.counts(i, e) < 1) continue;
      const double v_hat = state.empirical_mean(i, e);
      if (std::abs(true_means(i, e) - v_hat) > radius(v_hat, state.counts(i, e), state.c_rad))
        return false;
    }
  return true;
}

}  // namespace bmmfa
