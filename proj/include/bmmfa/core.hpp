#pragma once

// Shared domain types: problem instances, allocations, per-round value
// realizations, semi-bandit feedback, and per-agent utility ledgers.
// Agent and item indices are 0-based everywhere, including file formats.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bmmfa/distribution.hpp"
#include "bmmfa/errors.hpp"
#include "bmmfa/rng.hpp"

namespace bmmfa {

// Row-major n (agents) x m (items) grid.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int n, int m, T fill = T{}) : n_(n), m_(m), data_(static_cast<size_t>(n) * m, fill) {
    if (n < 1 || m < 1) throw input_error("grid dimensions must be positive");
  }

  [[nodiscard]] int rows() const { return n_; }
  [[nodiscard]] int cols() const { return m_; }

  T& operator()(int i, int e) { return data_[static_cast<size_t>(i) * m_ + e]; }
  const T& operator()(int i, int e) const { return data_[static_cast<size_t>(i) * m_ + e]; }

  [[nodiscard]] std::span<const T> flat() const { return data_; }
  [[nodiscard]] std::span<T> flat() { return data_; }

  bool operator==(const Grid&) const = default;

 private:
  int n_ = 0, m_ = 0;
  std::vector<T> data_;
};

struct Instance {
  int n = 0;          // agents
  int m = 0;          // items
  long long T = 0;    // horizon
  Grid<DistributionSpec> dists;
  Grid<double> means;  // always equals the analytic means of dists

  Instance() = default;
  Instance(int n_agents, int m_items, long long horizon, Grid<DistributionSpec> d)
      : n(n_agents), m(m_items), T(horizon), dists(std::move(d)), means(n_agents, m_items) {
    if (n < 1 || m < 1 || T < 1) throw input_error("instance requires n, m, T >= 1");
    if (dists.rows() != n || dists.cols() != m) throw input_error("distribution grid shape mismatch");
    for (int i = 0; i < n; ++i)
      for (int e = 0; e < m; ++e) {
        const double mu = dists(i, e).mean();
        if (!(mu >= 0.0 && mu <= 1.0)) throw input_error("distribution mean outside [0,1]");
        means(i, e) = mu;
      }
  }

  // For callers that carry an explicit means grid: it must match the
  // distributions' analytic means.
  Instance(int n_agents, int m_items, long long horizon, Grid<DistributionSpec> d,
           const Grid<double>& declared_means)
      : Instance(n_agents, m_items, horizon, std::move(d)) {
    if (declared_means.rows() != n || declared_means.cols() != m)
      throw input_error("means grid shape mismatch");
    for (int i = 0; i < n; ++i)
      for (int e = 0; e < m; ++e)
        if (std::abs(declared_means(i, e) - means(i, e)) > 1e-12)
          throw input_error("declared means inconsistent with distributions");
  }
};

// One round's item -> agent assignment. owner[e] == kUnassigned is only
// legal under matroid constraints.
struct Allocation {
  static constexpr std::int16_t kUnassigned = -1;
  std::vector<std::int16_t> owner;

  Allocation() = default;
  explicit Allocation(std::vector<std::int16_t> o) : owner(std::move(o)) {}
  static Allocation constant(int m, std::int16_t agent) {
    return Allocation(std::vector<std::int16_t>(static_cast<size_t>(m), agent));
  }

  [[nodiscard]] int items() const { return static_cast<int>(owner.size()); }

  void validate(int n, int m, bool allow_unassigned = false) const {
    if (items() != m) throw input_error("allocation has wrong item count");
    for (const auto o : owner) {
      if (o == kUnassigned) {
        if (!allow_unassigned) throw input_error("unassigned item in unconstrained allocation");
        continue;
      }
      if (o < 0 || o >= n) throw input_error("allocation owner out of range");
    }
  }

  bool operator==(const Allocation&) const = default;
};

struct ValueMatrix {
  Grid<double> values;  // realizations, all in [0,1]
};

// Semi-bandit feedback: exactly the (agent, item, value) triples that were
// assigned this round. Values for unassigned pairs are never exposed.
struct Feedback {
  struct Entry {
    int agent;
    int item;
    double value;
    bool operator==(const Entry&) const = default;
  };
  std::vector<Entry> entries;
};

enum class Currency { realized, expected, ucb };

// Per-agent cumulative utilities in three currencies: realized values,
// expected values, and the upper-confidence values the allocator optimizes.
struct UtilityLedger {
  std::vector<double> realized;
  std::vector<double> expected;
  std::vector<double> ucb;
  long long rounds_elapsed = 0;

  UtilityLedger() = default;
  explicit UtilityLedger(int n)
      : realized(static_cast<size_t>(n), 0.0),
        expected(static_cast<size_t>(n), 0.0),
        ucb(static_cast<size_t>(n), 0.0) {}

  [[nodiscard]] int agents() const { return static_cast<int>(realized.size()); }

  [[nodiscard]] std::span<const double> currency(Currency c) const {
    switch (c) {
      case Currency::realized: return realized;
      case Currency::expected: return expected;
      case Currency::ucb: return ucb;
    }
    return realized;
  }

  bool operator==(const UtilityLedger&) const = default;
};

// Smallest cumulative utility among agents, in the selected currency.
inline double egalitarian_welfare(const UtilityLedger& ledger, Currency c) {
  const auto v = ledger.currency(c);
  if (v.empty()) throw input_error("empty ledger");
  return *std::min_element(v.begin(), v.end());
}

// Returns (min_i a_i - min_i b_i, max_i |a_i - b_i|). The first component is
// at most max_i (a_i - b_i) and its magnitude at most the second component.
inline std::pair<double, double> min_gap_bounds(std::span<const double> a,
                                                std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw input_error("min_gap_bounds: length mismatch");
  double min_a = a[0], min_b = b[0], max_abs = std::abs(a[0] - b[0]);
  for (size_t i = 1; i < a.size(); ++i) {
    min_a = std::min(min_a, a[i]);
    min_b = std::min(min_b, b[i]);
    max_abs = std::max(max_abs, std::abs(a[i] - b[i]));
  }
  return {min_a - min_b, max_abs};
}

}  // namespace bmmfa
