#pragma once

// Planted hard-instance family: m = n*b items arranged in b blocks of n.
// Within each block every agent has exactly one "planted" item worth
// Bernoulli(1/2 + eps); every other (agent, item) pair is worth
// Bernoulli(1/2). Item (j, k) is flattened as e = k*n + j.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "bmmfa/core.hpp"

namespace bmmfa {

inline int planted_item_index(int j, int k, int n) { return k * n + j; }

struct BlockAssignment {
  int n = 0;
  int b = 0;
  std::vector<std::vector<int>> agent_of;  // [k][j] = the planted agent of item (j,k)

  BlockAssignment() = default;
  BlockAssignment(int n_, int b_, std::vector<std::vector<int>> a)
      : n(n_), b(b_), agent_of(std::move(a)) {
    validate();
  }

  // Each block's item -> agent map must be a bijection on [0, n).
  void validate() const {
    if (n < 1 || b < 1) throw input_error("block assignment requires n, b >= 1");
    if (static_cast<int>(agent_of.size()) != b) throw input_error("block assignment: wrong block count");
    for (const auto& row : agent_of) {
      if (static_cast<int>(row.size()) != n)
        throw input_error("block assignment: block has wrong item count");
      std::vector<char> seen(static_cast<size_t>(n), 0);
      for (int i : row) {
        if (i < 0 || i >= n) throw input_error("block assignment: agent index out of range");
        if (seen[static_cast<size_t>(i)]) throw input_error("block assignment: not a bijection");
        seen[static_cast<size_t>(i)] = 1;
      }
    }
  }

  static BlockAssignment identity(int n, int b) {
    std::vector<std::vector<int>> rows(static_cast<size_t>(b));
    for (auto& row : rows) {
      row.resize(static_cast<size_t>(n));
      for (int j = 0; j < n; ++j) row[static_cast<size_t>(j)] = j;
    }
    return {n, b, std::move(rows)};
  }

  // Uniform over all per-block bijections: independent Fisher-Yates shuffles.
  static BlockAssignment random(int n, int b, RngHandle rng) {
    CounterRng g(rng.derived(stream_domain::kPlantedAssignment));
    std::vector<std::vector<int>> rows(static_cast<size_t>(b));
    for (auto& row : rows) {
      row.resize(static_cast<size_t>(n));
      for (int j = 0; j < n; ++j) row[static_cast<size_t>(j)] = j;
      for (int j = n - 1; j > 0; --j) {
        const auto r = static_cast<int>(g.next_below(static_cast<std::uint64_t>(j) + 1));
        std::swap(row[static_cast<size_t>(j)], row[static_cast<size_t>(r)]);
      }
    }
    return {n, b, std::move(rows)};
  }

  bool operator==(const BlockAssignment&) const = default;
};

// The planted instance. eps = 0 is allowed as the fully symmetric degenerate
// case; the interesting regime is 0 < eps <= 1/4.
inline Instance make_planted_instance(int n, int b, double eps, const BlockAssignment& alpha,
                                      long long T) {
  if (!(eps >= 0.0 && eps <= 0.25)) throw input_error("planted instance: eps must lie in [0, 1/4]");
  alpha.validate();
  if (alpha.n != n || alpha.b != b) throw input_error("planted instance: assignment shape mismatch");
  const int m = n * b;
  Grid<DistributionSpec> dists(n, m);
  for (int k = 0; k < b; ++k)
    for (int j = 0; j < n; ++j) {
      const int e = planted_item_index(j, k, n);
      for (int i = 0; i < n; ++i)
        dists(i, e) = DistributionSpec::bernoulli(
            alpha.agent_of[static_cast<size_t>(k)][static_cast<size_t>(j)] == i ? 0.5 + eps : 0.5);
    }
  return {n, m, T, std::move(dists)};
}

// Same family with one block's signal erased: all means 1/2 in block k.
inline Instance make_planted_instance_erased(int n, int b, double eps, const BlockAssignment& alpha,
                                             int erased_block, long long T) {
  if (erased_block < 0 || erased_block >= b)
    throw input_error("planted instance: erased block out of range");
  Instance inst = make_planted_instance(n, b, eps, alpha, T);
  for (int j = 0; j < n; ++j) {
    const int e = planted_item_index(j, erased_block, n);
    for (int i = 0; i < n; ++i) inst.dists(i, e) = DistributionSpec::bernoulli(0.5);
  }
  // rebuild the means grid to match
  return {n, inst.m, T, std::move(inst.dists)};
}

// Signal level used for the hard family: 1 / (8 sqrt(T)).
inline double hard_instance_epsilon(long long T) {
  if (T < 1) throw input_error("hard_instance_epsilon: T must be >= 1");
  return 1.0 / (8.0 * std::sqrt(static_cast<double>(T)));
}

// The optimal policy on the planted family is constant: every item to its
// planted agent, giving each agent exactly one item per block.
inline Allocation planted_optimal_allocation(const BlockAssignment& alpha) {
  alpha.validate();
  Allocation alloc = Allocation::constant(alpha.n * alpha.b, 0);
  for (int k = 0; k < alpha.b; ++k)
    for (int j = 0; j < alpha.n; ++j)
      alloc.owner[static_cast<size_t>(planted_item_index(j, k, alpha.n))] =
          static_cast<std::int16_t>(alpha.agent_of[static_cast<size_t>(k)][static_cast<size_t>(j)]);
  return alloc;
}

// Diagnostic: per block, how many (round, item) assignments matched the
// planted agent over a full owner trace (round-major, m entries per round).
inline std::vector<long long> planted_hits(const BlockAssignment& alpha,
                                           std::span<const std::int16_t> owner_trace) {
  alpha.validate();
  const int m = alpha.n * alpha.b;
  if (owner_trace.size() % static_cast<size_t>(m) != 0)
    throw input_error("planted_hits: trace length is not a multiple of m");
  std::vector<long long> hits(static_cast<size_t>(alpha.b), 0);
  const size_t rounds = owner_trace.size() / static_cast<size_t>(m);
  for (size_t t = 0; t < rounds; ++t)
    for (int k = 0; k < alpha.b; ++k)
      for (int j = 0; j < alpha.n; ++j) {
        const int e = planted_item_index(j, k, alpha.n);
        if (owner_trace[t * m + e] ==
            alpha.agent_of[static_cast<size_t>(k)][static_cast<size_t>(j)])
          ++hits[static_cast<size_t>(k)];
      }
  return hits;
}

}  // namespace bmmfa
