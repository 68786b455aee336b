#pragma once

// Stochastic environment: samples per-round value matrices and turns an
// allocation into semi-bandit feedback.
//
// Round t's values are a deterministic function of (seed, t) with one
// substream per (round, cell), so the algorithm's choices can never perturb
// the environment's realizations. Nothing is presampled; memory stays O(nm).

#include <utility>
#include <vector>

#include "bmmfa/core.hpp"

namespace bmmfa {

// Full n x m realization for round t (1-based, t <= T).
inline ValueMatrix sample_round(const Instance& inst, RngHandle rng, long long t) {
  if (t < 1 || t > inst.T) throw input_error("sample_round: round index out of range");
  ValueMatrix out{Grid<double>(inst.n, inst.m)};
  const RngHandle round_base =
      rng.derived(stream_domain::kEnvValues, static_cast<std::uint64_t>(t));
  for (int i = 0; i < inst.n; ++i)
    for (int e = 0; e < inst.m; ++e) {
      CounterRng cell(round_base.derived(static_cast<std::uint64_t>(i) * inst.m + e));
      out.values(i, e) = inst.dists(i, e).sample(cell);
    }
  return out;
}

// Applies an allocation: feedback holds exactly the assigned triples, and
// rewards[i] is agent i's realized value this round. Items left unassigned
// (matroid variant) produce no feedback.
inline std::pair<Feedback, std::vector<double>> apply_allocation(const ValueMatrix& values,
                                                                 const Allocation& alloc) {
  const int n = values.values.rows();
  const int m = values.values.cols();
  alloc.validate(n, m, /*allow_unassigned=*/true);
  Feedback fb;
  std::vector<double> rewards(static_cast<size_t>(n), 0.0);
  for (int e = 0; e < m; ++e) {
    const auto i = alloc.owner[static_cast<size_t>(e)];
    if (i == Allocation::kUnassigned) continue;
    const double v = values.values(i, e);
    fb.entries.push_back({i, e, v});
    rewards[static_cast<size_t>(i)] += v;
  }
  return {std::move(fb), std::move(rewards)};
}

}  // namespace bmmfa
