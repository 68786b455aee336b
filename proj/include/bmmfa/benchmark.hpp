#pragma once

// The fractional max-min benchmark: P* and x* from the allocation LP, a
// duality certificate on every solve, exact brute-force OPT for tiny
// instances, and regret reports against T * P*.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "bmmfa/allocator.hpp"
#include "bmmfa/core.hpp"
#include "bmmfa/matroid.hpp"
#include "bmmfa/simplex.hpp"

namespace bmmfa {

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double p_star = 0.0;
  Grid<double> x;             // optimal fractional allocation, n x m
  std::vector<double> duals;  // agent rows, then item rows, then capacity rows
  double duality_gap = std::numeric_limits<double>::infinity();
  double primal_residual = std::numeric_limits<double>::infinity();
  double dual_residual = std::numeric_limits<double>::infinity();
};

// Maximize P subject to P <= sum_e mu_ie x_ie per agent, per-item mass one
// (== 1 unconstrained, <= 1 with a matroid), x >= 0, plus explicit capacity
// rows for the structured matroid families. Certified by weak duality:
// gap <= 1e-8, residuals <= 1e-9, or the solve throws.
inline LpSolution solve_pstar(const Grid<double>& means,
                              const MatroidSpec* matroid_constraints = nullptr) {
  const int n = means.rows(), m = means.cols();
  for (int i = 0; i < n; ++i)
    for (int e = 0; e < m; ++e)
      if (!(means(i, e) >= 0.0 && means(i, e) <= 1.0))
        throw input_error("solve_pstar: means must lie in [0,1]");

  LpProblem lp;
  lp.num_vars = 1 + n * m;  // P, then x_ie at 1 + i*m + e
  lp.objective.assign(static_cast<size_t>(lp.num_vars), 0.0);
  lp.objective[0] = 1.0;
  const auto xvar = [m](int i, int e) { return 1 + i * m + e; };

  for (int i = 0; i < n; ++i) {
    std::vector<double> row(static_cast<size_t>(lp.num_vars), 0.0);
    row[0] = 1.0;
    for (int e = 0; e < m; ++e) row[static_cast<size_t>(xvar(i, e))] = -means(i, e);
    lp.add_le(std::move(row), 0.0);
  }
  for (int e = 0; e < m; ++e) {
    std::vector<double> row(static_cast<size_t>(lp.num_vars), 0.0);
    for (int i = 0; i < n; ++i) row[static_cast<size_t>(xvar(i, e))] = 1.0;
    if (matroid_constraints)
      lp.add_le(std::move(row), 1.0);
    else
      lp.add_eq(std::move(row), 1.0);
  }
  if (matroid_constraints) {
    for (auto& [ids, cap] : lp_capacity_rows(n, m, *matroid_constraints)) {
      std::vector<double> row(static_cast<size_t>(lp.num_vars), 0.0);
      for (int id : ids)
        row[static_cast<size_t>(xvar(agent_of_ground(id, m), item_of_ground(id, m)))] = 1.0;
      lp.add_le(std::move(row), cap);
    }
  }

  const LpRawSolution raw = solve_lp(lp);
  if (raw.status != LpStatus::optimal)
    throw std::runtime_error("solve_pstar: LP reported " + to_string(raw.status) +
                             " on valid input");
  if (raw.duality_gap > 1e-8 || raw.primal_residual > 1e-9 || raw.dual_residual > 1e-9)
    throw std::runtime_error("solve_pstar: duality certificate failed");

  LpSolution sol;
  sol.status = raw.status;
  sol.p_star = raw.x[0];
  sol.x = Grid<double>(n, m);
  for (int i = 0; i < n; ++i)
    for (int e = 0; e < m; ++e)
      sol.x(i, e) = std::clamp(raw.x[static_cast<size_t>(xvar(i, e))], 0.0, 1.0);
  sol.duals = raw.duals;
  sol.duality_gap = raw.duality_gap;
  sol.primal_residual = raw.primal_residual;
  sol.dual_residual = raw.dual_residual;
  return sol;
}

// Exact optimum of min_i sum over rounds of expected utility, over all
// length-T allocation sequences. Order does not matter, so this enumerates
// counts per allocation summing to T. Kept deliberately tiny.
inline double brute_force_opt_mu(const Grid<double>& means, long long T) {
  const int n = means.rows(), m = means.cols();
  double num_allocs_f = 1.0;
  for (int e = 0; e < m; ++e) num_allocs_f *= n;
  if (num_allocs_f > 16.0 || T > 8 || T < 1)
    throw input_error("brute_force_opt_mu: refused (needs n^m <= 16 and 1 <= T <= 8)");
  const int num_allocs = static_cast<int>(num_allocs_f);

  // per-allocation, per-agent expected round utility
  std::vector<std::vector<double>> w(static_cast<size_t>(num_allocs),
                                     std::vector<double>(static_cast<size_t>(n), 0.0));
  for (int a = 0; a < num_allocs; ++a) {
    int code = a;
    for (int e = 0; e < m; ++e) {
      const int owner = code % n;
      code /= n;
      w[static_cast<size_t>(a)][static_cast<size_t>(owner)] += means(owner, e);
    }
  }

  std::vector<double> agent_sum(static_cast<size_t>(n), 0.0);
  double best = -std::numeric_limits<double>::infinity();
  auto rec = [&](auto&& self, int idx, long long remaining) -> void {
    if (idx == num_allocs - 1) {
      double mn = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i)
        mn = std::min(mn, agent_sum[static_cast<size_t>(i)] +
                              remaining * w[static_cast<size_t>(idx)][static_cast<size_t>(i)]);
      best = std::max(best, mn);
      return;
    }
    for (long long c = 0; c <= remaining; ++c) {
      if (c > 0)
        for (int i = 0; i < n; ++i)
          agent_sum[static_cast<size_t>(i)] += w[static_cast<size_t>(idx)][static_cast<size_t>(i)];
      self(self, idx + 1, remaining - c);
    }
    for (int i = 0; i < n; ++i)
      agent_sum[static_cast<size_t>(i)] -=
          remaining * w[static_cast<size_t>(idx)][static_cast<size_t>(i)];
  };
  rec(rec, 0, T);
  return best;
}

struct RegretReport {
  double t_pstar = 0.0;             // T * P*
  double alg_min_expected = 0.0;    // min_i P_i
  double alg_min_realized = 0.0;    // min_i U_i
  double surrogate_regret_ub = 0.0; // T * P* - min_i P_i
  std::optional<double> empirical_opt;
  std::optional<double> empirical_regret;
  double per_round_fairness_gap = 0.0;  // surrogate_regret_ub / T
};

inline RegretReport regret_report(const RunRecord& run, const LpSolution& lp,
                                  std::optional<double> empirical_opt = std::nullopt) {
  RegretReport rep;
  rep.t_pstar = static_cast<double>(run.T) * lp.p_star;
  rep.alg_min_expected = egalitarian_welfare(run.final_ledger, Currency::expected);
  rep.alg_min_realized = egalitarian_welfare(run.final_ledger, Currency::realized);
  rep.surrogate_regret_ub = rep.t_pstar - rep.alg_min_expected;
  rep.per_round_fairness_gap = rep.surrogate_regret_ub / static_cast<double>(run.T);
  if (empirical_opt) {
    rep.empirical_opt = empirical_opt;
    rep.empirical_regret = *empirical_opt - rep.alg_min_realized;
  }
  return rep;
}

}  // namespace bmmfa
