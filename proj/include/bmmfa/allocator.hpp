#pragma once

// Allocation policies. The main policy assigns each item to the agent with
// the largest upper-confidence value discounted by (1-eps)^(u_i/m), where
// u_i is the agent's cumulative UCB utility. An init phase first collects
// one sample per (agent, item) cell. Baselines share the same run loop.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bmmfa/core.hpp"
#include "bmmfa/env.hpp"
#include "bmmfa/estimator.hpp"
#include "bmmfa/matroid.hpp"

namespace bmmfa {

enum class EpsilonSchedule {
  manual,
  large_horizon,  // ln(T-n)/sqrt(T-n); needs very long horizons to shine
  general,        // sqrt(n ln n / T); works whenever T >= n
};

inline std::string to_string(EpsilonSchedule s) {
  switch (s) {
    case EpsilonSchedule::manual: return "manual";
    case EpsilonSchedule::large_horizon: return "large_horizon";
    case EpsilonSchedule::general: return "general";
  }
  return "?";
}

enum class TieBreak { lowest_agent_index };

struct PolicyConfig {
  EpsilonSchedule schedule = EpsilonSchedule::general;
  double epsilon = 0.0;  // manual schedule value; holds the resolved value after resolution
  bool clip_ucb = true;
  TieBreak tie_break = TieBreak::lowest_agent_index;
  double c_rad = 0.0;            // 0 = default_c_rad(n, m, T)
  bool u_from_observed = false;  // ablation: discount on observed values instead of UCBs
};

inline constexpr double kEpsilonFloor = 1e-3;
inline constexpr double kEpsilonCeil = 0.5;

// Resolved discount parameter, clamped into [1e-3, 1/2]. p_star is accepted
// for schedule-regime reporting but the closed forms do not depend on it.
inline double resolve_epsilon(EpsilonSchedule schedule, int n, int m, long long T, double p_star,
                              double manual_value = 0.0) {
  (void)m;
  (void)p_star;
  double raw = 0.0;
  switch (schedule) {
    case EpsilonSchedule::manual:
      if (!(manual_value > 0.0 && manual_value < 1.0))
        throw config_error("manual epsilon must lie in (0,1)");
      raw = manual_value;
      break;
    case EpsilonSchedule::large_horizon: {
      if (T <= n) throw config_error("large_horizon schedule requires T > n");
      const double t_eff = static_cast<double>(T - n);
      raw = std::log(t_eff) / std::sqrt(t_eff);
      break;
    }
    case EpsilonSchedule::general: {
      if (T < n) throw config_error("general schedule requires T >= n");
      if (n < 2) throw config_error("general schedule requires n >= 2");
      raw = std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n)) /
                      static_cast<double>(T));
      break;
    }
  }
  return std::min(kEpsilonCeil, std::max(kEpsilonFloor, raw));
}

// True when the horizon is long enough for the large_horizon schedule's
// guarantee: T >= e^(2m / p_star) + n.
inline bool large_horizon_regime(int n, int m, long long T, double p_star) {
  if (!(p_star > 0.0)) return false;
  return static_cast<double>(T) >=
         std::exp(2.0 * static_cast<double>(m) / p_star) + static_cast<double>(n);
}

// Init-phase round t (1-based, t <= n): all items go to agent t-1.
inline Allocation init_phase_allocation(long long t, int n, int m) {
  if (t < 1 || t > n) throw precondition_error("init_phase_allocation: round outside init phase");
  return Allocation::constant(m, static_cast<std::int16_t>(t - 1));
}

// Per-item argmax of ln(value) + (u_i/m) * ln(1-eps). The objective is
// separable across items, so this attains the global maximum over all
// allocations; ties go to the lowest agent index. Log-space keeps the
// comparison stable when u_i grows to O(T).
inline Allocation choose_allocation_from_values(const Grid<double>& values,
                                                std::span<const double> u, double epsilon) {
  const int n = values.rows(), m = values.cols();
  if (static_cast<int>(u.size()) != n) throw input_error("utility vector has wrong length");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw config_error("epsilon must lie in (0,1)");
  const double log_disc = std::log1p(-epsilon);
  Allocation alloc;
  alloc.owner.resize(static_cast<size_t>(m));
  for (int e = 0; e < m; ++e) {
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double score = std::log(values(i, e)) + u[static_cast<size_t>(i)] / m * log_disc;
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    alloc.owner[static_cast<size_t>(e)] = static_cast<std::int16_t>(best);
  }
  return alloc;
}

// Spec'd entry point: discounted argmax over the current UCBs.
inline Allocation choose_allocation(const UcbState& state, const UtilityLedger& ledger,
                                    const PolicyConfig& cfg) {
  const int n = state.agents(), m = state.items();
  if (ledger.agents() != n) throw input_error("ledger/state agent mismatch");
  Grid<double> ucbs(n, m);
  for (int i = 0; i < n; ++i)
    for (int e = 0; e < m; ++e) {
      if (state.counts(i, e) < 1)
        throw precondition_error("choose_allocation: unsampled cell");
      ucbs(i, e) = ucb_value(state, i, e);
    }
  return choose_allocation_from_values(ucbs, ledger.ucb, cfg.epsilon);
}

// Tracks Phi(s) = sum_i (1-eps)^(S_i(s)/m) * (1 - eps*P*/m)^(T-s), where
// S_i(s) is agent i's cumulative UCB reward after the init phase. Kept in
// log-sum-exp form so large horizons do not underflow.
class PotentialTracker {
 public:
  PotentialTracker(double p_star, double epsilon, long long T, long long init_rounds, int n, int m)
      : p_star_(p_star), epsilon_(epsilon), T_(T), init_(init_rounds), n_(n), m_(m),
        current_sums_(static_cast<size_t>(n), 0.0) {
    if (!(p_star > 0.0)) throw config_error("potential requires P* > 0");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw config_error("potential requires epsilon in (0,1)");
    if (!(epsilon * p_star / m < 1.0)) throw config_error("potential requires eps*P*/m < 1");
    if (init_rounds < 0 || init_rounds > T) throw config_error("init phase longer than horizon");
  }

  [[nodiscard]] double p_star() const { return p_star_; }
  [[nodiscard]] double epsilon() const { return epsilon_; }
  [[nodiscard]] long long init_rounds() const { return init_; }
  [[nodiscard]] long long current_round() const {
    return init_ + static_cast<long long>(sums_trace_.size());
  }

  // Per-round UCB rewards, one entry per agent, each in [0, m].
  void observe_round(std::span<const double> ucb_round_rewards) {
    if (static_cast<int>(ucb_round_rewards.size()) != n_)
      throw input_error("potential tracker: reward vector has wrong length");
    if (current_round() >= T_) throw precondition_error("potential tracker: past the horizon");
    for (int i = 0; i < n_; ++i) {
      const double x = ucb_round_rewards[static_cast<size_t>(i)];
      if (!(x >= 0.0) || x > static_cast<double>(m_) + 1e-9)
        throw input_error("potential tracker: per-round reward outside [0, m]");
      current_sums_[static_cast<size_t>(i)] += x;
    }
    sums_trace_.push_back(current_sums_);
  }

  [[nodiscard]] double log_value_at(long long s) const {
    if (s < init_ || s > current_round())
      throw precondition_error("potential tracker: round not yet observed");
    const std::vector<double> zero(static_cast<size_t>(n_), 0.0);
    const auto& sums = s == init_ ? zero : sums_trace_[static_cast<size_t>(s - init_ - 1)];
    const double tail = static_cast<double>(T_ - s) * std::log1p(-epsilon_ * p_star_ / m_);
    const double log_disc = std::log1p(-epsilon_);
    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(static_cast<size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      terms[static_cast<size_t>(i)] = sums[static_cast<size_t>(i)] / m_ * log_disc + tail;
      max_term = std::max(max_term, terms[static_cast<size_t>(i)]);
    }
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - max_term);
    return max_term + std::log(acc);
  }

  [[nodiscard]] double value_at(long long s) const { return std::exp(log_value_at(s)); }

 private:
  double p_star_, epsilon_;
  long long T_, init_;
  int n_, m_;
  std::vector<double> current_sums_;
  std::vector<std::vector<double>> sums_trace_;
};

inline double potential(const PotentialTracker& tracker, long long s) {
  return tracker.value_at(s);
}

enum class PolicyKind {
  discounted_ucb,          // init phase + discounted-UCB argmax
  discounted_ucb_matroid,  // same under a matroid constraint, via weighted intersection
  ucb_greedy,              // per-item UCB argmax, no discount
  round_robin,             // item e to agent (t+e) mod n
  fixed,                   // replay one constant allocation
  oracle_discounted,       // discounted argmax on true means (no estimation error)
};

inline std::string to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::discounted_ucb: return "discounted_ucb";
    case PolicyKind::discounted_ucb_matroid: return "discounted_ucb_matroid";
    case PolicyKind::ucb_greedy: return "ucb_greedy";
    case PolicyKind::round_robin: return "round_robin";
    case PolicyKind::fixed: return "fixed";
    case PolicyKind::oracle_discounted: return "oracle_discounted";
  }
  return "?";
}

struct PolicySpec {
  PolicyKind kind = PolicyKind::discounted_ucb;
  Allocation fixed_owner;                  // for PolicyKind::fixed
  const MatroidOracle* matroid = nullptr;  // for the matroid variant
};

struct RecordOptions {
  bool owner_trace = true;
  bool ledger_trace = true;
  bool clean_trace = true;
  std::optional<double> p_star;  // track the potential when set (discounted policies only)
};

// Full trajectory of one run.
struct RunRecord {
  int n = 0, m = 0;
  long long T = 0;
  std::string policy;
  double epsilon = 0.0;
  double c_rad = 0.0;
  bool clip = true;
  RngHandle rng;
  long long init_rounds = 0;

  std::vector<std::int16_t> owners;         // T x m, round-major (if recorded)
  std::vector<UtilityLedger> ledger_trace;  // one snapshot per round (if recorded)
  UtilityLedger final_ledger;

  // Cleanliness of the estimator, checked after each round's update from the
  // end of the init phase on (cells that were never sampled are skipped).
  std::vector<std::uint8_t> clean_trace;
  bool clean_all = true;
  long long first_violation = -1;  // 1-based round, -1 = never

  std::vector<double> log_phi;  // log Phi(s) for s = init_rounds..T (if tracked)
  bool phi_monotone_ok = true;

  [[nodiscard]] std::int16_t owner_at(long long t, int e) const {
    return owners[static_cast<size_t>(t - 1) * m + e];
  }
};

namespace detail_alloc {

// Matroid-variant init schedule: round t probes cell (i, e) with
// t-1 = i*m + e, assigning just that item when the singleton is independent.
inline Allocation matroid_init_allocation(long long t, int n, int m,
                                          const MatroidOracle& oracle) {
  const long long pair = t - 1;
  if (pair < 0 || pair >= static_cast<long long>(n) * m)
    throw precondition_error("matroid init: round outside init phase");
  const int i = static_cast<int>(pair / m);
  const int e = static_cast<int>(pair % m);
  Allocation alloc = Allocation::constant(m, Allocation::kUnassigned);
  const int id = ground_id(i, e, m);
  const ElementSet single{id};
  if (oracle.contains(single)) alloc.owner[static_cast<size_t>(e)] = static_cast<std::int16_t>(i);
  return alloc;
}

// Discounted-UCB allocation under a matroid constraint: maximum-weight
// common independent set of the constraint matroid and the per-item
// partition matroid. Weights are rescaled by the largest discount so they
// stay well inside the floating range; a common positive rescaling does not
// change the argmax.
inline Allocation matroid_choose(const Grid<double>& values, std::span<const double> u,
                                 double epsilon, const MatroidOracle& constraint,
                                 const MatroidOracle& item_partition,
                                 const std::vector<char>& cell_usable) {
  const int n = values.rows(), m = values.cols();
  const double log_disc = std::log1p(-epsilon);
  double max_exp = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    max_exp = std::max(max_exp, u[static_cast<size_t>(i)] / m * log_disc);
  std::vector<double> w(static_cast<size_t>(n) * m, 0.0);
  for (int i = 0; i < n; ++i)
    for (int e = 0; e < m; ++e) {
      const int id = ground_id(i, e, m);
      if (!cell_usable[static_cast<size_t>(id)]) continue;
      w[static_cast<size_t>(id)] =
          std::exp(u[static_cast<size_t>(i)] / m * log_disc - max_exp) * values(i, e);
    }
  const ElementSet chosen = max_weight_common_independent(constraint, item_partition, w);
  Allocation alloc = Allocation::constant(m, Allocation::kUnassigned);
  for (int id : chosen)
    alloc.owner[static_cast<size_t>(item_of_ground(id, m))] =
        static_cast<std::int16_t>(agent_of_ground(id, m));
  return alloc;
}

}  // namespace detail_alloc

// Runs one policy for T rounds and returns the trajectory. Identical
// (instance, policy, cfg, rng) inputs reproduce the record bit-for-bit.
inline RunRecord run_policy(const Instance& inst, const PolicySpec& policy, PolicyConfig cfg,
                            RngHandle rng, const RecordOptions& opts = {}) {
  const int n = inst.n, m = inst.m;
  const long long T = inst.T;

  const bool needs_estimator = policy.kind == PolicyKind::discounted_ucb ||
                               policy.kind == PolicyKind::discounted_ucb_matroid ||
                               policy.kind == PolicyKind::ucb_greedy;
  const bool discounted = policy.kind == PolicyKind::discounted_ucb ||
                          policy.kind == PolicyKind::discounted_ucb_matroid ||
                          policy.kind == PolicyKind::oracle_discounted;

  long long init_rounds = 0;
  if (policy.kind == PolicyKind::discounted_ucb || policy.kind == PolicyKind::ucb_greedy ||
      policy.kind == PolicyKind::oracle_discounted) {
    if (T < n) throw config_error("horizon too short: the init phase needs n rounds");
    init_rounds = n;
  } else if (policy.kind == PolicyKind::discounted_ucb_matroid) {
    if (policy.matroid == nullptr) throw config_error("matroid policy without a matroid oracle");
    if (policy.matroid->ground_size() != n * m)
      throw config_error("matroid ground set does not match the instance");
    if (T < static_cast<long long>(n) * m)
      throw config_error("horizon too short: the matroid init phase needs n*m rounds");
    init_rounds = static_cast<long long>(n) * m;
  } else if (policy.kind == PolicyKind::fixed) {
    policy.fixed_owner.validate(n, m, /*allow_unassigned=*/true);
  }

  if (cfg.c_rad <= 0.0) cfg.c_rad = default_c_rad(n, m, T);
  if (discounted)
    cfg.epsilon = resolve_epsilon(cfg.schedule, n, m, T, opts.p_star.value_or(0.0), cfg.epsilon);

  RunRecord rec;
  rec.n = n;
  rec.m = m;
  rec.T = T;
  rec.policy = to_string(policy.kind);
  rec.epsilon = discounted ? cfg.epsilon : 0.0;
  rec.c_rad = cfg.c_rad;
  rec.clip = cfg.clip_ucb;
  rec.rng = rng;
  rec.init_rounds = init_rounds;

  UcbState state(n, m, cfg.c_rad, cfg.clip_ucb);
  UtilityLedger ledger(n);

  std::optional<PotentialTracker> phi;
  if (opts.p_star && discounted) {
    // the potential's per-round increments live in [0, m] only when UCBs
    // are clipped; tracking it in the unclipped ablation is meaningless
    if (!cfg.clip_ucb)
      throw config_error("potential tracking requires clipped UCBs");
    phi.emplace(*opts.p_star, cfg.epsilon, T, init_rounds, n, m);
  }

  std::unique_ptr<MatroidOracle> item_partition;
  std::vector<char> cell_usable;
  if (policy.kind == PolicyKind::discounted_ucb_matroid) {
    std::vector<int> block_of(static_cast<size_t>(n) * m);
    for (int id = 0; id < n * m; ++id) block_of[static_cast<size_t>(id)] = item_of_ground(id, m);
    item_partition = std::make_unique<PartitionMatroid>(
        n * m, std::move(block_of), std::vector<int>(static_cast<size_t>(m), 1));
    cell_usable.assign(static_cast<size_t>(n) * m, 0);
    for (int id = 0; id < n * m; ++id) {
      const ElementSet single{id};
      cell_usable[static_cast<size_t>(id)] = policy.matroid->contains(single) ? 1 : 0;
    }
  }

  if (opts.owner_trace) rec.owners.reserve(static_cast<size_t>(T) * m);
  if (opts.ledger_trace) rec.ledger_trace.reserve(static_cast<size_t>(T));

  Grid<double> score_values(n, m);  // UCBs (or means) used by this round's choice
  std::vector<double> round_ucb_reward(static_cast<size_t>(n), 0.0);

  for (long long t = 1; t <= T; ++t) {
    Allocation alloc;
    bool scores_valid = false;
    switch (policy.kind) {
      case PolicyKind::discounted_ucb:
      case PolicyKind::ucb_greedy:
      case PolicyKind::oracle_discounted: {
        if (t <= init_rounds) {
          alloc = init_phase_allocation(t, n, m);
          break;
        }
        if (policy.kind == PolicyKind::oracle_discounted) {
          score_values = inst.means;
        } else {
          for (int i = 0; i < n; ++i)
            for (int e = 0; e < m; ++e) score_values(i, e) = ucb_value(state, i, e);
        }
        scores_valid = true;
        if (policy.kind == PolicyKind::ucb_greedy) {
          // undiscounted per-item argmax
          alloc.owner.resize(static_cast<size_t>(m));
          for (int e = 0; e < m; ++e) {
            int best = 0;
            for (int i = 1; i < n; ++i)
              if (score_values(i, e) > score_values(best, e)) best = i;
            alloc.owner[static_cast<size_t>(e)] = static_cast<std::int16_t>(best);
          }
        } else {
          alloc = choose_allocation_from_values(score_values, ledger.ucb, cfg.epsilon);
        }
        break;
      }
      case PolicyKind::discounted_ucb_matroid: {
        if (t <= init_rounds) {
          alloc = detail_alloc::matroid_init_allocation(t, n, m, *policy.matroid);
          break;
        }
        for (int i = 0; i < n; ++i)
          for (int e = 0; e < m; ++e)
            score_values(i, e) =
                cell_usable[static_cast<size_t>(ground_id(i, e, m))] ? ucb_value(state, i, e) : 0.0;
        scores_valid = true;
        alloc = detail_alloc::matroid_choose(score_values, ledger.ucb, cfg.epsilon,
                                             *policy.matroid, *item_partition, cell_usable);
        break;
      }
      case PolicyKind::round_robin: {
        alloc.owner.resize(static_cast<size_t>(m));
        for (int e = 0; e < m; ++e)
          alloc.owner[static_cast<size_t>(e)] = static_cast<std::int16_t>((t + e) % n);
        break;
      }
      case PolicyKind::fixed:
        alloc = policy.fixed_owner;
        break;
    }

    const ValueMatrix values = sample_round(inst, rng, t);
    auto [fb, rewards] = apply_allocation(values, alloc);

    for (int i = 0; i < n; ++i) ledger.realized[static_cast<size_t>(i)] += rewards[static_cast<size_t>(i)];
    for (int e = 0; e < m; ++e) {
      const auto owner = alloc.owner[static_cast<size_t>(e)];
      if (owner != Allocation::kUnassigned)
        ledger.expected[static_cast<size_t>(owner)] += inst.means(owner, e);
    }

    // Cumulative UCB utility u_i: post-init rounds accumulate the same
    // values the objective used. The ablation uses observed values instead.
    std::fill(round_ucb_reward.begin(), round_ucb_reward.end(), 0.0);
    if (t > init_rounds && scores_valid) {
      if (cfg.u_from_observed) {
        for (const auto& entry : fb.entries)
          round_ucb_reward[static_cast<size_t>(entry.agent)] += entry.value;
      } else {
        for (int e = 0; e < m; ++e) {
          const auto owner = alloc.owner[static_cast<size_t>(e)];
          if (owner != Allocation::kUnassigned)
            round_ucb_reward[static_cast<size_t>(owner)] += score_values(owner, e);
        }
      }
      for (int i = 0; i < n; ++i)
        ledger.ucb[static_cast<size_t>(i)] += round_ucb_reward[static_cast<size_t>(i)];
    }
    ledger.rounds_elapsed = t;

    if (needs_estimator || policy.kind == PolicyKind::round_robin ||
        policy.kind == PolicyKind::fixed || policy.kind == PolicyKind::oracle_discounted)
      state.observe(fb);

    if (t >= std::max<long long>(init_rounds, 1)) {
      const bool clean = is_clean_sampled_cells(state, inst.means);
      if (opts.clean_trace) rec.clean_trace.push_back(clean ? 1 : 0);
      if (!clean && rec.clean_all) {
        rec.clean_all = false;
        rec.first_violation = t;
      }
    }

    if (phi && t > init_rounds) {
      phi->observe_round(round_ucb_reward);
      const double prev = rec.log_phi.empty() ? phi->log_value_at(init_rounds) : rec.log_phi.back();
      if (rec.log_phi.empty()) rec.log_phi.push_back(prev);
      const double cur = phi->log_value_at(t);
      // log-domain monotonicity with an absolute slack of 1e-9
      if (cur > prev + 1e-9) rec.phi_monotone_ok = false;
      rec.log_phi.push_back(cur);
    }

    if (opts.owner_trace)
      rec.owners.insert(rec.owners.end(), alloc.owner.begin(), alloc.owner.end());
    if (opts.ledger_trace) rec.ledger_trace.push_back(ledger);
  }

  rec.final_ledger = ledger;
  return rec;
}

}  // namespace bmmfa
