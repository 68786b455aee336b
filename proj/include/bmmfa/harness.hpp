#pragma once

// Experiment orchestration: sweeps over (policy, T, seed), persisted run
// records, a canonical CSV series, summary statistics with log-log scaling
// fits, optional SVG plots, and deterministic replay.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bmmfa/benchmark.hpp"
#include "bmmfa/config.hpp"
#include "bmmfa/stats.hpp"

namespace bmmfa {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- records --

struct RunOutput {
  std::string policy;
  long long T = 0;
  int seed_index = 0;
  std::uint64_t run_seed = 0;
  double p_star = 0.0;
  double surrogate_regret_ub = 0.0;
  double min_realized = 0.0;
  double min_expected = 0.0;
  bool clean = false;
  bool phi_monotone_ok = true;
  std::optional<double> empirical_regret;
  nlohmann::json payload;  // the replay-comparable record body
  double wall_ms = 0.0;
};

namespace detail_harness {

inline long long trace_stride(long long T) { return T <= 4096 ? 1 : (T + 4095) / 4096; }

// Rounds kept in persisted traces: every stride-th plus the final round.
inline std::vector<long long> kept_rounds(long long T) {
  const long long stride = trace_stride(T);
  std::vector<long long> keep;
  for (long long t = 1; t <= T; t += stride) keep.push_back(t);
  if (keep.back() != T) keep.push_back(T);
  return keep;
}

inline nlohmann::json ledger_to_json(const UtilityLedger& led) {
  return {{"realized", led.realized},
          {"expected", led.expected},
          {"ucb", led.ucb},
          {"rounds_elapsed", led.rounds_elapsed}};
}

}  // namespace detail_harness

// One (policy, T, seed) run: instance, benchmark, policy execution, record
// payload. Pure function of the config, so replay regenerates identical
// bytes.
inline RunOutput execute_run(const ExperimentConfig& cfg, const PolicyEntry& policy, long long T,
                             int seed_index, std::optional<double> empirical_opt) {
  const auto start = std::chrono::steady_clock::now();

  RunOutput out;
  out.policy = policy.name();
  out.T = T;
  out.seed_index = seed_index;
  out.run_seed = derive_run_seed(cfg.master_seed, out.policy, T, seed_index);

  const RngHandle run_rng{out.run_seed, stream_domain::kHarnessRun};
  BuiltInstance built = build_instance(cfg, T, run_rng);
  const Instance& inst = built.instance;

  const MatroidSpec* matroid_spec = cfg.matroid ? &*cfg.matroid : nullptr;
  std::unique_ptr<MatroidOracle> oracle;

  PolicySpec spec;
  spec.kind = policy.kind;
  if (policy.kind == PolicyKind::fixed) spec.fixed_owner = policy.fixed_owner;
  if (policy.kind == PolicyKind::discounted_ucb_matroid) {
    oracle = build_matroid(inst.n, inst.m, *matroid_spec);
    spec.matroid = oracle.get();
  }

  // The benchmark constrains the LP only when the policy itself is
  // constrained; unconstrained baselines are measured against the
  // unconstrained P*.
  const LpSolution lp = solve_pstar(
      inst.means, policy.kind == PolicyKind::discounted_ucb_matroid ? matroid_spec : nullptr);

  PolicyConfig pc;
  pc.schedule = cfg.schedule;
  pc.epsilon = cfg.manual_epsilon;
  pc.clip_ucb = cfg.clip_ucb;
  pc.c_rad = cfg.c_rad;
  pc.u_from_observed = cfg.u_from_observed;

  RecordOptions opts;
  opts.owner_trace = true;  // needed for diagnostics; thinned at persistence
  opts.ledger_trace = false;
  opts.clean_trace = false;
  if (lp.p_star > 0.0 && cfg.clip_ucb) opts.p_star = lp.p_star;

  const RunRecord rec = run_policy(inst, spec, pc, run_rng, opts);
  const RegretReport report = regret_report(rec, lp, empirical_opt);

  out.p_star = lp.p_star;
  out.surrogate_regret_ub = report.surrogate_regret_ub;
  out.min_realized = report.alg_min_realized;
  out.min_expected = report.alg_min_expected;
  out.clean = rec.clean_all;
  out.phi_monotone_ok = rec.phi_monotone_ok;
  out.empirical_regret = report.empirical_regret;

  nlohmann::json payload;
  payload["schema_version"] = 1;
  payload["config"] = cfg.raw;
  payload["config_fingerprint"] = config_fingerprint(cfg.raw);
  payload["policy"] = out.policy;
  payload["T"] = T;
  payload["seed_index"] = seed_index;
  payload["run_seed"] = out.run_seed;
  payload["n"] = inst.n;
  payload["m"] = inst.m;
  payload["epsilon"] = rec.epsilon;
  payload["c_rad"] = rec.c_rad;
  payload["clip_ucb"] = rec.clip;
  payload["init_rounds"] = rec.init_rounds;
  payload["p_star"] = lp.p_star;
  payload["surrogate_regret_ub"] = report.surrogate_regret_ub;
  payload["min_realized"] = report.alg_min_realized;
  payload["min_expected"] = report.alg_min_expected;
  payload["per_round_fairness_gap"] = report.per_round_fairness_gap;
  payload["clean"] = rec.clean_all;
  payload["first_violation_round"] = rec.first_violation;
  payload["phi_monotone_ok"] = rec.phi_monotone_ok;
  payload["final_ledger"] = detail_harness::ledger_to_json(rec.final_ledger);
  if (empirical_opt) {
    payload["empirical_opt"] = *empirical_opt;
    payload["empirical_regret"] = *report.empirical_regret;
  }

  const long long stride = detail_harness::trace_stride(T);
  payload["trace_stride"] = stride;
  if (cfg.record_traces) {
    nlohmann::json owners = nlohmann::json::array();
    for (const long long t : detail_harness::kept_rounds(T)) {
      nlohmann::json row = nlohmann::json::array();
      for (int e = 0; e < inst.m; ++e) row.push_back(rec.owner_at(t, e));
      owners.push_back(std::move(row));
    }
    payload["owners"] = std::move(owners);
    if (!rec.log_phi.empty()) {
      nlohmann::json phis = nlohmann::json::array();
      for (const long long t : detail_harness::kept_rounds(T))
        if (t >= rec.init_rounds)
          phis.push_back(rec.log_phi[static_cast<size_t>(t - rec.init_rounds)]);
      payload["log_phi"] = std::move(phis);
    }
  }
  if (built.alpha) payload["planted_hits"] = planted_hits(*built.alpha, rec.owners);

  out.payload = std::move(payload);
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                    .count();
  return out;
}

// Monte-Carlo estimate of the optimal egalitarian welfare on a planted
// instance: simulate the constant planted-optimal allocation. Relabeling
// agents does not change the law of min_i U_i, so the identity assignment is
// representative of the whole family.
inline double estimate_empirical_opt(const ExperimentConfig& cfg, long long T) {
  if (cfg.instance.type != InstanceSpec::Type::adversary)
    throw config_error("empirical OPT is only defined for adversary instances");
  const int n = cfg.instance.adv_n, b = cfg.instance.adv_b;
  const double eps = cfg.instance.adv_eps < 0.0 ? hard_instance_epsilon(T) : cfg.instance.adv_eps;
  const BlockAssignment alpha = BlockAssignment::identity(n, b);
  const Instance inst = cfg.instance.erase_block
                            ? make_planted_instance_erased(n, b, eps, alpha,
                                                           *cfg.instance.erase_block, T)
                            : make_planted_instance(n, b, eps, alpha, T);
  PolicySpec spec;
  spec.kind = PolicyKind::fixed;
  spec.fixed_owner = planted_optimal_allocation(alpha);
  RecordOptions opts;
  opts.owner_trace = false;
  opts.ledger_trace = false;
  opts.clean_trace = false;
  std::vector<double> mins;
  mins.reserve(static_cast<size_t>(cfg.empirical_opt_seeds));
  for (int s = 0; s < cfg.empirical_opt_seeds; ++s) {
    const std::uint64_t seed = derive_run_seed(cfg.master_seed, "empirical_opt", T, s);
    const RunRecord rec = run_policy(inst, spec, PolicyConfig{}, {seed, stream_domain::kEmpiricalOpt}, opts);
    mins.push_back(egalitarian_welfare(rec.final_ledger, Currency::realized));
  }
  return mean(mins);
}

// ---------------------------------------------------------------- summary --

struct TSummary {
  long long T = 0;
  int runs = 0;
  double p_star = 0.0;
  double mean_surrogate_regret_ub = 0.0;
  double stddev_surrogate_regret_ub = 0.0;
  double mean_per_round_fairness_gap = 0.0;
  std::optional<double> mean_empirical_regret;
  bool large_horizon_regime_ok = false;
};

struct PolicySummary {
  std::string policy;
  std::vector<TSummary> per_t;
  std::optional<OlsFit> scaling_fit;  // needs >= 3 horizons with positive means
};

struct SweepSummary {
  std::string config_fingerprint;
  std::string output_dir;
  std::vector<PolicySummary> per_policy;
  std::vector<std::string> failures;  // "policy T seed: error"

  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["config_fingerprint"] = config_fingerprint;
    nlohmann::json pols = nlohmann::json::array();
    for (const auto& p : per_policy) {
      nlohmann::json pj;
      pj["policy"] = p.policy;
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& t : p.per_t) {
        nlohmann::json tj;
        tj["T"] = t.T;
        tj["runs"] = t.runs;
        tj["p_star"] = t.p_star;
        tj["mean_surrogate_regret_ub"] = t.mean_surrogate_regret_ub;
        tj["stddev_surrogate_regret_ub"] = t.stddev_surrogate_regret_ub;
        tj["mean_per_round_fairness_gap"] = t.mean_per_round_fairness_gap;
        if (t.mean_empirical_regret) tj["mean_empirical_regret"] = *t.mean_empirical_regret;
        tj["large_horizon_regime_ok"] = t.large_horizon_regime_ok;
        rows.push_back(std::move(tj));
      }
      pj["per_T"] = std::move(rows);
      if (p.scaling_fit) {
        pj["scaling_fit"] = {{"slope", p.scaling_fit->slope},
                             {"slope_stderr", p.scaling_fit->slope_stderr},
                             {"intercept", p.scaling_fit->intercept},
                             {"intercept_stderr", p.scaling_fit->intercept_stderr},
                             {"points", p.scaling_fit->points}};
      }
      pols.push_back(std::move(pj));
    }
    j["per_policy"] = std::move(pols);
    j["failures"] = failures;
    return j;
  }
};

namespace detail_harness {

inline int resolve_threads(const ExperimentConfig& cfg, size_t tasks) {
  int threads = cfg.threads;
  if (const char* env = std::getenv("BMMFA_THREADS")) threads = std::atoi(env);
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  return static_cast<int>(std::min<size_t>(static_cast<size_t>(threads), std::max<size_t>(tasks, 1)));
}

inline std::string resolve_output_dir(const ExperimentConfig& cfg) {
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv("BMMFA_OUT")) return env;
  return "bmmfa_out";
}

inline std::string record_filename(const std::string& policy, long long T, int seed) {
  return "record_" + policy + "_T" + std::to_string(T) + "_s" + std::to_string(seed) + ".json";
}

// Minimal standalone log-log SVG: one polyline per policy over (T, mean).
inline std::string svg_regret_plot(
    const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series) {
  const double width = 640, height = 480, left = 70, right = 20, top = 20, bottom = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& [name, pts] : series)
    for (const auto& [x, y] : pts) {
      if (!(x > 0.0) || !(y > 0.0)) continue;
      xmin = std::min(xmin, std::log10(x));
      xmax = std::max(xmax, std::log10(x));
      ymin = std::min(ymin, std::log10(y));
      ymax = std::max(ymax, std::log10(y));
    }
  if (xmin > xmax || ymin > ymax) return {};
  if (xmax - xmin < 1e-9) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-9) ymax = ymin + 1.0;
  const auto px = [&](double lx) {
    return left + (lx - xmin) / (xmax - xmin) * (width - left - right);
  };
  const auto py = [&](double ly) {
    return height - bottom - (ly - ymin) / (ymax - ymin) * (height - top - bottom);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" height=\"480\">\n";
  svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                left, height - bottom, width - right, height - bottom);
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", left,
                top, left, height - bottom);
  svg += buf;
  for (int d = static_cast<int>(std::ceil(xmin)); d <= static_cast<int>(std::floor(xmax)); ++d) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"middle\">1e%d</text>\n",
                  px(d), height - bottom + 18, d);
    svg += buf;
  }
  for (int d = static_cast<int>(std::ceil(ymin)); d <= static_cast<int>(std::floor(ymax)); ++d) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"end\">1e%d</text>\n",
                  left - 6, py(d) + 4, d);
    svg += buf;
  }
  svg += "<text x=\"330\" y=\"470\" font-size=\"13\" text-anchor=\"middle\">T</text>\n";
  svg += "<text x=\"16\" y=\"240\" font-size=\"13\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 16 240)\">mean surrogate regret</text>\n";
  int ci = 0;
  double legend_y = top + 10;
  for (const auto& [name, pts] : series) {
    const char* color = colors[ci++ % 6];
    std::string points;
    for (const auto& [x, y] : pts) {
      if (!(x > 0.0) || !(y > 0.0)) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(std::log10(x)), py(std::log10(y)));
      points += buf;
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" +
           points + "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" fill=\"%s\">%s</text>\n",
                  width - right - 200.0, legend_y, color, name.c_str());
    svg += buf;
    legend_y += 16;
  }
  svg += "</svg>\n";
  return svg;
}

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write " + path.string());
  out << contents;
}

}  // namespace detail_harness

// Runs the whole sweep: one run per (policy, T, seed), records persisted as
// JSON, the canonical CSV, a summary JSON, and an optional SVG. Per-run
// failures are recorded and the sweep continues.
inline SweepSummary run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const std::string out_dir = detail_harness::resolve_output_dir(cfg);
  fs::create_directories(fs::path(out_dir) / "records");

  struct Task {
    const PolicyEntry* policy;
    long long T;
    int seed;
  };
  std::vector<Task> tasks;
  for (const auto& policy : cfg.policies)
    for (const long long T : cfg.t_grid)
      for (int s = 0; s < cfg.seeds; ++s) tasks.push_back({&policy, T, s});

  // Monte-Carlo OPT estimates are shared across runs of the same horizon.
  // Estimating realized regret on short or narrow planted instances is
  // allowed but flagged: the floor guarantees need T >= max(n, m^2) and
  // m/n >= ceil(2338 ln T).
  std::map<long long, double> empirical_opt;
  if (cfg.empirical_opt_seeds > 0) {
    const long long n = cfg.instance.adv_n;
    const long long m = n * cfg.instance.adv_b;
    for (const long long T : cfg.t_grid) {
      empirical_opt[T] = estimate_empirical_opt(cfg, T);
      const bool horizon_ok = T >= std::max(n, m * m);
      const bool blocks_ok =
          cfg.instance.adv_b >=
          static_cast<long long>(std::ceil(2338.0 * std::log(static_cast<double>(T))));
      if (!horizon_ok || !blocks_ok)
        std::cerr << "warning: realized-regret floor guards not met at T=" << T
                  << " (surrogate-regret results are unaffected)\n";
    }
  }

  std::vector<RunOutput> results(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<size_t> next{0};
  const int threads = detail_harness::resolve_threads(cfg, tasks.size());
  auto worker = [&] {
    for (;;) {
      const size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      const Task& task = tasks[k];
      try {
        std::optional<double> opt;
        if (const auto it = empirical_opt.find(task.T); it != empirical_opt.end())
          opt = it->second;
        results[k] = execute_run(cfg, *task.policy, task.T, task.seed, opt);
      } catch (const std::exception& err) {
        errors[k] = err.what();
        results[k].policy = task.policy->name();
        results[k].T = task.T;
        results[k].seed_index = task.seed;
      }
    }
  };
  {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepSummary summary;
  summary.config_fingerprint = config_fingerprint(cfg.raw);
  summary.output_dir = out_dir;

  // Persist records and assemble the CSV in deterministic task order.
  std::string csv = "policy,T,seed,surrogate_regret_ub,min_realized,min_expected,clean,phi_monotone_ok\n";
  for (size_t k = 0; k < tasks.size(); ++k) {
    if (!errors[k].empty()) {
      summary.failures.push_back(results[k].policy + " T=" + std::to_string(results[k].T) +
                                 " seed=" + std::to_string(results[k].seed_index) + ": " +
                                 errors[k]);
      continue;
    }
    const RunOutput& r = results[k];
    nlohmann::json file;
    file["record"] = r.payload;
    file["timing"] = {{"wall_ms", r.wall_ms}};
    detail_harness::write_file(fs::path(out_dir) / "records" /
                                   detail_harness::record_filename(r.policy, r.T, r.seed_index),
                               file.dump(2) + "\n");
    csv += r.policy;
    csv += ',';
    csv += std::to_string(r.T);
    csv += ',';
    csv += std::to_string(r.seed_index);
    csv += ',';
    csv += format_double(r.surrogate_regret_ub);
    csv += ',';
    csv += format_double(r.min_realized);
    csv += ',';
    csv += format_double(r.min_expected);
    csv += ',';
    csv += r.clean ? "1" : "0";
    csv += ',';
    csv += r.phi_monotone_ok ? "1" : "0";
    csv += '\n';
  }
  detail_harness::write_file(fs::path(out_dir) / "series.csv", csv);

  // Per-policy, per-T aggregates and the scaling fit.
  for (const auto& policy : cfg.policies) {
    PolicySummary ps;
    ps.policy = policy.name();
    std::vector<std::pair<double, double>> fit_series;
    for (const long long T : cfg.t_grid) {
      std::vector<double> surrogates, gaps, emp;
      double p_star = 0.0;
      for (size_t k = 0; k < tasks.size(); ++k) {
        if (!errors[k].empty() || results[k].policy != ps.policy || results[k].T != T) continue;
        surrogates.push_back(results[k].surrogate_regret_ub);
        gaps.push_back(results[k].surrogate_regret_ub / static_cast<double>(T));
        if (results[k].empirical_regret) emp.push_back(*results[k].empirical_regret);
        p_star = results[k].p_star;
      }
      if (surrogates.empty()) continue;
      TSummary ts;
      ts.T = T;
      ts.runs = static_cast<int>(surrogates.size());
      ts.p_star = p_star;
      ts.mean_surrogate_regret_ub = mean(surrogates);
      ts.stddev_surrogate_regret_ub = stddev(surrogates);
      ts.mean_per_round_fairness_gap = mean(gaps);
      if (!emp.empty()) ts.mean_empirical_regret = mean(emp);
      ts.large_horizon_regime_ok =
          large_horizon_regime(cfg.instance.agents(), cfg.instance.items(), T, p_star);
      if (ts.mean_surrogate_regret_ub > 0.0)
        fit_series.emplace_back(static_cast<double>(T), ts.mean_surrogate_regret_ub);
      ps.per_t.push_back(ts);
    }
    if (fit_series.size() >= 3) ps.scaling_fit = fit_scaling_exponent(fit_series);
    summary.per_policy.push_back(std::move(ps));
  }

  detail_harness::write_file(fs::path(out_dir) / "summary.json", summary.to_json().dump(2) + "\n");

  if (cfg.plot) {
    std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> series;
    for (const auto& ps : summary.per_policy) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& ts : ps.per_t)
        pts.emplace_back(static_cast<double>(ts.T), ts.mean_surrogate_regret_ub);
      series.emplace_back(ps.policy, std::move(pts));
    }
    const std::string svg = detail_harness::svg_regret_plot(series);
    if (!svg.empty())
      detail_harness::write_file(fs::path(out_dir) / "regret_vs_T.svg", svg);
  }
  return summary;
}

// ----------------------------------------------------------------- replay --

struct ReplayResult {
  bool identical = false;
  nlohmann::json reproduced;  // the regenerated record payload
};

// Re-executes the run a persisted record came from and compares payloads.
// The stored fingerprint must match the embedded config, and the stored run
// seed must match the derivation from (master seed, policy, T, seed index).
inline ReplayResult replay_record(const nlohmann::json& record_file) {
  if (!record_file.contains("record")) throw config_error("replay: not a run record file");
  const nlohmann::json& payload = record_file.at("record");
  const nlohmann::json& config_json = payload.at("config");
  if (config_fingerprint(config_json) != payload.at("config_fingerprint").get<std::string>())
    throw config_error("replay: fingerprint mismatch (config was modified)");

  const ExperimentConfig cfg = parse_config(config_json);
  const std::string policy_name = payload.at("policy").get<std::string>();
  const long long T = payload.at("T").get<long long>();
  const int seed_index = payload.at("seed_index").get<int>();
  if (derive_run_seed(cfg.master_seed, policy_name, T, seed_index) !=
      payload.at("run_seed").get<std::uint64_t>())
    throw config_error("replay: fingerprint mismatch (stored run seed does not derive)");

  const PolicyEntry* entry = nullptr;
  for (const auto& p : cfg.policies)
    if (p.name() == policy_name) entry = &p;
  if (entry == nullptr) throw config_error("replay: policy not present in the embedded config");

  std::optional<double> opt;
  if (payload.contains("empirical_opt")) opt = estimate_empirical_opt(cfg, T);

  const RunOutput out = execute_run(cfg, *entry, T, seed_index, opt);
  ReplayResult res;
  res.reproduced = out.payload;
  res.identical = out.payload.dump() == payload.dump();
  return res;
}

inline ReplayResult replay_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("replay: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return replay_record(j);
}

}  // namespace bmmfa
