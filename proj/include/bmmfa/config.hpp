#pragma once

// Experiment configuration: JSON schema v1, validation with field-level
// error messages, instance construction, and content fingerprinting.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bmmfa/adversary.hpp"
#include "bmmfa/allocator.hpp"
#include "bmmfa/core.hpp"
#include "bmmfa/matroid.hpp"

namespace bmmfa {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k) {
    out[static_cast<size_t>(k)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// Strips fields that cannot affect run results (where artifacts land, how
// many workers, whether a plot is drawn), so records produced by different
// runtime setups compare equal.
inline nlohmann::json canonical_config(nlohmann::json j) {
  if (j.is_object()) {
    j.erase("output_dir");
    j.erase("threads");
    j.erase("plot");
  }
  return j;
}

// Stable under key reordering: nlohmann::json objects iterate in sorted key
// order, so the compact dump of the canonical form is a content hash.
inline std::string config_fingerprint(const nlohmann::json& config) {
  return hex64(fnv1a64(canonical_config(config).dump()));
}

// Per-run seed; derived so that adding policies, horizons, or seeds never
// perturbs existing runs.
inline std::uint64_t derive_run_seed(std::uint64_t master_seed, std::string_view policy,
                                     long long T, int seed_index) {
  std::string key = std::to_string(master_seed);
  key += '|';
  key += policy;
  key += '|';
  key += std::to_string(T);
  key += '|';
  key += std::to_string(seed_index);
  return fnv1a64(key);
}

struct InstanceSpec {
  enum class Type { explicit_dists, adversary };
  Type type = Type::explicit_dists;

  // explicit_dists
  std::vector<std::vector<DistributionSpec>> dists;

  // adversary
  int adv_n = 0;
  int adv_b = 0;
  double adv_eps = -1.0;  // -1 = auto: 1/(8 sqrt(T))
  bool alpha_random = true;
  BlockAssignment alpha;  // used when alpha_random is false
  std::optional<int> erase_block;

  [[nodiscard]] int agents() const {
    return type == Type::adversary ? adv_n : static_cast<int>(dists.size());
  }
  [[nodiscard]] int items() const {
    return type == Type::adversary ? adv_n * adv_b
                                   : (dists.empty() ? 0 : static_cast<int>(dists[0].size()));
  }
};

struct PolicyEntry {
  PolicyKind kind = PolicyKind::discounted_ucb;
  Allocation fixed_owner;  // for PolicyKind::fixed

  [[nodiscard]] std::string name() const { return to_string(kind); }
};

struct ExperimentConfig {
  InstanceSpec instance;
  std::vector<PolicyEntry> policies;
  std::vector<long long> t_grid;
  int seeds = 1;
  std::uint64_t master_seed = 1;
  double c_rad = 0.0;  // 0 = default_c_rad(n, m, T)
  EpsilonSchedule schedule = EpsilonSchedule::general;
  double manual_epsilon = 0.0;
  bool clip_ucb = true;
  bool u_from_observed = false;
  std::optional<MatroidSpec> matroid;
  std::string output_dir;  // empty = $BMMFA_OUT or "bmmfa_out"
  int threads = 0;         // 0 = hardware concurrency; $BMMFA_THREADS overrides
  bool record_traces = true;
  bool plot = false;
  int empirical_opt_seeds = 0;  // adversary instances: Monte-Carlo OPT estimate

  nlohmann::json raw;  // the parsed config, canonical source for fingerprints
};

namespace detail_config {

[[noreturn]] inline void fail(const std::string& field, const std::string& why) {
  throw config_error("config." + field + ": " + why);
}

inline double require_number(const nlohmann::json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

inline DistributionSpec parse_dist(const nlohmann::json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("kind")) fail(field, "expected {\"kind\": ...}");
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "bernoulli") return DistributionSpec::bernoulli(require_number(j.at("p"), field + ".p"));
    if (kind == "beta")
      return DistributionSpec::beta(require_number(j.at("alpha"), field + ".alpha"),
                                    require_number(j.at("beta"), field + ".beta"));
    if (kind == "point") return DistributionSpec::point(require_number(j.at("v"), field + ".v"));
  } catch (const input_error& err) {
    fail(field, err.what());
  } catch (const nlohmann::json::exception&) {
    fail(field, "missing parameter for kind '" + kind + "'");
  }
  fail(field, "unknown distribution kind '" + kind + "'");
}

inline nlohmann::json dist_to_json(const DistributionSpec& d) {
  switch (d.kind) {
    case DistKind::bernoulli: return {{"kind", "bernoulli"}, {"p", d.a}};
    case DistKind::beta: return {{"kind", "beta"}, {"alpha", d.a}, {"beta", d.b}};
    case DistKind::point: return {{"kind", "point"}, {"v", d.a}};
  }
  return {};
}

inline InstanceSpec parse_instance(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type")) fail("instance", "expected {\"type\": ...}");
  std::string type = j.at("type").get<std::string>();

  // presets expand to the two base types
  if (type == "preset") {
    if (!j.contains("name")) fail("instance.name", "preset name required");
    std::string name = j.at("name").get<std::string>();
    int n = j.value("n", 2), m = j.value("m", 2), b = j.value("b", 2);
    // accept the call-style sugar "hard(2,3)"
    if (const auto open = name.find('('); open != std::string::npos) {
      const auto close = name.find(')', open);
      if (close == std::string::npos) fail("instance.name", "unbalanced parentheses");
      const std::string args = name.substr(open + 1, close - open - 1);
      const auto comma = args.find(',');
      if (comma == std::string::npos) fail("instance.name", "expected two arguments");
      n = std::stoi(args.substr(0, comma));
      b = std::stoi(args.substr(comma + 1));
      m = b;  // for symmetric(n,m) sugar the second argument is m
      name = name.substr(0, open);
    }
    InstanceSpec spec;
    if (name == "footnote2") {
      spec.type = InstanceSpec::Type::explicit_dists;
      spec.dists = {{DistributionSpec::point(1.0), DistributionSpec::point(0.1)},
                    {DistributionSpec::point(1.0), DistributionSpec::point(0.1)}};
      return spec;
    }
    if (name == "symmetric") {
      if (n < 1 || m < 1) fail("instance", "symmetric preset needs n, m >= 1");
      spec.type = InstanceSpec::Type::explicit_dists;
      spec.dists.assign(static_cast<size_t>(n),
                        std::vector<DistributionSpec>(static_cast<size_t>(m),
                                                      DistributionSpec::bernoulli(0.5)));
      return spec;
    }
    if (name == "hard") {
      if (n < 1 || b < 1) fail("instance", "hard preset needs n, b >= 1");
      spec.type = InstanceSpec::Type::adversary;
      spec.adv_n = n;
      spec.adv_b = b;
      spec.adv_eps = -1.0;
      spec.alpha_random = true;
      return spec;
    }
    fail("instance.name", "unknown preset '" + name + "'");
  }

  InstanceSpec spec;
  if (type == "explicit") {
    spec.type = InstanceSpec::Type::explicit_dists;
    if (!j.contains("dists") || !j.at("dists").is_array() || j.at("dists").empty())
      fail("instance.dists", "expected a nonempty array of rows");
    size_t m = 0;
    for (size_t i = 0; i < j.at("dists").size(); ++i) {
      const auto& row = j.at("dists").at(i);
      if (!row.is_array() || row.empty()) fail("instance.dists", "rows must be nonempty arrays");
      if (i == 0) m = row.size();
      if (row.size() != m) fail("instance.dists", "rows must have equal length");
      std::vector<DistributionSpec> parsed;
      for (size_t e = 0; e < row.size(); ++e)
        parsed.push_back(parse_dist(row.at(e), "instance.dists[" + std::to_string(i) + "][" +
                                                   std::to_string(e) + "]"));
      spec.dists.push_back(std::move(parsed));
    }
    if (j.contains("means")) {
      const auto& means = j.at("means");
      if (!means.is_array() || means.size() != spec.dists.size())
        fail("instance.means", "shape mismatch with dists");
      for (size_t i = 0; i < means.size(); ++i)
        for (size_t e = 0; e < spec.dists[i].size(); ++e) {
          const double declared = means.at(i).at(e).get<double>();
          if (std::abs(declared - spec.dists[i][e].mean()) > 1e-12)
            fail("instance.means", "inconsistent with the distributions");
        }
    }
    return spec;
  }

  if (type == "adversary" || type == "alpha") {
    spec.type = InstanceSpec::Type::adversary;
    spec.adv_n = j.value("n", 0);
    spec.adv_b = j.value("b", 0);
    if (spec.adv_n < 1) fail("instance.n", "must be >= 1");
    if (spec.adv_b < 1) fail("instance.b", "must be >= 1");
    if (!j.contains("eps") || (j.at("eps").is_string() && j.at("eps").get<std::string>() == "auto"))
      spec.adv_eps = -1.0;
    else {
      spec.adv_eps = require_number(j.at("eps"), "instance.eps");
      if (!(spec.adv_eps >= 0.0 && spec.adv_eps <= 0.25))
        fail("instance.eps", "must be in [0, 1/4] or \"auto\"");
    }
    if (!j.contains("alpha") ||
        (j.at("alpha").is_string() && j.at("alpha").get<std::string>() == "random"))
      spec.alpha_random = true;
    else {
      spec.alpha_random = false;
      const auto& rows = j.at("alpha");
      if (!rows.is_array() || rows.size() != static_cast<size_t>(spec.adv_b))
        fail("instance.alpha", "expected b rows");
      std::vector<std::vector<int>> parsed;
      for (const auto& row : rows) parsed.push_back(row.get<std::vector<int>>());
      try {
        spec.alpha = BlockAssignment(spec.adv_n, spec.adv_b, std::move(parsed));
      } catch (const input_error& err) {
        fail("instance.alpha", err.what());
      }
    }
    if (j.contains("erase_block")) {
      const int k = j.at("erase_block").get<int>();
      if (k < 0 || k >= spec.adv_b) fail("instance.erase_block", "out of range");
      spec.erase_block = k;
    }
    return spec;
  }

  fail("instance.type", "unknown type '" + type + "'");
}

inline PolicyEntry parse_policy(const nlohmann::json& j, const std::string& field) {
  PolicyEntry entry;
  std::string kind;
  if (j.is_string())
    kind = j.get<std::string>();
  else if (j.is_object() && j.contains("kind"))
    kind = j.at("kind").get<std::string>();
  else
    fail(field, "expected a policy name or {\"kind\": ...}");

  if (kind == "discounted_ucb")
    entry.kind = PolicyKind::discounted_ucb;
  else if (kind == "discounted_ucb_matroid")
    entry.kind = PolicyKind::discounted_ucb_matroid;
  else if (kind == "ucb_greedy")
    entry.kind = PolicyKind::ucb_greedy;
  else if (kind == "round_robin")
    entry.kind = PolicyKind::round_robin;
  else if (kind == "oracle_discounted")
    entry.kind = PolicyKind::oracle_discounted;
  else if (kind == "fixed") {
    entry.kind = PolicyKind::fixed;
    if (!j.is_object() || !j.contains("owner")) fail(field, "fixed policy needs an owner array");
    std::vector<std::int16_t> owner;
    for (const auto& o : j.at("owner")) owner.push_back(o.get<std::int16_t>());
    entry.fixed_owner = Allocation(std::move(owner));
  } else
    fail(field, "unknown policy '" + kind + "'");
  return entry;
}

inline MatroidSpec parse_matroid(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) fail("matroid", "expected {\"kind\": ...}");
  const std::string kind = j.at("kind").get<std::string>();
  MatroidSpec spec;
  if (kind == "free") {
    spec.kind = MatroidSpec::Kind::free;
  } else if (kind == "uniform") {
    spec.kind = MatroidSpec::Kind::uniform;
    spec.rank = j.value("rank", -1);
    if (spec.rank < 0) fail("matroid.rank", "must be a nonnegative integer");
  } else if (kind == "partition") {
    spec.kind = MatroidSpec::Kind::partition;
    if (!j.contains("blocks") || !j.contains("caps")) fail("matroid", "needs blocks and caps");
    spec.blocks = j.at("blocks").get<std::vector<std::vector<int>>>();
    spec.caps = j.at("caps").get<std::vector<int>>();
  } else if (kind == "agent_cap") {
    spec.kind = MatroidSpec::Kind::agent_cap;
    spec.per_agent_cap = j.value("cap", j.value("K", -1));
    if (spec.per_agent_cap < 0) fail("matroid.cap", "must be a nonnegative integer");
  } else if (kind == "category") {
    spec.kind = MatroidSpec::Kind::category;
    const char* assignments_key = j.contains("category_of") ? "category_of" : "assignments";
    if (!j.contains(assignments_key) || !j.contains("caps"))
      fail("matroid", "needs category_of (or assignments) and caps");
    spec.category_of = j.at(assignments_key).get<std::vector<int>>();
    spec.caps = j.at("caps").get<std::vector<int>>();
  } else
    fail("matroid.kind", "unknown kind '" + kind + "'");
  return spec;
}

}  // namespace detail_config

inline MatroidSpec parse_matroid_spec(const nlohmann::json& j) {
  return detail_config::parse_matroid(j);
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  using detail_config::fail;
  if (!j.is_object()) throw config_error("config: expected a JSON object");
  if (j.value("schema_version", 0) != 1) fail("schema_version", "expected 1");
  ExperimentConfig cfg;
  cfg.raw = canonical_config(j);

  if (!j.contains("instance")) fail("instance", "required");
  cfg.instance = detail_config::parse_instance(j.at("instance"));

  if (!j.contains("policies") || !j.at("policies").is_array() || j.at("policies").empty())
    fail("policies", "expected a nonempty array");
  for (size_t k = 0; k < j.at("policies").size(); ++k)
    cfg.policies.push_back(detail_config::parse_policy(
        j.at("policies").at(k), "policies[" + std::to_string(k) + "]"));

  if (!j.contains("T_grid") || !j.at("T_grid").is_array() || j.at("T_grid").empty())
    fail("T_grid", "expected a nonempty array");
  for (const auto& t : j.at("T_grid")) cfg.t_grid.push_back(t.get<long long>());
  for (size_t k = 0; k < cfg.t_grid.size(); ++k) {
    if (cfg.t_grid[k] < 1) fail("T_grid", "entries must be >= 1");
    if (k > 0 && cfg.t_grid[k] <= cfg.t_grid[k - 1]) fail("T_grid", "must be strictly increasing");
  }

  cfg.seeds = j.value("seeds", 1);
  if (cfg.seeds < 1) fail("seeds", "must be >= 1");
  cfg.master_seed = j.value("master_seed", static_cast<std::uint64_t>(1));

  cfg.c_rad = j.value("c_rad", 0.0);
  if (cfg.c_rad < 0.0) fail("c_rad", "must be positive (or omitted for the default)");

  if (j.contains("epsilon")) {
    const auto& eps = j.at("epsilon");
    const std::string schedule = eps.value("schedule", "general");
    if (schedule == "manual") {
      cfg.schedule = EpsilonSchedule::manual;
      cfg.manual_epsilon = eps.value("value", 0.0);
      if (!(cfg.manual_epsilon > 0.0 && cfg.manual_epsilon < 1.0))
        fail("epsilon.value", "manual schedule needs a value in (0,1)");
    } else if (schedule == "large_horizon")
      cfg.schedule = EpsilonSchedule::large_horizon;
    else if (schedule == "general")
      cfg.schedule = EpsilonSchedule::general;
    else
      fail("epsilon.schedule", "unknown schedule '" + schedule + "'");
  }

  cfg.clip_ucb = j.value("clip_ucb", true);
  cfg.u_from_observed = j.value("u_from_observed", false);
  if (j.contains("matroid") && !j.at("matroid").is_null())
    cfg.matroid = detail_config::parse_matroid(j.at("matroid"));

  cfg.output_dir = j.value("output_dir", std::string{});
  cfg.threads = j.value("threads", 0);
  if (cfg.threads < 0) fail("threads", "must be >= 0");
  cfg.record_traces = j.value("record_traces", true);
  cfg.plot = j.value("plot", false);
  cfg.empirical_opt_seeds = j.value("empirical_opt_seeds", 0);
  if (cfg.empirical_opt_seeds < 0) fail("empirical_opt_seeds", "must be >= 0");
  if (cfg.empirical_opt_seeds > 0 && cfg.instance.type != InstanceSpec::Type::adversary)
    fail("empirical_opt_seeds", "only adversary instances have a known optimal policy");

  // policies that need a matroid must have one configured
  for (const auto& p : cfg.policies)
    if (p.kind == PolicyKind::discounted_ucb_matroid && !cfg.matroid)
      fail("matroid", "required by the discounted_ucb_matroid policy");
  return cfg;
}

struct BuiltInstance {
  Instance instance;
  std::optional<BlockAssignment> alpha;  // set for adversary instances
};

// Instance for one run. Random planted assignments are drawn from the run's
// own stream, so every (policy, T, seed) triple is self-contained.
inline BuiltInstance build_instance(const ExperimentConfig& cfg, long long T, RngHandle run_rng) {
  const InstanceSpec& spec = cfg.instance;
  if (spec.type == InstanceSpec::Type::explicit_dists) {
    const int n = spec.agents(), m = spec.items();
    Grid<DistributionSpec> dists(n, m);
    for (int i = 0; i < n; ++i)
      for (int e = 0; e < m; ++e)
        dists(i, e) = spec.dists[static_cast<size_t>(i)][static_cast<size_t>(e)];
    return {Instance(n, m, T, std::move(dists)), std::nullopt};
  }
  const double eps = spec.adv_eps < 0.0 ? hard_instance_epsilon(T) : spec.adv_eps;
  const BlockAssignment alpha = spec.alpha_random
                                    ? BlockAssignment::random(spec.adv_n, spec.adv_b, run_rng)
                                    : spec.alpha;
  Instance inst = spec.erase_block
                      ? make_planted_instance_erased(spec.adv_n, spec.adv_b, eps, alpha,
                                                     *spec.erase_block, T)
                      : make_planted_instance(spec.adv_n, spec.adv_b, eps, alpha, T);
  return {std::move(inst), alpha};
}

}  // namespace bmmfa
