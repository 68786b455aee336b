#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <vector>

#include "bmmfa/allocator.hpp"
#include "bmmfa/matroid.hpp"

using namespace bmmfa;

TEST_CASE("independence basics") {
  const FreeMatroid free_m(4);
  CHECK(is_independent(free_m, ElementSet{}));
  CHECK(is_independent(free_m, ElementSet{0, 1, 2, 3}));

  // two blocks {0,1} and {2,3}, capacity 1 each
  const PartitionMatroid part(4, {0, 0, 1, 1}, {1, 1});
  CHECK(is_independent(part, ElementSet{}));
  CHECK(is_independent(part, ElementSet{0, 2}));
  CHECK_FALSE(is_independent(part, ElementSet{0, 1}));

  const UniformMatroid unif(5, 2);
  CHECK(is_independent(unif, ElementSet{1, 3}));
  CHECK_FALSE(is_independent(unif, ElementSet{0, 1, 2}));

  CHECK_THROWS_AS(is_independent(free_m, ElementSet{4}), input_error);
  CHECK_THROWS_AS(is_independent(free_m, ElementSet{1, 1}), input_error);
}

TEST_CASE("rank via greedy") {
  const PartitionMatroid part(6, {0, 0, 0, 1, 1, 1}, {2, 1});
  CHECK(rank(part, ElementSet{}) == 0);
  CHECK(rank(part, ElementSet{0, 1, 2, 3, 4, 5}) == 3);  // min(3,2) + min(3,1)
  const UniformMatroid unif(5, 2);
  CHECK(rank(unif, ElementSet{0, 1, 2, 3, 4}) == 2);
}

TEST_CASE("axiom validator accepts matroids and rejects non-matroids") {
  CHECK(validate_matroid_axioms(FreeMatroid(6)).ok);
  CHECK(validate_matroid_axioms(UniformMatroid(7, 3)).ok);
  CHECK(validate_matroid_axioms(PartitionMatroid(6, {0, 0, 1, 1, 2, 2}, {1, 2, 0})).ok);

  const PredicateMatroid no_empty(3, [](std::span<const int> s) { return !s.empty(); });
  CHECK_FALSE(validate_matroid_axioms(no_empty).ok);

  // downward-closed but the exchange property fails: {0,1} independent while
  // {2} cannot be extended into it
  const PredicateMatroid not_exchange(3, [](std::span<const int> s) {
    if (s.size() > 2) return false;
    if (s.size() == 2) return s[0] == 0 && s[1] == 1;
    return true;
  });
  const auto report = validate_matroid_axioms(not_exchange);
  CHECK_FALSE(report.ok);
  CHECK(report.violation == "exchange property fails");

  CHECK_THROWS_AS(validate_matroid_axioms(FreeMatroid(15)), input_error);
}

TEST_CASE("intersection with a free matroid reduces to the per-item argmax") {
  // ground set = 2 agents x 3 items; partner matroid caps each item block at 1
  const int n = 2, m = 3;
  std::vector<int> item_block(static_cast<size_t>(n * m));
  for (int id = 0; id < n * m; ++id) item_block[static_cast<size_t>(id)] = item_of_ground(id, m);
  const PartitionMatroid per_item(n * m, item_block, {1, 1, 1});
  const FreeMatroid free_m(n * m);

  CounterRng rng(RngHandle{88, 0});
  for (int rep = 0; rep < 50; ++rep) {
    Grid<double> ucbs(n, m);
    std::vector<double> u(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      u[static_cast<size_t>(i)] = rng.next_unit() * 20.0;
      for (int e = 0; e < m; ++e) ucbs(i, e) = 0.05 + 0.95 * rng.next_unit();
    }
    const double eps = 0.25;
    std::vector<double> w(static_cast<size_t>(n * m));
    for (int i = 0; i < n; ++i)
      for (int e = 0; e < m; ++e)
        w[static_cast<size_t>(ground_id(i, e, m))] =
            std::exp(u[static_cast<size_t>(i)] / m * std::log1p(-eps)) * ucbs(i, e);

    const ElementSet picked = max_weight_common_independent(free_m, per_item, w);
    const Allocation alloc = choose_allocation_from_values(ucbs, u, eps);
    REQUIRE(picked.size() == static_cast<size_t>(m));
    for (int id : picked)
      REQUIRE(alloc.owner[static_cast<size_t>(item_of_ground(id, m))] == agent_of_ground(id, m));
  }
}

TEST_CASE("two cap-1 partitions give the assignment optimum") {
  // n = m = 2; weights w(i,e) = [[2,1],[1,2]]; the best matching takes the
  // diagonal with value 4 (brute force over all 16 subsets agrees).
  std::vector<int> item_block{0, 1, 0, 1};   // id = i*m+e -> item e
  std::vector<int> agent_block{0, 0, 1, 1};  // id -> agent i
  const PartitionMatroid per_item(4, item_block, {1, 1});
  const PartitionMatroid per_agent(4, agent_block, {1, 1});
  const std::vector<double> w{2, 1, 1, 2};

  const ElementSet best = max_weight_common_independent(per_item, per_agent, w);
  double total = 0.0;
  for (int id : best) total += w[static_cast<size_t>(id)];
  CHECK(total == 4.0);
  const ElementSet brute = brute_force_common_independent(per_item, per_agent, w);
  double brute_total = 0.0;
  for (int id : brute) brute_total += w[static_cast<size_t>(id)];
  CHECK(brute_total == 4.0);
}

TEST_CASE("all-zero weights admit the empty optimum") {
  const FreeMatroid a(5);
  const UniformMatroid b(5, 3);
  const std::vector<double> w(5, 0.0);
  CHECK(max_weight_common_independent(a, b, w).empty());
  CHECK(brute_force_common_independent(a, b, w).empty());
}

namespace {

std::unique_ptr<MatroidOracle> random_matroid(CounterRng& rng, int ground) {
  switch (rng.next_below(3)) {
    case 0: {
      std::vector<int> block_of(static_cast<size_t>(ground));
      const int blocks = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(ground)));
      std::vector<int> caps(static_cast<size_t>(blocks));
      for (auto& c : caps) c = static_cast<int>(rng.next_below(3));
      for (auto& b : block_of) b = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(blocks)));
      return std::make_unique<PartitionMatroid>(ground, std::move(block_of), std::move(caps));
    }
    case 1:
      return std::make_unique<UniformMatroid>(ground, static_cast<int>(rng.next_below(static_cast<std::uint64_t>(ground) + 1)));
    default:
      return std::make_unique<FreeMatroid>(ground);
  }
}

}  // namespace

TEST_CASE("intersection matches brute force on random instances") {
  CounterRng rng(RngHandle{999, 0});
  for (int rep = 0; rep < 100; ++rep) {
    const int ground = 4 + static_cast<int>(rng.next_below(9));  // 4..12
    const auto m1 = random_matroid(rng, ground);
    const auto m2 = random_matroid(rng, ground);
    std::vector<double> w(static_cast<size_t>(ground));
    for (auto& x : w) x = rng.next_below(5) == 0 ? 0.0 : rng.next_unit();

    const ElementSet fast = max_weight_common_independent(*m1, *m2, w);
    const ElementSet brute = brute_force_common_independent(*m1, *m2, w);
    REQUIRE(is_independent(*m1, fast));
    REQUIRE(is_independent(*m2, fast));
    double fast_w = 0.0, brute_w = 0.0;
    for (int id : fast) fast_w += w[static_cast<size_t>(id)];
    for (int id : brute) brute_w += w[static_cast<size_t>(id)];
    REQUIRE(fast_w == Catch::Approx(brute_w).margin(1e-9));
  }
}

TEST_CASE("matroid spec builders") {
  // agent_cap: 2 agents x 3 items, cap 2 per agent
  MatroidSpec spec;
  spec.kind = MatroidSpec::Kind::agent_cap;
  spec.per_agent_cap = 2;
  const auto oracle = build_matroid(2, 3, spec);
  CHECK(is_independent(*oracle, ElementSet{0, 1}));        // two items of agent 0
  CHECK_FALSE(is_independent(*oracle, ElementSet{0, 1, 2}));
  CHECK(is_independent(*oracle, ElementSet{0, 1, 3, 4}));  // two per agent
  CHECK(validate_matroid_axioms(*oracle).ok);

  // category: items 0,1 in category 0 (cap 1), item 2 in category 1 (cap 1)
  MatroidSpec cat;
  cat.kind = MatroidSpec::Kind::category;
  cat.category_of = {0, 0, 1};
  cat.caps = {1, 1};
  const auto cat_oracle = build_matroid(2, 3, cat);
  CHECK_FALSE(is_independent(*cat_oracle, ElementSet{0, 1}));  // agent 0, both cat-0 items
  CHECK(is_independent(*cat_oracle, ElementSet{0, 2}));
  CHECK(is_independent(*cat_oracle, ElementSet{0, 4}));  // different agents
  CHECK(validate_matroid_axioms(*cat_oracle).ok);

  // explicit partition must cover the ground set exactly once
  MatroidSpec part;
  part.kind = MatroidSpec::Kind::partition;
  part.blocks = {{0, 1}, {2}};
  part.caps = {1, 1};
  CHECK_THROWS_AS(build_matroid(2, 2, part), input_error);  // element 3 uncovered
  part.blocks = {{0, 1}, {2, 3}};
  CHECK(validate_matroid_axioms(*build_matroid(2, 2, part)).ok);

  // capacity rows for the LP relaxation
  MatroidSpec unif;
  unif.kind = MatroidSpec::Kind::uniform;
  unif.rank = 3;
  const auto rows = lp_capacity_rows(2, 3, unif);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].first.size() == 6);
  CHECK(rows[0].second == 3.0);
}
