#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>

#include "mmlbn/cpt_full.hpp"
#include "mmlbn/error.hpp"
#include "mmlbn/scoring.hpp"
#include "oracles.hpp"

using namespace mmlbn;

namespace {

DiscreteDataset random_dataset(std::size_t n, const std::vector<int>& arities, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> rows(n, std::vector<int>(arities.size()));
  for (auto& row : rows)
    for (std::size_t i = 0; i < arities.size(); ++i)
      row[i] = static_cast<int>(rng() % static_cast<std::uint64_t>(arities[i]));
  return DiscreteDataset::from_rows(arities, rows);
}

double node_by_policy(const DiscreteDataset& ds, int child, const std::vector<int>& parents,
                      ModelPolicy policy) {
  return node_length(counts_for(ds, child, parents), policy, static_cast<int>(parents.size())).length;
}

}  // namespace

TEST_CASE("policy names") {
  CHECK(parse_policy("tbn") == ModelPolicy::TBN);
  CHECK(parse_policy("FON") == ModelPolicy::FON);
  CHECK(parse_policy("dual") == ModelPolicy::DUAL);
  CHECK(parse_policy("DN") == ModelPolicy::DUAL);
  CHECK_THROWS_AS(parse_policy("greedy"), Error);
  CHECK(std::string(policy_name(ModelPolicy::FON)) == "fon");
}

TEST_CASE("dual selection adds one bit to the shorter model") {
  const NodeScore full{100.0, LocalModel::Full, 7};
  const NodeScore fom{90.0, LocalModel::Fom, 3};
  const auto s = select_dual(full, fom);
  CHECK(s.length == doctest::Approx(90.69314718055995).epsilon(1e-14));
  CHECK(s.chosen_model == LocalModel::Fom);
  CHECK(s.parameter_count == 3);

  const auto tie = select_dual({42.0, LocalModel::Full, 4}, {42.0, LocalModel::Fom, 2});
  CHECK(tie.chosen_model == LocalModel::Full);
  CHECK(tie.length == 42.0 + std::log(2.0));
}

TEST_CASE("dual with at most one parent is the full table") {
  const auto ds = random_dataset(200, {3, 2, 4}, 1);
  for (const std::vector<int>& ps : {std::vector<int>{}, std::vector<int>{1}, std::vector<int>{2}}) {
    const auto counts = counts_for(ds, 0, ps);
    const auto dual = node_length(counts, ModelPolicy::DUAL, static_cast<int>(ps.size()));
    const auto tbn = node_length(counts, ModelPolicy::TBN, static_cast<int>(ps.size()));
    CHECK(dual.length == tbn.length);
    CHECK(dual.chosen_model == LocalModel::Full);
    CHECK(dual.parameter_count == tbn.parameter_count);
  }
}

TEST_CASE("dual law on random nodes with several parents") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const std::vector<int> arities{2 + static_cast<int>(rng() % 2), 2, 3, 2, 2};
    const auto ds = random_dataset(50 + rng() % 300, arities, rng());
    std::vector<int> ps{1, 2};
    if (trial % 2) ps.push_back(3);
    if (trial % 3 == 0) ps.push_back(4);
    const double tbn = node_by_policy(ds, 0, ps, ModelPolicy::TBN);
    const double fon = node_by_policy(ds, 0, ps, ModelPolicy::FON);
    const auto dual = node_length(counts_for(ds, 0, ps), ModelPolicy::DUAL, static_cast<int>(ps.size()));
    CHECK(dual.length == std::min(tbn, fon) + std::log(2.0));
    CHECK(dual.chosen_model == (tbn <= fon ? LocalModel::Full : LocalModel::Fom));
  }
}

TEST_CASE("parameter counts follow the chosen model") {
  const auto ds = random_dataset(100, {3, 2, 3}, 3);
  const std::vector<int> ps{1, 2};
  const auto counts = counts_for(ds, 0, ps);
  CHECK(node_length(counts, ModelPolicy::TBN, 2).parameter_count == 12);
  CHECK(node_length(counts, ModelPolicy::FON, 2).parameter_count == 8);
}

TEST_CASE("empty network with no data") {
  const auto ds = DiscreteDataset::from_rows({2, 2}, {});
  const double len = network_message_length(DagStructure(2), ds, ModelPolicy::TBN, 0.5, 3.0,
                                            std::make_shared<ScoreCache>());
  CHECK(len == doctest::Approx(1.0461175971812904).epsilon(1e-13));
}

TEST_CASE("a cached rescore performs no fits") {
  const auto ds = random_dataset(300, {2, 3, 2, 2}, 4);
  auto cache = std::make_shared<ScoreCache>();
  const auto dag = DagStructure::from_arcs(4, std::vector<Arc>{{0, 1}, {2, 1}, {1, 3}});
  const double first = network_message_length(dag, ds, ModelPolicy::DUAL, 0.5, 3.0, cache);
  const auto fits = cache->computations();
  CHECK(fits == 4);
  const double second = network_message_length(dag, ds, ModelPolicy::DUAL, 0.5, 3.0, cache);
  CHECK(second == first);
  CHECK(cache->computations() == fits);
  CHECK(cache->size() == 4);
}

TEST_CASE("cached and uncached scores are identical") {
  const auto ds = random_dataset(200, {2, 3, 2, 4}, 5);
  std::mt19937_64 rng(6);
  auto shared = std::make_shared<ScoreCache>();
  for (ModelPolicy policy : {ModelPolicy::TBN, ModelPolicy::FON, ModelPolicy::DUAL})
    for (int trial = 0; trial < 10; ++trial) {
      const auto dag = oracle::from_matrix(oracle::random_dag(4, 0.5, rng));
      const double a = network_message_length(dag, ds, policy, 0.3, 3.0, shared);
      const double b = network_message_length(dag, ds, policy, 0.3, 3.0, std::make_shared<ScoreCache>());
      CHECK(a == b);
    }
}

TEST_CASE("score decomposes over nodes and the structure prior") {
  const auto ds = random_dataset(250, {2, 3, 2, 2}, 7);
  std::mt19937_64 rng(8);
  for (ModelPolicy policy : {ModelPolicy::TBN, ModelPolicy::FON, ModelPolicy::DUAL}) {
    ScoringContext ctx(ds, {policy, 0.4, 3.0});
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = oracle::random_dag(4, 0.5, rng);
      const auto d1 = oracle::from_matrix(a);
      double manual = -structure_log_prior(d1, 0.4);
      for (int v = 0; v < 4; ++v) manual += ctx.node(v, d1.parents(v)).length;
      CHECK(ctx.network_length(d1) == doctest::Approx(manual).epsilon(1e-12));

      // Change one node's parent set and compare differences.
      const int y = static_cast<int>(rng() % 4);
      for (int p = 0; p < 4; ++p) {
        if (p == y || !d1.has_arc(p, y)) continue;
        const auto d2 = d1.without_arc(p, y);
        const double lhs = ctx.network_length(d2) - ctx.network_length(d1);
        const double rhs = ctx.node(y, d2.parents(y)).length - ctx.node(y, d1.parents(y)).length -
                           structure_log_prior(d2, 0.4) + structure_log_prior(d1, 0.4);
        CHECK(std::abs(lhs - rhs) <= 1e-10);
      }
    }
  }
}

TEST_CASE("oversized full tables score infinite under TBN only") {
  // Ternary child with fifteen binary parents: 2 * 2^15 full-table parameters.
  std::vector<int> arities(16, 2);
  arities[0] = 3;
  const auto ds = random_dataset(40, arities, 9);
  std::vector<std::vector<int>> ps(16);
  for (int p = 1; p < 16; ++p) ps[0].push_back(p);
  const DagStructure dag(16, ps);

  ScoringContext tbn(ds, {ModelPolicy::TBN, 0.5, 3.0});
  CHECK(std::isinf(tbn.score_or_inf(dag)));
  try {
    tbn.node(0, ps[0]);
    FAIL("expected a parameter cap error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParameterCap);
  }
  // Failure is cached: asking again performs no new work.
  const auto before = tbn.cache().computations();
  CHECK_THROWS_AS(tbn.node(0, ps[0]), Error);
  CHECK(tbn.cache().computations() == before);

  ScoringContext dual(ds, {ModelPolicy::DUAL, 0.5, 3.0});
  const auto s = dual.node(0, ps[0]);
  CHECK(s.chosen_model == LocalModel::Fom);
  ScoringContext fon(ds, {ModelPolicy::FON, 0.5, 3.0});
  CHECK(s.length == fon.node(0, ps[0]).length + std::log(2.0));
  CHECK(std::isfinite(dual.score_or_inf(dag)));
}

TEST_CASE("one cache serves several threads") {
  const auto ds = random_dataset(300, {2, 3, 2, 2, 3}, 10);
  auto cache = std::make_shared<ScoreCache>();
  std::mt19937_64 rng(11);
  std::vector<DagStructure> dags;
  for (int i = 0; i < 40; ++i) dags.push_back(oracle::from_matrix(oracle::random_dag(5, 0.4, rng)));
  std::vector<std::vector<double>> results(4, std::vector<double>(dags.size()));
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&, t] {
      ScoringContext ctx(ds, {ModelPolicy::DUAL, 0.5, 3.0}, cache);
      for (std::size_t i = 0; i < dags.size(); ++i) results[t][i] = ctx.network_length(dags[i]);
    });
  for (auto& th : threads) th.join();
  ScoringContext fresh(ds, {ModelPolicy::DUAL, 0.5, 3.0});
  for (std::size_t i = 0; i < dags.size(); ++i) {
    const double expect = fresh.network_length(dags[i]);
    for (int t = 0; t < 4; ++t) CHECK(results[t][i] == expect);
  }
}
