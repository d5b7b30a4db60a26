#include <doctest.h>

#include <cmath>
#include <random>

#include "mmlbn/report.hpp"
#include "oracles.hpp"

using namespace mmlbn;
using nlohmann::json;

namespace {

DiscreteDataset chain_data(int n, std::uint64_t seed) {
  return oracle::sample_network(
      {2, 3, 2}, {{}, {0}, {1}},
      [](int v, const std::vector<int>& pv) -> std::vector<double> {
        if (v == 0) return {0.4, 0.6};
        if (v == 1) return pv[0] ? std::vector<double>{0.1, 0.2, 0.7} : std::vector<double>{0.6, 0.3, 0.1};
        return pv[0] == 2 ? std::vector<double>{0.85, 0.15} : std::vector<double>{0.2, 0.8};
      },
      n, seed);
}

SamplerConfig quick() {
  SamplerConfig c;
  c.iterations = 3000;
  c.burn_in = 200;
  c.seed = 3;
  c.top_k = 4;
  return c;
}

}  // namespace

TEST_CASE("learn report schema") {
  const auto ds = chain_data(300, 1);
  const auto cfg = quick();
  const auto rep = run_sampler(ds, cfg);
  const json j = report_to_json(rep, ds, cfg);
  CHECK(j["command"] == "learn");
  CHECK(j["config"]["model"] == "dual");
  CHECK(j["config"]["iterations"] == 3000);
  CHECK(j["cases"] == 300);
  CHECK(j["variables"].size() == 3);
  CHECK(j["total_samples"] == 2800);
  REQUIRE(j["classes"].size() == rep.classes.size());
  CHECK(j["classes"].size() <= 4);
  double wsum = 0.0;
  for (const auto& c : j["classes"]) {
    CHECK(c.contains("arcs"));
    CHECK(c.contains("visits"));
    CHECK(c.contains("best_length"));
    CHECK(c["per_node"].size() == 3);
    for (const auto& n : c["per_node"]) {
      CHECK(n["model"].is_string());
      CHECK(n["params"].get<int>() >= 1);
    }
    wsum += c["normalized_weight"].get<double>();
  }
  CHECK(wsum == doctest::Approx(1.0));
  CHECK(j["summary"]["message_length"].is_number());
}

TEST_CASE("serialized structures rescore identically") {
  const auto ds = chain_data(300, 2);
  const auto cfg = quick();
  const auto rep = run_sampler(ds, cfg);
  const json j = json::parse(report_to_json(rep, ds, cfg).dump());
  ScoringContext ctx(ds, cfg.scoring());
  for (std::size_t c = 0; c < rep.classes.size(); ++c) {
    const auto back = dag_from_json(3, j["classes"][c]["arcs"]);
    CHECK(back == rep.classes[c].best_network);
    CHECK(ctx.network_length(back) == j["classes"][c]["best_length"].get<double>());
  }
}

TEST_CASE("score report for the empty network") {
  const auto ds = DiscreteDataset::from_rows({2, 2}, {});
  const json j = score_to_json(DagStructure(2), ds, 0.5, 3.0);
  CHECK(j["command"] == "score");
  CHECK(j["arcs"].empty());
  CHECK(j["log_prior"].get<double>() == doctest::Approx(std::log(0.5)));
  CHECK(j["lengths"]["tbn"].get<double>() == doctest::Approx(1.0461175971812904).epsilon(1e-13));
  CHECK(j["lengths"]["dual"].get<double>() == j["lengths"]["tbn"].get<double>());
  CHECK(j["errors"].empty());
}

TEST_CASE("score report marks policies that cannot score a structure") {
  std::vector<int> arities(16, 2);
  arities[0] = 3;
  std::vector<std::vector<int>> rows(20, std::vector<int>(16, 0));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int v = 0; v < 16; ++v) rows[r][v] = static_cast<int>((r + v) % 2);
  const auto ds = DiscreteDataset::from_rows(arities, rows);
  std::vector<std::vector<int>> ps(16);
  for (int p = 1; p < 16; ++p) ps[0].push_back(p);
  const json j = score_to_json(DagStructure(16, ps), ds, 0.5, 3.0);
  CHECK(j["lengths"]["tbn"].is_null());
  CHECK(j["errors"].contains("tbn"));
  CHECK(j["lengths"]["fon"].is_number());
  CHECK(j["lengths"]["dual"].is_number());
}

TEST_CASE("eval summary schema") {
  const auto ds = chain_data(80, 4);
  auto cfg = quick();
  cfg.iterations = 800;
  cfg.burn_in = 50;
  const auto summary = cross_validate(ds, 2, cfg);
  const json j = summary_to_json(summary, ds, cfg);
  CHECK(j["command"] == "eval");
  CHECK(j["repeats"] == 2);
  REQUIRE(j["runs"].size() == 2);
  for (const auto& r : j["runs"]) {
    CHECK(r["train_size"] == 72);
    CHECK(r["test_size"] == 8);
    CHECK(r["test_nll"].get<double>() > 0.0);
  }
  CHECK(j["mean"]["test_nll"].get<double>() == doctest::Approx(summary.mean_test_nll));
}
