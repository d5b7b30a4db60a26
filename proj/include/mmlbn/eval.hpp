#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mmlbn/cpt_full.hpp"
#include "mmlbn/dataset.hpp"
#include "mmlbn/fom.hpp"
#include "mmlbn/graph.hpp"
#include "mmlbn/sampler.hpp"
#include "mmlbn/scoring.hpp"

namespace mmlbn {

struct FittedNode {
  LocalModel model = LocalModel::Full;
  std::vector<int> parents;
  ConditionalTable table;  // model == Full
  FomParams fom;           // model == Fom
  std::uint64_t parameter_count = 0;
};

struct FittedNetwork {
  DagStructure dag;
  std::vector<FittedNode> nodes;
  std::uint64_t parameter_count = 0;
};

/// Fits each node with the local model the scoring policy would select.
FittedNetwork fit_network(const DagStructure& dag, const DiscreteDataset& train,
                          ModelPolicy policy, double sigma = kDefaultSigma,
                          std::shared_ptr<ScoreCache> cache = nullptr);

double case_log_prob(const FittedNetwork& net, std::span<const int> full_case);

/// Class weights visits / sum(visits) over the report's classes.
std::vector<double> posterior_weights(const PosteriorReport& report);

/// Sum over test cases of -log sum_c w_c P_c(case).
double model_averaged_test_nll(const PosteriorReport& report, const DiscreteDataset& train,
                               const DiscreteDataset& test, ModelPolicy policy,
                               double sigma = kDefaultSigma,
                               std::shared_ptr<ScoreCache> cache = nullptr);

struct RunMetrics {
  std::uint64_t seed = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double message_length = 0.0;  // posterior weighted best lengths, nits
  double test_nll = 0.0;        // nits
  double arcs = 0.0;
  double parameters = 0.0;
  PosteriorReport report;
};

struct EvalSummary {
  std::vector<RunMetrics> runs;
  double mean_message_length = 0.0;
  double mean_test_nll = 0.0;
  double mean_arcs = 0.0;
  double mean_parameters = 0.0;
};

/// Posterior-weighted message length, arc and parameter counts of a report.
RunMetrics weighted_metrics(const PosteriorReport& report, const DiscreteDataset& train,
                            const SamplerConfig& config,
                            std::shared_ptr<ScoreCache> cache = nullptr);

/// Learns on train, evaluates on test.
RunMetrics evaluate_split(const DiscreteDataset& train, const DiscreteDataset& test,
                          const SamplerConfig& config);

/// Repeat r uses seed config.seed + r for both the split and the chain.
EvalSummary cross_validate(const DiscreteDataset& ds, int repeats, const SamplerConfig& config,
                           double test_fraction = 0.1);

EvalSummary summarize(std::vector<RunMetrics> runs);

}  // namespace mmlbn
