#include "mmlbn/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mmlbn {

namespace {

double node_log_prob(const FittedNode& node, int child, std::span<const int> full_case) {
  std::vector<int> values(node.parents.size());
  for (std::size_t i = 0; i < node.parents.size(); ++i) values[i] = full_case[node.parents[i]];
  if (node.model == LocalModel::Fom)
    return std::log(fom_probability_at(node.fom, values)[full_case[child]]);
  std::size_t config = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    config = config * node.table.parent_arities[i] + values[i];
  return std::log(node.table.prob(config, full_case[child]));
}

}  // namespace

FittedNetwork fit_network(const DagStructure& dag, const DiscreteDataset& train,
                          ModelPolicy policy, double sigma, std::shared_ptr<ScoreCache> cache) {
  if (static_cast<std::size_t>(dag.num_nodes()) != train.num_vars())
    throw Error(ErrorCode::Argument, "fit: structure and data set sizes differ");
  ScoringContext ctx(train, {policy, 0.5, sigma}, std::move(cache));
  FittedNetwork net;
  net.dag = dag;
  for (int v = 0; v < dag.num_nodes(); ++v) {
    const auto& parents = dag.parents(v);
    const NodeScore choice = ctx.node(v, parents);
    const auto counts = counts_for(train, v, parents);
    FittedNode node;
    node.model = choice.chosen_model;
    node.parents = parents;
    node.parameter_count = choice.parameter_count;
    if (node.model == LocalModel::Full)
      node.table = full_cpt_predictive(counts);
    else
      node.fom = fit_fom_map(counts, sigma);
    net.parameter_count += node.parameter_count;
    net.nodes.push_back(std::move(node));
  }
  return net;
}

double case_log_prob(const FittedNetwork& net, std::span<const int> full_case) {
  if (full_case.size() != net.nodes.size())
    throw Error(ErrorCode::Argument, "case_log_prob: case width differs from network size");
  double lp = 0.0;
  for (std::size_t v = 0; v < net.nodes.size(); ++v)
    lp += node_log_prob(net.nodes[v], static_cast<int>(v), full_case);
  return lp;
}

std::vector<double> posterior_weights(const PosteriorReport& report) {
  double total = 0.0;
  for (const auto& c : report.classes) total += static_cast<double>(c.visits);
  std::vector<double> w;
  w.reserve(report.classes.size());
  for (const auto& c : report.classes) w.push_back(static_cast<double>(c.visits) / total);
  return w;
}

double model_averaged_test_nll(const PosteriorReport& report, const DiscreteDataset& train,
                               const DiscreteDataset& test, ModelPolicy policy, double sigma,
                               std::shared_ptr<ScoreCache> cache) {
  if (report.classes.empty()) throw Error(ErrorCode::Argument, "test NLL: empty report");
  const auto weights = posterior_weights(report);
  if (!cache) cache = std::make_shared<ScoreCache>();
  std::vector<FittedNetwork> nets;
  for (const auto& c : report.classes) nets.push_back(fit_network(c.best_network, train, policy, sigma, cache));

  double nll = 0.0;
  std::vector<double> terms(nets.size());
  for (std::size_t r = 0; r < test.num_rows(); ++r) {
    const auto row = test.row(r);
    for (std::size_t c = 0; c < nets.size(); ++c)
      terms[c] = std::log(weights[c]) + case_log_prob(nets[c], row);
    const double mx = *std::max_element(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms) s += std::exp(t - mx);
    nll -= mx + std::log(s);
  }
  return nll;
}

RunMetrics weighted_metrics(const PosteriorReport& report, const DiscreteDataset& train,
                            const SamplerConfig& config, std::shared_ptr<ScoreCache> cache) {
  RunMetrics out;
  out.train_size = train.num_rows();
  const auto weights = posterior_weights(report);
  ScoringContext ctx(train, config.scoring(), std::move(cache));
  for (std::size_t c = 0; c < report.classes.size(); ++c) {
    const auto& rec = report.classes[c];
    std::uint64_t params = 0;
    for (int v = 0; v < rec.best_network.num_nodes(); ++v)
      params += ctx.node(v, rec.best_network.parents(v)).parameter_count;
    out.message_length += weights[c] * rec.best_length;
    out.arcs += weights[c] * rec.best_network.arc_count();
    out.parameters += weights[c] * static_cast<double>(params);
  }
  return out;
}

RunMetrics evaluate_split(const DiscreteDataset& train, const DiscreteDataset& test,
                          const SamplerConfig& config) {
  auto cache = std::make_shared<ScoreCache>();
  PosteriorReport report = run_sampler(train, config, cache);
  RunMetrics out = weighted_metrics(report, train, config, cache);
  out.seed = config.seed;
  out.test_size = test.num_rows();
  out.test_nll = model_averaged_test_nll(report, train, test, config.policy, config.sigma, cache);
  out.report = std::move(report);
  return out;
}

EvalSummary summarize(std::vector<RunMetrics> runs) {
  EvalSummary s;
  s.runs = std::move(runs);
  if (s.runs.empty()) return s;
  for (const auto& r : s.runs) {
    s.mean_message_length += r.message_length;
    s.mean_test_nll += r.test_nll;
    s.mean_arcs += r.arcs;
    s.mean_parameters += r.parameters;
  }
  const double n = static_cast<double>(s.runs.size());
  s.mean_message_length /= n;
  s.mean_test_nll /= n;
  s.mean_arcs /= n;
  s.mean_parameters /= n;
  return s;
}

EvalSummary cross_validate(const DiscreteDataset& ds, int repeats, const SamplerConfig& config,
                           double test_fraction) {
  if (repeats < 1) throw Error(ErrorCode::Argument, "cross-validation: repeats must be >= 1");
  std::vector<RunMetrics> runs;
  for (int r = 0; r < repeats; ++r) {
    SamplerConfig run_config = config;
    run_config.seed = config.seed + static_cast<std::uint64_t>(r);
    auto [train, test] = split_train_test(ds, test_fraction, run_config.seed);
    runs.push_back(evaluate_split(train, test, run_config));
  }
  return summarize(std::move(runs));
}

}  // namespace mmlbn
