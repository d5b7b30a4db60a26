#include "mmlbn/report.hpp"

namespace mmlbn {

using nlohmann::json;

namespace {

json classes_to_json(const PosteriorReport& report, const DiscreteDataset& ds,
                     const SamplerConfig& config) {
  ScoringContext ctx(ds, config.scoring());
  const auto normalized = posterior_weights(report);
  json classes = json::array();
  for (std::size_t c = 0; c < report.classes.size(); ++c) {
    const auto& rec = report.classes[c];
    json per_node = json::array();
    for (int v = 0; v < rec.best_network.num_nodes(); ++v) {
      json node = {{"node", v}, {"name", ds.variable(v).name}};
      try {
        const NodeScore s = ctx.node(v, rec.best_network.parents(v));
        node["model"] = local_model_name(s.chosen_model);
        node["params"] = s.parameter_count;
        node["length"] = s.length;
      } catch (const Error& e) {
        node["model"] = nullptr;
        node["error"] = e.what();
      }
      per_node.push_back(std::move(node));
    }
    json arc_names = json::array();
    for (const Arc& a : rec.best_network.arcs())
      arc_names.push_back(ds.variable(a.from).name + "->" + ds.variable(a.to).name);
    classes.push_back({{"arcs", arcs_to_json(rec.best_network)},
                       {"arc_names", std::move(arc_names)},
                       {"visits", rec.visits},
                       {"weight", report.weight(c)},
                       {"normalized_weight", normalized[c]},
                       {"best_length", rec.best_length},
                       {"per_node", std::move(per_node)}});
  }
  return classes;
}

json variables_to_json(const DiscreteDataset& ds) {
  json vars = json::array();
  for (const auto& v : ds.variables())
    vars.push_back({{"name", v.name}, {"arity", v.arity}, {"labels", v.labels}});
  return vars;
}

json metrics_to_json(const RunMetrics& r) {
  return {{"message_length", r.message_length},
          {"test_nll", r.test_nll},
          {"arcs", r.arcs},
          {"parameters", r.parameters}};
}

}  // namespace

json config_to_json(const SamplerConfig& config) {
  return {{"iterations", config.iterations}, {"burn_in", config.burn_in},
          {"seed", config.seed},             {"model", policy_name(config.policy)},
          {"arc_prior", config.arc_prior},   {"sigma", config.sigma},
          {"max_parents", config.max_parents}, {"top_k", config.top_k}};
}

json arcs_to_json(const DagStructure& dag) {
  json arcs = json::array();
  for (const Arc& a : dag.arcs()) arcs.push_back(format_arc(a));
  return arcs;
}

DagStructure dag_from_json(int num_nodes, const json& arcs) {
  std::string text;
  for (const auto& a : arcs) text += a.get<std::string>() + "\n";
  return parse_structure(num_nodes, text);
}

json report_to_json(const PosteriorReport& report, const DiscreteDataset& ds,
                    const SamplerConfig& config) {
  const RunMetrics m = weighted_metrics(report, ds, config);
  return {{"command", "learn"},
          {"config", config_to_json(config)},
          {"cases", ds.num_rows()},
          {"variables", variables_to_json(ds)},
          {"total_samples", report.total_samples},
          {"classes_visited", report.classes_visited},
          {"classes", classes_to_json(report, ds, config)},
          {"summary", {{"message_length", m.message_length},
                       {"arcs", m.arcs},
                       {"parameters", m.parameters}}}};
}

json summary_to_json(const EvalSummary& summary, const DiscreteDataset& ds,
                     const SamplerConfig& config) {
  json runs = json::array();
  for (const auto& r : summary.runs) {
    json run = metrics_to_json(r);
    run["seed"] = r.seed;
    run["train_size"] = r.train_size;
    run["test_size"] = r.test_size;
    run["total_samples"] = r.report.total_samples;
    run["classes"] = classes_to_json(r.report, ds, config);
    runs.push_back(std::move(run));
  }
  return {{"command", "eval"},
          {"config", config_to_json(config)},
          {"variables", variables_to_json(ds)},
          {"repeats", summary.runs.size()},
          {"runs", std::move(runs)},
          {"mean", {{"message_length", summary.mean_message_length},
                    {"test_nll", summary.mean_test_nll},
                    {"arcs", summary.mean_arcs},
                    {"parameters", summary.mean_parameters}}}};
}

json score_to_json(const DagStructure& dag, const DiscreteDataset& ds, double arc_prior,
                   double sigma) {
  json lengths = json::object();
  json errors = json::object();
  for (ModelPolicy policy : {ModelPolicy::TBN, ModelPolicy::FON, ModelPolicy::DUAL}) {
    try {
      ScoringContext ctx(ds, {policy, arc_prior, sigma});
      lengths[policy_name(policy)] = ctx.network_length(dag);
    } catch (const Error& e) {
      lengths[policy_name(policy)] = nullptr;
      errors[policy_name(policy)] = e.what();
    }
  }
  return {{"command", "score"},
          {"arcs", arcs_to_json(dag)},
          {"arc_prior", arc_prior},
          {"sigma", sigma},
          {"log_prior", structure_log_prior(dag, arc_prior)},
          {"lengths", std::move(lengths)},
          {"errors", std::move(errors)}};
}

}  // namespace mmlbn
