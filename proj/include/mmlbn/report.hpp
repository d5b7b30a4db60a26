#pragma once

#include <json.hpp>

#include "mmlbn/dataset.hpp"
#include "mmlbn/eval.hpp"
#include "mmlbn/graph.hpp"
#include "mmlbn/sampler.hpp"

namespace mmlbn {

nlohmann::json config_to_json(const SamplerConfig& config);

/// Arcs as "from->to" strings, sorted.
nlohmann::json arcs_to_json(const DagStructure& dag);
DagStructure dag_from_json(int num_nodes, const nlohmann::json& arcs);

nlohmann::json report_to_json(const PosteriorReport& report, const DiscreteDataset& ds,
                              const SamplerConfig& config);

nlohmann::json summary_to_json(const EvalSummary& summary, const DiscreteDataset& ds,
                               const SamplerConfig& config);

/// Message length of one structure under each policy; null where a policy
/// cannot score it (with the reason under "errors").
nlohmann::json score_to_json(const DagStructure& dag, const DiscreteDataset& ds, double arc_prior,
                             double sigma);

}  // namespace mmlbn
