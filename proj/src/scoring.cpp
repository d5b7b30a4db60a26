#include "mmlbn/scoring.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include "mmlbn/cpt_full.hpp"

namespace mmlbn {

namespace {

constexpr std::size_t kPriorMemoLimit = std::size_t{1} << 18;

NodeScore full_node(const ContingencyCounts& counts) {
  const auto s = full_cpt_message_length(counts);
  return {s.message_length, LocalModel::Full, s.free_params};
}

NodeScore fom_node(const ContingencyCounts& counts, double sigma) {
  const auto s = fom_message_length(counts, sigma);
  return {s.message_length, LocalModel::Fom, static_cast<std::uint64_t>(s.free_dim)};
}

NodeScore fom_only_dual(const ContingencyCounts& counts, double sigma) {
  NodeScore s = fom_node(counts, sigma);
  s.length += std::numbers::ln2;
  return s;
}

}  // namespace

const char* policy_name(ModelPolicy policy) noexcept {
  switch (policy) {
    case ModelPolicy::TBN: return "tbn";
    case ModelPolicy::FON: return "fon";
    case ModelPolicy::DUAL: return "dual";
  }
  return "?";
}

ModelPolicy parse_policy(const std::string& text) {
  if (text == "tbn" || text == "TBN") return ModelPolicy::TBN;
  if (text == "fon" || text == "FON") return ModelPolicy::FON;
  if (text == "dual" || text == "DUAL" || text == "dn" || text == "DN") return ModelPolicy::DUAL;
  throw Error(ErrorCode::Argument, "unknown model policy '" + text + "'");
}

const char* local_model_name(LocalModel model) noexcept {
  return model == LocalModel::Full ? "full" : "fom";
}

NodeScore select_dual(const NodeScore& full, const NodeScore& fom) {
  NodeScore out = fom.length < full.length ? fom : full;
  out.length += std::numbers::ln2;
  return out;
}

NodeScore node_length(const ContingencyCounts& counts, ModelPolicy policy, int parent_count,
                      double sigma) {
  switch (policy) {
    case ModelPolicy::TBN:
      return full_node(counts);
    case ModelPolicy::FON:
      return fom_node(counts, sigma);
    case ModelPolicy::DUAL: {
      if (parent_count <= 1) return full_node(counts);
      NodeScore full;
      try {
        full = full_node(counts);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ParameterCap) throw;
        return fom_only_dual(counts, sigma);
      }
      return select_dual(full, fom_node(counts, sigma));
    }
  }
  throw Error(ErrorCode::Argument, "node_length: unknown policy");
}

std::size_t ScoreCache::KeyHash::operator()(const Key& k) const noexcept {
  std::size_t h = std::hash<int>{}(k.child) * 0x9e3779b97f4a7c15ULL;
  for (int p : k.parents) h ^= std::hash<int>{}(p) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= static_cast<std::size_t>(k.policy) << 3;
  h ^= std::bit_cast<std::uint64_t>(k.sigma) * 31;
  return h;
}

std::optional<ScoreCache::Entry> ScoreCache::find(const Key& key) const {
  std::shared_lock lock(mutex_);
  auto it = map_.find(key);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

ScoreCache::Entry ScoreCache::insert(const Key& key, Entry entry) {
  std::unique_lock lock(mutex_);
  return map_.try_emplace(key, std::move(entry)).first->second;
}

std::size_t ScoreCache::size() const {
  std::shared_lock lock(mutex_);
  return map_.size();
}

ScoringContext::ScoringContext(const DiscreteDataset& ds, ScoringConfig config,
                               std::shared_ptr<ScoreCache> cache)
    : ds_(ds), config_(config), cache_(std::move(cache)) {
  if (!cache_) cache_ = std::make_shared<ScoreCache>();
  if (!(config_.arc_prior > 0.0 && config_.arc_prior < 1.0))
    throw Error(ErrorCode::Argument, "scoring: arc prior must lie in (0, 1)");
  if (!(config_.sigma > 0.0)) throw Error(ErrorCode::Argument, "scoring: sigma must be positive");
}

NodeScore ScoringContext::node(int child, const std::vector<int>& parents) {
  ScoreCache::Key key{child, parents, config_.policy, config_.sigma};
  auto entry = cache_->find(key);
  if (!entry) {
    ScoreCache::Entry computed;
    try {
      std::vector<int> arities;
      for (int p : parents) arities.push_back(ds_.arity(p));
      // Reject oversized full tables before tabulating them.
      if (config_.policy == ModelPolicy::TBN) full_cpt_free_params(ds_.arity(child), arities);
      cache_->note_computation();
      const auto counts = counts_for(ds_, child, parents);
      computed = node_length(counts, config_.policy, static_cast<int>(parents.size()),
                             config_.sigma);
    } catch (const Error& e) {
      computed = ScoreCache::Failure{e.code(), e.what()};
    }
    entry = cache_->insert(key, std::move(computed));
  }
  if (const auto* failure = std::get_if<ScoreCache::Failure>(&*entry))
    throw Error(failure->code, failure->message);
  return std::get<NodeScore>(*entry);
}

double ScoringContext::log_prior(const DagStructure& dag) {
  if (auto it = prior_memo_.find(dag); it != prior_memo_.end()) return it->second;
  const double lp = structure_log_prior(dag, config_.arc_prior);
  if (prior_memo_.size() >= kPriorMemoLimit) prior_memo_.clear();
  prior_memo_.emplace(dag, lp);
  return lp;
}

double ScoringContext::network_length(const DagStructure& dag) {
  if (static_cast<std::size_t>(dag.num_nodes()) != ds_.num_vars())
    throw Error(ErrorCode::Argument, "scoring: structure and data set sizes differ");
  double total = -log_prior(dag);
  for (int v = 0; v < dag.num_nodes(); ++v) total += node(v, dag.parents(v)).length;
  return total;
}

double ScoringContext::score_or_inf(const DagStructure& dag) noexcept {
  try {
    return network_length(dag);
  } catch (...) {
    return std::numeric_limits<double>::infinity();
  }
}

double network_message_length(const DagStructure& dag, const DiscreteDataset& ds,
                              ModelPolicy policy, double arc_prior, double sigma,
                              const std::shared_ptr<ScoreCache>& cache) {
  ScoringContext ctx(ds, {policy, arc_prior, sigma}, cache);
  return ctx.network_length(dag);
}

}  // namespace mmlbn
