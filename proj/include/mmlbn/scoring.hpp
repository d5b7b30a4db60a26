#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "mmlbn/dataset.hpp"
#include "mmlbn/error.hpp"
#include "mmlbn/fom.hpp"
#include "mmlbn/graph.hpp"

namespace mmlbn {

/// TBN: full tables everywhere. FON: first-order model everywhere. DUAL: per
/// node choice at one bit, only for nodes with two or more parents.
enum class ModelPolicy { TBN, FON, DUAL };
enum class LocalModel { Full, Fom };

const char* policy_name(ModelPolicy policy) noexcept;
ModelPolicy parse_policy(const std::string& text);
const char* local_model_name(LocalModel model) noexcept;

struct NodeScore {
  double length = 0.0;  // nits
  LocalModel chosen_model = LocalModel::Full;
  std::uint64_t parameter_count = 0;
};

/// Dual selection given both candidate scores: log 2 + the shorter, ties to full.
NodeScore select_dual(const NodeScore& full, const NodeScore& fom);

NodeScore node_length(const ContingencyCounts& counts, ModelPolicy policy, int parent_count,
                      double sigma = kDefaultSigma);

/// Thread-safe memo of node scores (and node failures) keyed by child, sorted
/// parent set, policy and sigma. One cache must only serve one data set.
class ScoreCache {
 public:
  struct Key {
    int child = 0;
    std::vector<int> parents;
    ModelPolicy policy = ModelPolicy::TBN;
    double sigma = kDefaultSigma;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct Failure {
    ErrorCode code;
    std::string message;
  };
  using Entry = std::variant<NodeScore, Failure>;

  std::optional<Entry> find(const Key& key) const;
  /// Inserts if absent; returns the stored entry.
  Entry insert(const Key& key, Entry entry);
  std::size_t size() const;

  /// Number of local-model evaluations performed through this cache.
  std::uint64_t computations() const noexcept { return computations_.load(); }
  void note_computation() noexcept { computations_.fetch_add(1); }

 private:
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  mutable std::shared_mutex mutex_;
  std::unordered_map<Key, Entry, KeyHash> map_;
  std::atomic<std::uint64_t> computations_{0};
};

struct ScoringConfig {
  ModelPolicy policy = ModelPolicy::DUAL;
  double arc_prior = 0.5;
  double sigma = kDefaultSigma;
};

/// Scores networks over one data set. Not thread-safe itself; several contexts
/// may share one ScoreCache across threads.
class ScoringContext {
 public:
  ScoringContext(const DiscreteDataset& ds, ScoringConfig config,
                 std::shared_ptr<ScoreCache> cache = std::make_shared<ScoreCache>());

  const DiscreteDataset& dataset() const noexcept { return ds_; }
  const ScoringConfig& config() const noexcept { return config_; }
  ScoreCache& cache() noexcept { return *cache_; }
  const std::shared_ptr<ScoreCache>& shared_cache() const noexcept { return cache_; }

  /// Node score for the given (sorted) parent set; throws on local-model errors.
  NodeScore node(int child, const std::vector<int>& parents);
  double log_prior(const DagStructure& dag);
  /// -log P(S) + sum of node lengths; throws on any node error.
  double network_length(const DagStructure& dag);
  /// network_length, or +inf when any node cannot be scored.
  double score_or_inf(const DagStructure& dag) noexcept;

 private:
  const DiscreteDataset& ds_;
  ScoringConfig config_;
  std::shared_ptr<ScoreCache> cache_;
  std::unordered_map<DagStructure, double, DagHash> prior_memo_;
};

double network_message_length(const DagStructure& dag, const DiscreteDataset& ds,
                              ModelPolicy policy, double arc_prior, double sigma,
                              const std::shared_ptr<ScoreCache>& cache);

}  // namespace mmlbn
