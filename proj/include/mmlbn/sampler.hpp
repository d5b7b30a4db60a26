#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "mmlbn/dataset.hpp"
#include "mmlbn/graph.hpp"
#include "mmlbn/scoring.hpp"

namespace mmlbn {

struct SamplerConfig {
  std::uint64_t iterations = 200000;  // total chain steps, burn-in included
  std::uint64_t burn_in = 10000;
  std::uint64_t seed = 1;
  ModelPolicy policy = ModelPolicy::DUAL;
  double arc_prior = 0.5;
  double sigma = kDefaultSigma;
  int max_parents = 10;  // clamped to m - 1
  std::size_t top_k = 10;

  void validate() const;
  ScoringConfig scoring() const { return {policy, arc_prior, sigma}; }
};

struct ClassRecord {
  EquivalenceKey key;
  std::uint64_t visits = 0;
  DagStructure best_network;  // cleaned
  double best_length = 0.0;
};

struct PosteriorReport {
  std::vector<ClassRecord> classes;  // visits descending
  std::uint64_t total_samples = 0;
  std::uint64_t classes_visited = 0;

  double weight(std::size_t i) const {
    return total_samples == 0 ? 0.0 : static_cast<double>(classes[i].visits) / total_samples;
  }
};

/// Removes, node by node and parent by parent in ascending order, every arc
/// whose removal does not increase the total message length.
DagStructure clean_network(const DagStructure& dag, ScoringContext& ctx);

struct ChainState {
  DagStructure dag;
  double length = 0.0;
};

/// Small deterministic RNG helpers over mt19937_64, independent of the
/// standard distributions' implementation-defined algorithms.
class ChainRng {
 public:
  explicit ChainRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

/// The proposal a step would draw: toggle or reverse on a uniform ordered pair.
ArcMove draw_move(int num_nodes, ChainRng& rng);

/// One Metropolis step in place. Returns true if the proposal was accepted.
bool metropolis_step(ChainState& state, ChainRng& rng, ScoringContext& ctx, int max_parents);

/// Acceptance probability min(1, exp(current - proposed)).
double acceptance_probability(double current_length, double proposed_length);

using SampleObserver = std::function<void(const DagStructure& state, double length)>;

/// Runs one chain from the empty graph and aggregates post-burn-in samples by
/// the equivalence class of their cleaned network.
PosteriorReport run_sampler(const DiscreteDataset& ds, const SamplerConfig& config,
                            std::shared_ptr<ScoreCache> cache = nullptr,
                            const SampleObserver& observer = {});

/// Sums visits per class over independent chains; keeps the shortest best
/// network; truncates to top_k.
PosteriorReport merge_reports(const std::vector<PosteriorReport>& reports, std::size_t top_k);

}  // namespace mmlbn
