#include "mmlbn/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <unordered_map>

namespace mmlbn {

namespace {

constexpr std::size_t kCleanMemoLimit = std::size_t{1} << 16;

struct Cleaned {
  DagStructure dag;
  double length;
};

void sort_and_truncate(std::vector<ClassRecord>& classes, std::size_t top_k) {
  std::sort(classes.begin(), classes.end(), [](const ClassRecord& x, const ClassRecord& y) {
    if (x.visits != y.visits) return x.visits > y.visits;
    if (x.best_length != y.best_length) return x.best_length < y.best_length;
    return x.key < y.key;
  });
  if (classes.size() > top_k) classes.resize(top_k);
}

}  // namespace

void SamplerConfig::validate() const {
  if (burn_in >= iterations)
    throw Error(ErrorCode::Argument, "sampler: burn-in must be smaller than iterations");
  if (max_parents < 0) throw Error(ErrorCode::Argument, "sampler: max parents must be >= 0");
  if (top_k < 1) throw Error(ErrorCode::Argument, "sampler: top-k must be >= 1");
  if (!(arc_prior > 0.0 && arc_prior < 1.0))
    throw Error(ErrorCode::Argument, "sampler: arc prior must lie in (0, 1)");
  if (!(sigma > 0.0)) throw Error(ErrorCode::Argument, "sampler: sigma must be positive");
}

DagStructure clean_network(const DagStructure& dag, ScoringContext& ctx) {
  DagStructure current = dag;
  double current_length = ctx.score_or_inf(current);
  for (int v = 0; v < dag.num_nodes(); ++v) {
    const std::vector<int> candidates = dag.parents(v);
    for (int p : candidates) {
      DagStructure trial = current.without_arc(p, v);
      const double trial_length = ctx.score_or_inf(trial);
      if (!std::isfinite(trial_length) || trial_length <= current_length) {
        current = std::move(trial);
        current_length = trial_length;
      }
    }
  }
  return current;
}

ArcMove draw_move(int num_nodes, ChainRng& rng) {
  ArcMove move;
  move.kind = rng.uniform() < 0.5 ? MoveKind::Toggle : MoveKind::Reverse;
  move.from = static_cast<int>(rng.below(num_nodes));
  int to = static_cast<int>(rng.below(num_nodes - 1));
  move.to = to >= move.from ? to + 1 : to;
  return move;
}

double acceptance_probability(double current_length, double proposed_length) {
  if (!std::isfinite(proposed_length)) return 0.0;
  if (proposed_length <= current_length) return 1.0;
  return std::exp(current_length - proposed_length);
}

bool metropolis_step(ChainState& state, ChainRng& rng, ScoringContext& ctx, int max_parents) {
  const int m = state.dag.num_nodes();
  if (m < 2) return false;
  const ArcMove move = draw_move(m, rng);
  const double u = rng.uniform();
  if (move.kind == MoveKind::Reverse && !state.dag.has_arc(move.to, move.from)) return false;

  DagStructure proposal;
  try {
    proposal = apply_move(state.dag, move, max_parents);
  } catch (const Error&) {
    return false;
  }
  const double proposed_length = ctx.score_or_inf(proposal);
  if (u >= acceptance_probability(state.length, proposed_length)) return false;
  state.dag = std::move(proposal);
  state.length = proposed_length;
  return true;
}

PosteriorReport run_sampler(const DiscreteDataset& ds, const SamplerConfig& config,
                            std::shared_ptr<ScoreCache> cache, const SampleObserver& observer) {
  config.validate();
  const int m = static_cast<int>(ds.num_vars());
  const int max_parents = std::min(config.max_parents, std::max(m - 1, 0));
  ScoringContext ctx(ds, config.scoring(), cache ? std::move(cache) : std::make_shared<ScoreCache>());
  ChainRng rng(config.seed);

  ChainState state{DagStructure(m), 0.0};
  state.length = ctx.network_length(state.dag);

  std::unordered_map<EquivalenceKey, ClassRecord, EquivalenceKeyHash> classes;
  std::unordered_map<DagStructure, Cleaned, DagHash> clean_memo;
  std::optional<DagStructure> last_state;
  const Cleaned* last_clean = nullptr;

  for (std::uint64_t step = 0; step < config.iterations; ++step) {
    if (step > 0) metropolis_step(state, rng, ctx, max_parents);
    if (step < config.burn_in) continue;
    if (observer) observer(state.dag, state.length);

    if (!last_clean || *last_state != state.dag) {
      auto it = clean_memo.find(state.dag);
      if (it == clean_memo.end()) {
        if (clean_memo.size() >= kCleanMemoLimit) clean_memo.clear();
        DagStructure cleaned = clean_network(state.dag, ctx);
        const double length = ctx.score_or_inf(cleaned);
        it = clean_memo.emplace(state.dag, Cleaned{std::move(cleaned), length}).first;
      }
      last_state = state.dag;
      last_clean = &it->second;
    }

    EquivalenceKey key = cpdag_key(last_clean->dag);
    auto [rec, inserted] = classes.try_emplace(key);
    if (inserted) {
      rec->second.key = std::move(key);
      rec->second.best_network = last_clean->dag;
      rec->second.best_length = last_clean->length;
    } else if (last_clean->length < rec->second.best_length) {
      rec->second.best_network = last_clean->dag;
      rec->second.best_length = last_clean->length;
    }
    ++rec->second.visits;
  }

  PosteriorReport report;
  report.total_samples = config.iterations - config.burn_in;
  report.classes_visited = classes.size();
  report.classes.reserve(classes.size());
  for (auto& [key, rec] : classes) report.classes.push_back(std::move(rec));
  sort_and_truncate(report.classes, config.top_k);
  return report;
}

PosteriorReport merge_reports(const std::vector<PosteriorReport>& reports, std::size_t top_k) {
  std::unordered_map<EquivalenceKey, ClassRecord, EquivalenceKeyHash> classes;
  PosteriorReport merged;
  for (const auto& r : reports) {
    merged.total_samples += r.total_samples;
    for (const auto& c : r.classes) {
      auto [it, inserted] = classes.try_emplace(c.key, c);
      if (inserted) continue;
      it->second.visits += c.visits;
      if (c.best_length < it->second.best_length) {
        it->second.best_network = c.best_network;
        it->second.best_length = c.best_length;
      }
    }
  }
  merged.classes_visited = classes.size();
  for (auto& [key, rec] : classes) merged.classes.push_back(std::move(rec));
  sort_and_truncate(merged.classes, top_k);
  return merged;
}

}  // namespace mmlbn
