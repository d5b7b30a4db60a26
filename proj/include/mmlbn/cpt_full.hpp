#pragma once

#include <cstdint>
#include <vector>

#include "mmlbn/dataset.hpp"

namespace mmlbn {

/// Tables with this many free parameters or more are rejected.
inline constexpr std::uint64_t kMaxFullCptParameters = 65000;

struct FullCptScore {
  double message_length = 0.0;  // nits
  std::uint64_t free_params = 0;
};

/// Row-stochastic table P(Y = k | pi), stored as probs[config * child_arity + k].
struct ConditionalTable {
  int child_arity = 0;
  std::vector<int> parent_arities;
  std::vector<double> probs;

  double prob(std::size_t config, int k) const {
    return probs[config * static_cast<std::size_t>(child_arity) + k];
  }
};

/// (r_y - 1) * prod r_i; throws ParameterCap at or above the cap.
std::uint64_t full_cpt_free_params(int child_arity, const std::vector<int>& parent_arities);

/// Two-part code length of the child under a full CPT with a uniform
/// Dirichlet prior, including the per-parameter (1/2) log(pi e / 6) term.
FullCptScore full_cpt_message_length(const ContingencyCounts& counts);

/// Posterior-mean table (N_k + 1) / (N + r_y).
ConditionalTable full_cpt_predictive(const ContingencyCounts& counts);

}  // namespace mmlbn
