#include "mmlbn/cpt_full.hpp"

#include <cmath>
#include <numbers>

#include "mmlbn/error.hpp"

namespace mmlbn {

namespace {

double log_factorial(double n) { return std::lgamma(n + 1.0); }

}  // namespace

std::uint64_t full_cpt_free_params(int child_arity, const std::vector<int>& parent_arities) {
  std::uint64_t n = static_cast<std::uint64_t>(child_arity - 1);
  for (int r : parent_arities) {
    n *= static_cast<std::uint64_t>(r);
    if (n >= kMaxFullCptParameters)
      throw Error(ErrorCode::ParameterCap, "full CPT: parameter cap exceeded");
  }
  if (n >= kMaxFullCptParameters)
    throw Error(ErrorCode::ParameterCap, "full CPT: parameter cap exceeded");
  return n;
}

FullCptScore full_cpt_message_length(const ContingencyCounts& counts) {
  FullCptScore score;
  score.free_params = full_cpt_free_params(counts.child_arity, counts.parent_arities);

  const double ry = counts.child_arity;
  const double log_ry_minus_1_fact = log_factorial(ry - 1.0);
  double data_term = 0.0;
  for (std::size_t c = 0; c < counts.num_configs(); ++c) {
    const double total = counts.totals[c];
    if (total == 0) continue;  // contributes log(r-1)! - log(r-1)! = 0
    data_term += log_factorial(total + ry - 1.0) - log_ry_minus_1_fact;
    for (int k = 0; k < counts.child_arity; ++k) data_term -= log_factorial(counts.count(c, k));
  }
  const double per_param = 0.5 * std::log(std::numbers::pi * std::numbers::e / 6.0);
  score.message_length = static_cast<double>(score.free_params) * per_param + data_term;
  return score;
}

ConditionalTable full_cpt_predictive(const ContingencyCounts& counts) {
  ConditionalTable t;
  t.child_arity = counts.child_arity;
  t.parent_arities = counts.parent_arities;
  t.probs.resize(counts.counts.size());
  for (std::size_t c = 0; c < counts.num_configs(); ++c) {
    const double denom = static_cast<double>(counts.totals[c]) + counts.child_arity;
    for (int k = 0; k < counts.child_arity; ++k)
      t.probs[c * counts.child_arity + k] = (counts.count(c, k) + 1.0) / denom;
  }
  return t;
}

}  // namespace mmlbn
