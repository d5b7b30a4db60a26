#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "mmlbn/dataset.hpp"
#include "mmlbn/error.hpp"

namespace mmlbn {

inline constexpr double kDefaultSigma = 3.0;

/// First-order logit parameters: one zeroth-order term a_k per child state and
/// one r_y x r_i block b_{kw} per parent, stored row-major (k * r_i + w).
struct FomParams {
  int child_arity = 0;
  std::vector<int> parent_arities;
  std::vector<double> a;
  std::vector<std::vector<double>> blocks;

  static FomParams zeros(int child_arity, std::vector<int> parent_arities);

  double b(std::size_t parent, int k, int w) const {
    return blocks[parent][static_cast<std::size_t>(k) * parent_arities[parent] + w];
  }
  double& b(std::size_t parent, int k, int w) {
    return blocks[parent][static_cast<std::size_t>(k) * parent_arities[parent] + w];
  }

  /// a followed by each block; the layout FomBasis works in.
  Eigen::VectorXd flatten() const;
  static FomParams unflatten(int child_arity, std::vector<int> parent_arities,
                             const Eigen::VectorXd& full);

  double sum_of_squares() const;
  /// Largest violation of the sum-to-zero constraints.
  double constraint_residual() const;
};

/// (r_y - 1) * (1 + sum_i (r_i - 1)).
int free_dimension(int child_arity, std::span<const int> parent_arities);

/// Orthonormal basis (columns) of the constrained parameter subspace, embedded
/// in the flattened full parameter vector.
class FomBasis {
 public:
  FomBasis(int child_arity, std::vector<int> parent_arities);

  int child_arity() const noexcept { return child_arity_; }
  const std::vector<int>& parent_arities() const noexcept { return parent_arities_; }
  int full_dim() const noexcept { return static_cast<int>(q_.rows()); }
  int free_dim() const noexcept { return static_cast<int>(q_.cols()); }
  /// Offset of parent i's block in the flattened vector.
  int block_offset(std::size_t parent) const { return offsets_[parent]; }
  const Eigen::MatrixXd& matrix() const noexcept { return q_; }

  /// Same subspace, basis multiplied by an orthogonal d x d matrix.
  FomBasis rotated(const Eigen::MatrixXd& rotation) const;

  Eigen::VectorXd to_free(const FomParams& params) const;
  FomParams from_free(const Eigen::VectorXd& free) const;

 private:
  int child_arity_;
  std::vector<int> parent_arities_;
  std::vector<int> offsets_;
  Eigen::MatrixXd q_;
};

/// Child distribution for one parent configuration (mixed radix, first parent
/// most significant).
std::vector<double> fom_probability(const FomParams& params, std::size_t parent_config);
std::vector<double> fom_probability_at(const FomParams& params, std::span<const int> parent_values);

/// Log density of the constrained Gaussian prior, in nits.
double fom_log_prior(const FomParams& params, double sigma);

/// Negative log posterior (up to the prior's normalizing constant) as a
/// function of free coordinates u: -sum N_k log P_k + |u|^2 / (2 sigma^2).
class FomObjective {
 public:
  FomObjective(const ContingencyCounts& counts, double sigma, const FomBasis& basis);

  double value(const Eigen::VectorXd& u) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& u) const;
  /// Expected information sum_pi N_pi (diag p - p p^T) in free coordinates,
  /// plus I / sigma^2. Also the exact Hessian of value().
  Eigen::MatrixXd hessian(const Eigen::VectorXd& u) const;
  double log_likelihood(const Eigen::VectorXd& u) const;

  const FomBasis& basis() const noexcept { return basis_; }

 private:
  struct Cell {
    std::vector<int> index;  // full-vector index per (term, k): term-major
    std::vector<double> n;   // N_{k,pi}
    double total = 0.0;
  };
  // Linear predictor for each child state of a cell given full params.
  void logits(const Cell& cell, const Eigen::VectorXd& full, std::vector<double>& out) const;

  FomBasis basis_;
  double sigma_;
  int terms_;
  std::vector<Cell> cells_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, FomParams best)
      : Error(ErrorCode::Convergence, what), best_(std::move(best)) {}
  const FomParams& best_iterate() const noexcept { return best_; }

 private:
  FomParams best_;
};

struct FomFitOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-8;
};

/// MAP fit by damped Newton in free coordinates, starting from zero.
FomParams fit_fom_map(const ContingencyCounts& counts, double sigma = kDefaultSigma,
                      const FomFitOptions& options = {});

/// log det of the ridged expected information in free coordinates.
double fisher_log_det(const FomParams& params, const ContingencyCounts& counts, double sigma);
double fisher_log_det(const FomParams& params, const ContingencyCounts& counts, double sigma,
                      const FomBasis& basis);

struct FomScore {
  double message_length = 0.0;  // nits
  int free_dim = 0;
  FomParams map_params;
  double fisher_log_det = 0.0;
  double log_likelihood = 0.0;
};

/// (d/2)(1 + log kappa_d) with kappa_d = 1/12 per dimension.
double fom_lattice_term(int free_dim);

FomScore fom_message_length(const ContingencyCounts& counts, double sigma = kDefaultSigma);

}  // namespace mmlbn
