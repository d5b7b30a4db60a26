#include "mmlbn/fom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mmlbn {

namespace {

// Orthonormal columns spanning the complement of the all-ones vector in R^r.
Eigen::MatrixXd helmert(int r) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(r, r - 1);
  for (int j = 1; j < r; ++j) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(j) * (j + 1));
    for (int i = 0; i < j; ++i) h(i, j - 1) = scale;
    h(j, j - 1) = -j * scale;
  }
  return h;
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw Error(ErrorCode::Argument, "fom: sigma must be positive");
}

double log_sum_exp(const std::vector<double>& x) {
  const double mx = *std::max_element(x.begin(), x.end());
  double s = 0.0;
  for (double v : x) s += std::exp(v - mx);
  return mx + std::log(s);
}

}  // namespace

FomParams FomParams::zeros(int child_arity, std::vector<int> parent_arities) {
  FomParams p;
  p.child_arity = child_arity;
  p.a.assign(child_arity, 0.0);
  for (int r : parent_arities) p.blocks.emplace_back(static_cast<std::size_t>(child_arity) * r, 0.0);
  p.parent_arities = std::move(parent_arities);
  return p;
}

Eigen::VectorXd FomParams::flatten() const {
  std::size_t n = a.size();
  for (const auto& b : blocks) n += b.size();
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  Eigen::Index i = 0;
  for (double v : a) out[i++] = v;
  for (const auto& b : blocks)
    for (double v : b) out[i++] = v;
  return out;
}

FomParams FomParams::unflatten(int child_arity, std::vector<int> parent_arities,
                               const Eigen::VectorXd& full) {
  FomParams p = zeros(child_arity, std::move(parent_arities));
  Eigen::Index i = 0;
  for (double& v : p.a) v = full[i++];
  for (auto& b : p.blocks)
    for (double& v : b) v = full[i++];
  return p;
}

double FomParams::sum_of_squares() const {
  double s = 0.0;
  for (double v : a) s += v * v;
  for (const auto& b : blocks)
    for (double v : b) s += v * v;
  return s;
}

double FomParams::constraint_residual() const {
  double worst = 0.0;
  double sa = 0.0;
  for (double v : a) sa += v;
  worst = std::abs(sa);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const int ri = parent_arities[i];
    for (int k = 0; k < child_arity; ++k) {
      double row = 0.0;
      for (int w = 0; w < ri; ++w) row += b(i, k, w);
      worst = std::max(worst, std::abs(row));
    }
    for (int w = 0; w < ri; ++w) {
      double col = 0.0;
      for (int k = 0; k < child_arity; ++k) col += b(i, k, w);
      worst = std::max(worst, std::abs(col));
    }
  }
  return worst;
}

int free_dimension(int child_arity, std::span<const int> parent_arities) {
  int inner = 1;
  for (int r : parent_arities) inner += r - 1;
  return (child_arity - 1) * inner;
}

FomBasis::FomBasis(int child_arity, std::vector<int> parent_arities)
    : child_arity_(child_arity), parent_arities_(std::move(parent_arities)) {
  if (child_arity_ < 2) throw Error(ErrorCode::Argument, "fom: child arity must be at least 2");
  int full = child_arity_;
  for (int r : parent_arities_) {
    if (r < 2) throw Error(ErrorCode::Argument, "fom: parent arity must be at least 2");
    offsets_.push_back(full);
    full += child_arity_ * r;
  }
  const int d = free_dimension(child_arity_, parent_arities_);
  q_ = Eigen::MatrixXd::Zero(full, d);

  const Eigen::MatrixXd hy = helmert(child_arity_);
  q_.block(0, 0, child_arity_, child_arity_ - 1) = hy;
  int col = child_arity_ - 1;
  for (std::size_t i = 0; i < parent_arities_.size(); ++i) {
    const int ri = parent_arities_[i];
    const Eigen::MatrixXd hi = helmert(ri);
    for (int s = 0; s < child_arity_ - 1; ++s)
      for (int t = 0; t < ri - 1; ++t, ++col)
        for (int k = 0; k < child_arity_; ++k)
          for (int w = 0; w < ri; ++w) q_(offsets_[i] + k * ri + w, col) = hy(k, s) * hi(w, t);
  }
}

FomBasis FomBasis::rotated(const Eigen::MatrixXd& rotation) const {
  if (rotation.rows() != q_.cols() || rotation.cols() != q_.cols())
    throw Error(ErrorCode::Argument, "fom: rotation has the wrong shape");
  FomBasis out = *this;
  out.q_ = q_ * rotation;
  return out;
}

Eigen::VectorXd FomBasis::to_free(const FomParams& params) const {
  return q_.transpose() * params.flatten();
}

FomParams FomBasis::from_free(const Eigen::VectorXd& free) const {
  return FomParams::unflatten(child_arity_, parent_arities_, q_ * free);
}

std::vector<double> fom_probability_at(const FomParams& params, std::span<const int> parent_values) {
  std::vector<double> eta(params.a);
  for (std::size_t i = 0; i < params.blocks.size(); ++i)
    for (int k = 0; k < params.child_arity; ++k) eta[k] += params.b(i, k, parent_values[i]);
  const double mx = *std::max_element(eta.begin(), eta.end());
  double z = 0.0;
  for (double& v : eta) {
    v = std::exp(v - mx);
    z += v;
  }
  for (double& v : eta) v /= z;
  return eta;
}

std::vector<double> fom_probability(const FomParams& params, std::size_t parent_config) {
  std::vector<int> values(params.parent_arities.size());
  for (std::size_t i = values.size(); i-- > 0;) {
    values[i] = static_cast<int>(parent_config % params.parent_arities[i]);
    parent_config /= params.parent_arities[i];
  }
  return fom_probability_at(params, values);
}

double fom_log_prior(const FomParams& params, double sigma) {
  check_sigma(sigma);
  const double ry = params.child_arity;
  const int d = free_dimension(params.child_arity, params.parent_arities);
  double log_norm = 0.5 * std::log(ry);
  for (int ri : params.parent_arities)
    log_norm += 0.5 * ((ri - 1) * std::log(ry) + (ry - 1) * std::log(static_cast<double>(ri)));
  return log_norm - d * (0.5 * std::log(2.0 * std::numbers::pi) + std::log(sigma)) -
         params.sum_of_squares() / (2.0 * sigma * sigma);
}

FomObjective::FomObjective(const ContingencyCounts& counts, double sigma, const FomBasis& basis)
    : basis_(basis), sigma_(sigma), terms_(1 + static_cast<int>(counts.parent_arities.size())) {
  check_sigma(sigma);
  if (counts.child_arity != basis.child_arity() || counts.parent_arities != basis.parent_arities())
    throw Error(ErrorCode::Argument, "fom: counts and basis shapes differ");
  const int ry = counts.child_arity;
  for (std::size_t c = 0; c < counts.num_configs(); ++c) {
    if (counts.totals[c] == 0) continue;
    Cell cell;
    cell.total = counts.totals[c];
    cell.n.resize(ry);
    for (int k = 0; k < ry; ++k) cell.n[k] = counts.count(c, k);
    const auto values = counts.decode_config(c);
    cell.index.resize(static_cast<std::size_t>(terms_) * ry);
    for (int k = 0; k < ry; ++k) cell.index[k] = k;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const int ri = counts.parent_arities[i];
      for (int k = 0; k < ry; ++k)
        cell.index[(i + 1) * ry + k] = basis.block_offset(i) + k * ri + values[i];
    }
    cells_.push_back(std::move(cell));
  }
}

void FomObjective::logits(const Cell& cell, const Eigen::VectorXd& full,
                          std::vector<double>& out) const {
  const int ry = basis_.child_arity();
  out.assign(ry, 0.0);
  for (int t = 0; t < terms_; ++t)
    for (int k = 0; k < ry; ++k) out[k] += full[cell.index[t * ry + k]];
}

double FomObjective::log_likelihood(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd full = basis_.matrix() * u;
  std::vector<double> eta;
  double ll = 0.0;
  for (const auto& cell : cells_) {
    logits(cell, full, eta);
    const double lse = log_sum_exp(eta);
    for (std::size_t k = 0; k < eta.size(); ++k)
      if (cell.n[k] > 0) ll += cell.n[k] * (eta[k] - lse);
  }
  return ll;
}

double FomObjective::value(const Eigen::VectorXd& u) const {
  return -log_likelihood(u) + u.squaredNorm() / (2.0 * sigma_ * sigma_);
}

Eigen::VectorXd FomObjective::gradient(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd full = basis_.matrix() * u;
  Eigen::VectorXd g_full = Eigen::VectorXd::Zero(full.size());
  const int ry = basis_.child_arity();
  std::vector<double> eta;
  for (const auto& cell : cells_) {
    logits(cell, full, eta);
    const double lse = log_sum_exp(eta);
    for (int k = 0; k < ry; ++k) {
      const double r = cell.total * std::exp(eta[k] - lse) - cell.n[k];
      for (int t = 0; t < terms_; ++t) g_full[cell.index[t * ry + k]] += r;
    }
  }
  return basis_.matrix().transpose() * g_full + u / (sigma_ * sigma_);
}

Eigen::MatrixXd FomObjective::hessian(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd full = basis_.matrix() * u;
  const Eigen::Index n = full.size();
  Eigen::MatrixXd h_full = Eigen::MatrixXd::Zero(n, n);
  const int ry = basis_.child_arity();
  std::vector<double> eta;
  std::vector<double> p(ry);
  for (const auto& cell : cells_) {
    logits(cell, full, eta);
    const double lse = log_sum_exp(eta);
    for (int k = 0; k < ry; ++k) p[k] = std::exp(eta[k] - lse);
    for (int k = 0; k < ry; ++k)
      for (int j = 0; j < ry; ++j) {
        const double w = cell.total * ((k == j ? p[k] : 0.0) - p[k] * p[j]);
        for (int t = 0; t < terms_; ++t)
          for (int s = 0; s < terms_; ++s)
            h_full(cell.index[t * ry + k], cell.index[s * ry + j]) += w;
      }
  }
  const auto& q = basis_.matrix();
  Eigen::MatrixXd h = q.transpose() * h_full * q;
  h.diagonal().array() += 1.0 / (sigma_ * sigma_);
  return h;
}

FomParams fit_fom_map(const ContingencyCounts& counts, double sigma, const FomFitOptions& options) {
  check_sigma(sigma);
  const FomBasis basis(counts.child_arity, counts.parent_arities);
  const FomObjective objective(counts, sigma, basis);

  Eigen::VectorXd u = Eigen::VectorXd::Zero(basis.free_dim());
  double f = objective.value(u);
  int floor_steps = 0;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const Eigen::VectorXd g = objective.gradient(u);
    if (g.norm() <= options.gradient_tolerance) return basis.from_free(u);

    const Eigen::LLT<Eigen::MatrixXd> llt(objective.hessian(u));
    if (llt.info() != Eigen::Success)
      throw ConvergenceError("fom: information matrix not positive definite", basis.from_free(u));
    const Eigen::VectorXd step = llt.solve(-g);
    const double slope = g.dot(step);

    // Below the resolution of the objective a line search only sees rounding
    // noise; take plain Newton steps there.
    if (-slope <= 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f))) {
      if (++floor_steps > 3) return basis.from_free(u);
      u += step;
      f = objective.value(u);
      continue;
    }

    bool moved = false;
    for (double t = 1.0; t > 1e-12; t *= 0.5) {
      Eigen::VectorXd trial = u + t * step;
      const double ft = objective.value(trial);
      if (ft <= f + 1e-4 * t * slope) {
        u = std::move(trial);
        f = ft;
        moved = true;
        break;
      }
    }
    if (!moved) throw ConvergenceError("fom: line search failed", basis.from_free(u));
  }
  throw ConvergenceError("fom: Newton iteration limit reached", basis.from_free(u));
}

double fisher_log_det(const FomParams& params, const ContingencyCounts& counts, double sigma,
                      const FomBasis& basis) {
  const FomObjective objective(counts, sigma, basis);
  const Eigen::LLT<Eigen::MatrixXd> llt(objective.hessian(basis.to_free(params)));
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::Convergence, "fom: information matrix not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double fisher_log_det(const FomParams& params, const ContingencyCounts& counts, double sigma) {
  return fisher_log_det(params, counts, sigma, FomBasis(counts.child_arity, counts.parent_arities));
}

double fom_lattice_term(int free_dim) {
  return 0.5 * free_dim * (1.0 - std::log(12.0));
}

FomScore fom_message_length(const ContingencyCounts& counts, double sigma) {
  check_sigma(sigma);
  const FomBasis basis(counts.child_arity, counts.parent_arities);
  FomScore score;
  score.map_params = fit_fom_map(counts, sigma);
  score.free_dim = basis.free_dim();
  const FomObjective objective(counts, sigma, basis);
  const Eigen::VectorXd u = basis.to_free(score.map_params);
  const Eigen::LLT<Eigen::MatrixXd> llt(objective.hessian(u));
  score.fisher_log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  score.log_likelihood = objective.log_likelihood(u);
  score.message_length = -fom_log_prior(score.map_params, sigma) + 0.5 * score.fisher_log_det -
                         score.log_likelihood + fom_lattice_term(score.free_dim);
  return score;
}

}  // namespace mmlbn
