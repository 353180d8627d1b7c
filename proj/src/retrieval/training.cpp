#include "mathprep/retrieval/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mathprep/error.hpp"
#include "mathprep/retrieval/softmax.hpp"

namespace mathprep::retrieval {

namespace {

// Q_EC with its partial derivatives w.r.t. diag_scale and length_scale,
// accumulated into `grad_w` / `grad_ell` scaled by `weight`.
double q_with_gradient(const Embedding& state, std::span<const Record> records,
                       const KernelParams& params, double prior, double weight,
                       std::vector<double>& grad_w, double& grad_ell) {
  if (records.empty()) return prior;
  const double ell = params.length_scale;
  const std::size_t dim = params.dimension();
  std::vector<double> logk(records.size());
  std::vector<double> dist(records.size());
  double max_logk = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < records.size(); ++j) {
    dist[j] = weighted_sq_distance(params, state, records[j].state);
    logk[j] = -dist[j] / (2.0 * ell * ell);
    max_logk = std::max(max_logk, logk[j]);
  }
  std::vector<double> omega(records.size());
  double den = 0.0;
  for (std::size_t j = 0; j < records.size(); ++j) {
    omega[j] = std::exp(logk[j] - max_logk);
    den += omega[j];
  }
  double q = 0.0;
  for (std::size_t j = 0; j < records.size(); ++j) {
    omega[j] /= den;
    q += omega[j] * records[j].q;
  }
  if (weight == 0.0) return q;

  // dQ/dtheta = sum_j omega_j (q_j - Q) dlog k_j/dtheta
  //   dlog k_j / dw_i = -w_i (a_i - b_ji)^2 / ell^2
  //   dlog k_j / dell = d_j / ell^3
  std::vector<double> acc(dim, 0.0);
  double acc_ell = 0.0;
  for (std::size_t j = 0; j < records.size(); ++j) {
    const double coef = omega[j] * (records[j].q - q);
    if (coef == 0.0) continue;
    acc_ell += coef * dist[j];
    for (std::size_t i = 0; i < dim; ++i) {
      const double delta = state[i] - records[j].state[i];
      acc[i] += coef * delta * delta;
    }
  }
  const double inv_ell2 = 1.0 / (ell * ell);
  for (std::size_t i = 0; i < dim; ++i) {
    grad_w[i] += weight * (-params.diag_scale[i] * inv_ell2 * acc[i]);
  }
  grad_ell += weight * acc_ell / (ell * ell * ell);
  return q;
}

void check_batch_nonempty(std::size_t n) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "training batch must be non-empty");
}

void check_binary(double r) {
  if (r != 0.0 && r != 1.0) {
    fail(ErrorCode::Domain, "binary reward must be 0 or 1, got " + std::to_string(r));
  }
}

double clamp_probability(double q) {
  return std::clamp(q, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

double bce(double r, double q) {
  const double qc = clamp_probability(q);
  return -r * std::log(qc) - (1.0 - r) * std::log(1.0 - qc);
}

}  // namespace

double soft_value(const Embedding& next_state, std::span<const std::string> candidates,
                  const QEstimator& estimator, const KernelParams& params) {
  if (candidates.empty()) {
    fail(ErrorCode::InvalidArgument, "soft backup needs at least one candidate case");
  }
  const auto& cfg = estimator.config();
  std::vector<double> scaled(candidates.size());
  const double divisor = cfg.backup == SoftBackup::MaxEntropy ? cfg.alpha : 1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    scaled[i] = q_ec(next_state, candidates[i], estimator, params).value / divisor;
  }
  return cfg.alpha * log_sum_exp(scaled);
}

double td_target(const Transition& transition, const QEstimator& estimator) {
  if (!transition.next_state) return transition.reward;
  return transition.reward + estimator.config().gamma *
                                 soft_value(*transition.next_state, transition.next_candidates,
                                            estimator, estimator.target());
}

double td_loss(const QEstimator& estimator, std::span<const Transition> batch,
               const KernelParams& params) {
  check_batch_nonempty(batch.size());
  double sum = 0.0;
  for (const auto& t : batch) {
    const double err = q_ec(t.state, t.case_id, estimator, params).value - td_target(t, estimator);
    sum += err * err;
  }
  return sum / static_cast<double>(batch.size());
}

double ce_loss(const QEstimator& estimator, std::span<const BinaryExample> batch,
               const KernelParams& params) {
  check_batch_nonempty(batch.size());
  double sum = 0.0;
  for (const auto& ex : batch) {
    check_binary(ex.reward);
    sum += bce(ex.reward, q_ec(ex.state, ex.case_id, estimator, params).value);
  }
  return sum / static_cast<double>(batch.size());
}

LossAndGradient td_loss_and_gradient(const QEstimator& estimator,
                                     std::span<const Transition> batch) {
  check_batch_nonempty(batch.size());
  const auto& params = estimator.params();
  const double n = static_cast<double>(batch.size());
  LossAndGradient out;
  out.gradient.d_diag_scale.assign(params.dimension(), 0.0);
  std::vector<double> scratch(params.dimension(), 0.0);
  for (const auto& t : batch) {
    const double target = td_target(t, estimator);
    const auto& records = estimator.dataset(t.case_id);
    // First pass for the residual, second to accumulate with its weight.
    double scratch_ell = 0.0;
    const double q = q_with_gradient(t.state, records, params, estimator.config().q0, 0.0, scratch,
                                     scratch_ell);
    const double err = q - target;
    out.loss += err * err / n;
    q_with_gradient(t.state, records, params, estimator.config().q0, 2.0 * err / n,
                    out.gradient.d_diag_scale, out.gradient.d_length_scale);
  }
  return out;
}

LossAndGradient ce_loss_and_gradient(const QEstimator& estimator,
                                     std::span<const BinaryExample> batch) {
  check_batch_nonempty(batch.size());
  const auto& params = estimator.params();
  const double n = static_cast<double>(batch.size());
  LossAndGradient out;
  out.gradient.d_diag_scale.assign(params.dimension(), 0.0);
  std::vector<double> scratch(params.dimension(), 0.0);
  for (const auto& ex : batch) {
    check_binary(ex.reward);
    const auto& records = estimator.dataset(ex.case_id);
    double scratch_ell = 0.0;
    const double q = q_with_gradient(ex.state, records, params, estimator.config().q0, 0.0,
                                     scratch, scratch_ell);
    out.loss += bce(ex.reward, q) / n;
    const double qc = clamp_probability(q);
    // The clamp has zero derivative outside (eps, 1 - eps).
    if (qc != q) continue;
    const double dloss_dq = -ex.reward / q + (1.0 - ex.reward) / (1.0 - q);
    q_with_gradient(ex.state, records, params, estimator.config().q0, dloss_dq / n,
                    out.gradient.d_diag_scale, out.gradient.d_length_scale);
  }
  return out;
}

UpdateResult td_update(QEstimator& estimator, std::span<const Transition> batch) {
  const double step = estimator.config().step_size;
  if (step < 0.0) fail(ErrorCode::Config, "step size must be non-negative");
  auto lg = td_loss_and_gradient(estimator, batch);
  estimator.apply_step(lg.gradient.d_diag_scale, lg.gradient.d_length_scale, step);
  return UpdateResult{lg.loss, std::move(lg.gradient)};
}

UpdateResult ce_update(QEstimator& estimator, std::span<const BinaryExample> batch) {
  const double step = estimator.config().step_size;
  if (step < 0.0) fail(ErrorCode::Config, "step size must be non-negative");
  auto lg = ce_loss_and_gradient(estimator, batch);
  estimator.apply_step(lg.gradient.d_diag_scale, lg.gradient.d_length_scale, step);
  return UpdateResult{lg.loss, std::move(lg.gradient)};
}

}  // namespace mathprep::retrieval
