#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mathprep/retrieval/q_estimator.hpp"

namespace mathprep::retrieval {

/// One TD sample (s, c, r, s') together with the candidate cases at s'.
/// A missing next state marks a terminal transition.
struct Transition {
  Embedding state;
  std::string case_id;
  double reward = 0.0;
  std::optional<Embedding> next_state;
  std::vector<std::string> next_candidates;
};

/// One binary-outcome sample for the success-probability regime.
struct BinaryExample {
  Embedding state;
  std::string case_id;
  double reward = 0.0;  // must be 0 or 1
};

/// Partial derivatives of a loss with respect to the kernel parameters.
struct Gradient {
  std::vector<double> d_diag_scale;
  double d_length_scale = 0.0;
};

struct LossAndGradient {
  double loss = 0.0;
  Gradient gradient;
};

inline constexpr double kProbabilityClamp = 1e-7;

/// Soft value of s' over its candidates, evaluated with `params`.
double soft_value(const Embedding& next_state, std::span<const std::string> candidates,
                  const QEstimator& estimator, const KernelParams& params);

/// r + gamma * soft_value(s') under the target parameters; r when terminal.
double td_target(const Transition& transition, const QEstimator& estimator);

/// Mean squared TD error with Q evaluated at `params` and targets under the
/// estimator's frozen target parameters.
double td_loss(const QEstimator& estimator, std::span<const Transition> batch,
               const KernelParams& params);
/// Mean binary cross-entropy with Q clamped to [1e-7, 1 - 1e-7].
/// Throws Error(Domain) when a reward is not 0 or 1.
double ce_loss(const QEstimator& estimator, std::span<const BinaryExample> batch,
               const KernelParams& params);

/// Analytic gradients through the kernel-weighted estimate.
LossAndGradient td_loss_and_gradient(const QEstimator& estimator,
                                     std::span<const Transition> batch);
LossAndGradient ce_loss_and_gradient(const QEstimator& estimator,
                                     std::span<const BinaryExample> batch);

struct UpdateResult {
  double loss = 0.0;
  Gradient gradient;
};

/// One gradient step with the configured step size. A zero step leaves the
/// estimator untouched; a negative one throws Error(Config). An empty batch
/// throws Error(InvalidArgument).
UpdateResult td_update(QEstimator& estimator, std::span<const Transition> batch);
UpdateResult ce_update(QEstimator& estimator, std::span<const BinaryExample> batch);

}  // namespace mathprep::retrieval
