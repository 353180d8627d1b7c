#include "mathprep/retrieval/softmax.hpp"

#include <algorithm>
#include <cmath>

#include "mathprep/error.hpp"

namespace mathprep::retrieval {

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::InvalidArgument, "log-sum-exp of an empty set");
  double m = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - m);
  return m + std::log(sum);
}

std::vector<double> softmax(std::span<const double> q_values, double alpha) {
  if (q_values.empty()) fail(ErrorCode::InvalidArgument, "softmax needs at least one candidate");
  if (!(alpha > 0.0)) fail(ErrorCode::InvalidArgument, "temperature must be positive");
  double m = *std::max_element(q_values.begin(), q_values.end());
  std::vector<double> out(q_values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < q_values.size(); ++i) {
    out[i] = std::exp((q_values[i] - m) / alpha);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

std::vector<double> retrieval_distribution(const Embedding& state,
                                           std::span<const std::string> candidate_ids,
                                           const QEstimator& estimator) {
  std::vector<double> q(candidate_ids.size());
  for (std::size_t i = 0; i < candidate_ids.size(); ++i) {
    q[i] = q_ec(state, candidate_ids[i], estimator).value;
  }
  return softmax(q, estimator.config().alpha);
}

double entropy(std::span<const double> probabilities) {
  double total = 0.0;
  double h = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) fail(ErrorCode::Domain, "probabilities must be non-negative");
    total += p;
    if (p > 0.0) h -= p * std::log(p);
  }
  if (std::fabs(total - 1.0) > 1e-9) fail(ErrorCode::Domain, "probabilities must sum to 1");
  return h;
}

}  // namespace mathprep::retrieval
