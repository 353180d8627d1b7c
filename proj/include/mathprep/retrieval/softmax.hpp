#pragma once

#include <span>
#include <string>
#include <vector>

#include "mathprep/retrieval/q_estimator.hpp"

namespace mathprep::retrieval {

/// log sum_i exp(x_i), max-shifted. Throws Error(InvalidArgument) when empty.
double log_sum_exp(std::span<const double> values);

/// exp(q_i / alpha) / sum_j exp(q_j / alpha) with max subtraction.
/// Throws Error(InvalidArgument) for an empty input or alpha <= 0.
std::vector<double> softmax(std::span<const double> q_values, double alpha);

/// Retrieval distribution over candidate cases from their Q_EC scores.
std::vector<double> retrieval_distribution(const Embedding& state,
                                           std::span<const std::string> candidate_ids,
                                           const QEstimator& estimator);

/// Shannon entropy in nats with 0 ln 0 = 0. Throws Error(Domain) on a
/// negative entry or a total differing from 1 by more than 1e-9.
double entropy(std::span<const double> probabilities);

}  // namespace mathprep::retrieval
