#pragma once

#include <vector>

#include "mathprep/retrieval/embedding.hpp"

namespace mathprep::retrieval {

/// Anisotropic RBF kernel parameters:
///   k(a, b) = exp(-|| diag(diag_scale) (a - b) ||^2 / (2 length_scale^2))
struct KernelParams {
  std::vector<double> diag_scale;
  double length_scale = 1.0;

  static KernelParams isotropic(std::size_t dimension, double scale = 1.0,
                                double length_scale = 1.0);
  std::size_t dimension() const noexcept { return diag_scale.size(); }
  /// Throws Error(Config) unless every entry is finite and positive.
  void check() const;

  bool operator==(const KernelParams&) const = default;
};

/// Target parameters are a frozen copy of the online parameters.
using TargetParams = KernelParams;

/// ||W (a - b)||^2, throws Error(Shape) on mismatched dimensions.
double weighted_sq_distance(const KernelParams& params, const Embedding& a, const Embedding& b);
/// log k(a, b).
double kernel_log_value(const KernelParams& params, const Embedding& a, const Embedding& b);
double kernel_value(const KernelParams& params, const Embedding& a, const Embedding& b);

}  // namespace mathprep::retrieval
