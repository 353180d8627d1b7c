#include "mathprep/retrieval/kernel.hpp"

#include <cmath>
#include <string>

#include "mathprep/error.hpp"

namespace mathprep::retrieval {

KernelParams KernelParams::isotropic(std::size_t dimension, double scale, double length_scale) {
  KernelParams params{std::vector<double>(dimension, scale), length_scale};
  params.check();
  return params;
}

void KernelParams::check() const {
  if (diag_scale.empty()) fail(ErrorCode::Config, "kernel needs at least one dimension");
  for (double w : diag_scale) {
    if (!std::isfinite(w) || w <= 0.0) fail(ErrorCode::Config, "diag_scale entries must be positive");
  }
  if (!std::isfinite(length_scale) || length_scale <= 0.0) {
    fail(ErrorCode::Config, "length_scale must be positive");
  }
}

double weighted_sq_distance(const KernelParams& params, const Embedding& a, const Embedding& b) {
  if (a.size() != b.size() || a.size() != params.dimension()) {
    fail(ErrorCode::Shape, "kernel dimension mismatch: params " +
                               std::to_string(params.dimension()) + ", inputs " +
                               std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = params.diag_scale[i] * (a[i] - b[i]);
    sum += d * d;
  }
  return sum;
}

double kernel_log_value(const KernelParams& params, const Embedding& a, const Embedding& b) {
  return -weighted_sq_distance(params, a, b) / (2.0 * params.length_scale * params.length_scale);
}

double kernel_value(const KernelParams& params, const Embedding& a, const Embedding& b) {
  return std::exp(kernel_log_value(params, a, b));
}

}  // namespace mathprep::retrieval
