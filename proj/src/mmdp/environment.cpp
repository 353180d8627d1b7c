#include "mathprep/mmdp/environment.hpp"

#include <cmath>

#include "mathprep/error.hpp"

namespace mathprep::mmdp {

void CompositeRewardConfig::check() const {
  for (double w : {quantitative, qualitative, binary}) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorCode::Config, "reward weights must be >= 0");
  }
  if (!(quantitative + qualitative + binary > 0.0)) {
    fail(ErrorCode::Config, "reward weights must not all be zero");
  }
}

double composite_reward(double quantitative, double qualitative, double binary,
                        const CompositeRewardConfig& config) {
  config.check();
  const double sum = config.quantitative + config.qualitative + config.binary;
  return (config.quantitative * quantitative + config.qualitative * qualitative +
          config.binary * binary) /
         sum;
}

}  // namespace mathprep::mmdp
