#include "dtapb/pooling.hpp"

#include <algorithm>

namespace dtapb {

double pool_fixed_effects(std::span<const EffectEstimate> estimates) {
  if (estimates.empty()) throw Error(ErrorCode::EmptyInput, "no estimates to pool");
  double sw = 0, swt = 0;
  for (const auto& e : estimates) {
    const double w = 1.0 / e.variance();
    sw += w;
    swt += w * e.value;
  }
  return swt / sw;
}

RandomEffectsPool pool_random_effects(std::span<const EffectEstimate> estimates) {
  const std::size_t k = estimates.size();
  if (k < 2) throw Error(ErrorCode::TooFewStudies, "random-effects pooling needs k >= 2");

  double sw = 0, sw2 = 0, swt = 0;
  for (const auto& e : estimates) {
    const double w = 1.0 / e.variance();
    sw += w;
    sw2 += w * w;
    swt += w * e.value;
  }
  const double t_bar = swt / sw;
  double q = 0;
  for (const auto& e : estimates) {
    const double d = e.value - t_bar;
    q += d * d / e.variance();
  }
  const double c = sw - sw2 / sw;
  RandomEffectsPool out;
  out.tau2 = c > 0 ? std::max(0.0, (q - static_cast<double>(k - 1)) / c) : 0.0;

  double sw_re = 0, swt_re = 0;
  for (const auto& e : estimates) {
    const double w = 1.0 / (e.variance() + out.tau2);
    sw_re += w;
    swt_re += w * e.value;
  }
  out.theta_hat = swt_re / sw_re;
  return out;
}

}  // namespace dtapb
