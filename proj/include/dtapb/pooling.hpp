#pragma once

#include <span>

#include "dtapb/core.hpp"

namespace dtapb {

/// Inverse-variance weighted mean.
double pool_fixed_effects(std::span<const EffectEstimate> estimates);

struct RandomEffectsPool {
  double theta_hat = 0;
  double tau2 = 0;
};

/// DerSimonian-Laird moment estimator of tau^2 and the matching pooled effect.
RandomEffectsPool pool_random_effects(std::span<const EffectEstimate> estimates);

}  // namespace dtapb
