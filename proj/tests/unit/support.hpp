#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dtapb/core.hpp"

namespace dtapb::testing {

inline EffectEstimate est(double value, double se, double n = 100, double ess = 0) {
  EffectEstimate e;
  e.value = value;
  e.se = se;
  e.n = n;
  e.ess = ess > 0 ? ess : n;
  return e;
}

inline std::vector<EffectEstimate> random_estimates(std::mt19937_64& rng, std::size_t k,
                                                    double mean = 0.0) {
  std::uniform_real_distribution<double> se_dist(0.1, 1.0);
  std::uniform_int_distribution<int> n_dist(50, 1000);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<EffectEstimate> out;
  for (std::size_t i = 0; i < k; ++i) {
    const double se = se_dist(rng);
    const double n = n_dist(rng);
    auto e = est(mean + se * z(rng), se, n, 0.9 * n);
    e.m1 = std::round(0.35 * n);
    e.m2 = n - e.m1;
    out.push_back(e);
  }
  return out;
}

#define EXPECT_DTAPB_ERROR(stmt, expected_code)                        \
  do {                                                                 \
    try {                                                              \
      stmt;                                                            \
      ADD_FAILURE() << "expected dtapb::Error from " #stmt;            \
    } catch (const ::dtapb::Error& e) {                                \
      EXPECT_EQ(e.code(), expected_code) << e.what();                  \
    }                                                                  \
  } while (0)

}  // namespace dtapb::testing
