#pragma once

#include <span>

namespace dtapb {

struct KendallResult {
  double tau = 0;      // tau-b
  double s = 0;        // concordant minus discordant pairs
  double var_s = 0;    // null variance of S, tie-corrected
  double p_upper = 0.5;  // P(S >= observed) under independence
  double p_lower = 0.5;  // P(S <= observed)
  bool exact = false;    // p-values from the exact permutation distribution
  double p_upper_normal = 0.5;  // normal approximation, reported even when exact
  double p_lower_normal = 0.5;

  double p_two_sided() const;
};

/// Largest sample size for which the exact permutation distribution is used
/// (untied data only).
inline constexpr std::size_t kKendallExactMax = 7;

/// Kendall's tau-b with a normal approximation (continuity corrected) for
/// its p-values, exact for small untied samples. If either variable is
/// constant, tau is 0 and both one-sided p-values are 0.5.
KendallResult kendall_tau(std::span<const double> xs, std::span<const double> ys);

}  // namespace dtapb
