#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dtapb/core.hpp"
#include "dtapb/regression.hpp"

namespace dtapb {

/// Coordinate plotted against the effect in a funnel plot.
enum class PrecisionAxis { SE, N, ESS, InvN };

enum class EggerAxis { SE, N };
enum class EggerWeighting { Unweighted, InvVarianceFixed, InvVarianceRandom };

struct EggerOptions {
  EggerAxis axis = EggerAxis::SE;
  EggerWeighting weighting = EggerWeighting::Unweighted;
  friend bool operator==(const EggerOptions&, const EggerOptions&) = default;
};

enum class MacaskillPredictor { N, InvSqrtEss, InvN };
enum class MacaskillWeighting { InvVarianceFixed, Ess, Peters };

struct MacaskillOptions {
  MacaskillPredictor predictor = MacaskillPredictor::N;
  MacaskillWeighting weighting = MacaskillWeighting::InvVarianceFixed;
  friend bool operator==(const MacaskillOptions&, const MacaskillOptions&) = default;
};

enum class BeggDispersion { Variance, InvN, InvEss };
enum class BeggStandardization { CenteredVariance, PlainSE };

struct BeggOptions {
  BeggDispersion dispersion = BeggDispersion::Variance;
  BeggStandardization standardization = BeggStandardization::CenteredVariance;
  friend bool operator==(const BeggOptions&, const BeggOptions&) = default;
};

enum class TrimFillAxis { SE, N };
enum class K0Estimator { R, L };

struct TrimFillOptions {
  TrimFillAxis axis = TrimFillAxis::SE;
  K0Estimator estimator = K0Estimator::R;
  int max_iterations = 50;
  friend bool operator==(const TrimFillOptions&, const TrimFillOptions&) = default;
};

// ---------------------------------------------------------------------------
// Regression tests

/// Regression of value/se on the precision axis; the intercept carries the
/// asymmetry signal.
RegressionFit egger_fit(std::span<const EffectEstimate> estimates, const EggerOptions& options);

/// One-sided alternative: intercept > 0.
AsymmetryTestResult egger_test(std::span<const EffectEstimate> estimates,
                               const EggerOptions& options, Sidedness sidedness, double alpha);

/// Weighted regression of value on a size predictor; the slope carries the
/// signal.
RegressionFit macaskill_fit(std::span<const EffectEstimate> estimates,
                            const MacaskillOptions& options);

/// One-sided alternative: slope < 0 for predictor N, slope > 0 for the
/// reciprocal predictors.
AsymmetryTestResult macaskill_test(std::span<const EffectEstimate> estimates,
                                   const MacaskillOptions& options, Sidedness sidedness,
                                   double alpha);

// ---------------------------------------------------------------------------
// Rank correlation

/// Standardized deviations from the fixed-effects pooled mean.
std::vector<double> begg_standardized(std::span<const EffectEstimate> estimates,
                                      BeggStandardization standardization);

std::vector<double> begg_dispersion(std::span<const EffectEstimate> estimates,
                                    BeggDispersion dispersion);

/// Sign of tau under the one-sided alternative (+1 or -1).
int begg_alternative(BeggDispersion dispersion);

AsymmetryTestResult begg_test(std::span<const EffectEstimate> estimates,
                              const BeggOptions& options, Sidedness sidedness, double alpha);

// ---------------------------------------------------------------------------
// Trim and fill

struct TrimFillState {
  double theta_hat = 0;
  std::vector<double> centered;  // t_i - theta_hat, all k studies
  std::vector<double> ranks;     // average ranks of |centered|, 1..k
  int gamma_plus = 0;            // rightmost run of positive ranks
  int r = -1;                    // gamma_plus - 1, before clamping
  double l = 0;                  // unrounded L estimator
  double positive_rank_sum = 0;
  bool rank_ties = false;
  int k0 = 0;                    // clamped to [0, k-1]
  int iterations = 0;
  bool converged = true;
};

/// Average ranks (1-based) of |v_i|.
std::vector<double> abs_ranks(std::span<const double> centered);

/// Length of the run of positive values among the largest |v_i|. A group of
/// tied |v_i| extends the run only if every member is positive.
int rightmost_run(std::span<const double> centered);

double l_from_rank_sum(double positive_rank_sum, std::size_t k);
double rank_sum_from_l(double l, std::size_t k);

/// P(gamma+ >= observed) when signs are independent fair coin flips.
double r_p_value(int gamma_plus, std::size_t k);

/// P(L >= observed) under the same sign model. Exact for untied ranks and
/// k <= kExactSignedRankMax; continuity-corrected normal approximation
/// otherwise.
double l_p_value(double l, std::size_t k, bool ties);
double l_p_value_normal(double l, std::size_t k);

inline constexpr std::size_t kExactSignedRankMax = 60;

TrimFillState trim_fill_estimate(std::span<const EffectEstimate> estimates,
                                 const TrimFillOptions& options);

/// Always one-sided: missing studies are assumed on the left of the funnel.
AsymmetryTestResult trim_fill_test(std::span<const EffectEstimate> estimates,
                                   const TrimFillOptions& options, double alpha);

// ---------------------------------------------------------------------------

struct FunnelPoint {
  double effect;
  double axis_value;
};

std::vector<FunnelPoint> funnel_points(std::span<const EffectEstimate> estimates,
                                       PrecisionAxis axis);

}  // namespace dtapb
