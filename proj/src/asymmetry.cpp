#include "dtapb/asymmetry.hpp"

#include <algorithm>
#include <cmath>

#include "dtapb/distributions.hpp"
#include "dtapb/kendall.hpp"
#include "dtapb/pooling.hpp"
#include "dtapb/variant.hpp"

namespace dtapb {

namespace {

void require_studies(std::span<const EffectEstimate> estimates) {
  if (estimates.size() < kMinStudies) {
    throw Error(ErrorCode::TooFewStudies,
                "asymmetry tests need at least 3 studies, got " + std::to_string(estimates.size()));
  }
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (!(estimates[i].se > 0) || !std::isfinite(estimates[i].value)) {
      throw Error(ErrorCode::DegenerateSE, "estimate without a positive standard error", i);
    }
  }
}

// p-value of a t statistic; `direction` is +1 when large values favour the
// alternative, -1 when small values do.
double t_p_value(double stat, double df, int direction, Sidedness sidedness) {
  if (sidedness == Sidedness::TwoSided) {
    return std::min(1.0, 2.0 * t_upper(std::abs(stat), df));
  }
  return direction > 0 ? t_upper(stat, df) : t_lower(stat, df);
}

AsymmetryTestResult finish(std::string id, double stat, double p, Sidedness sidedness,
                           double alpha) {
  AsymmetryTestResult r;
  r.test_id = std::move(id);
  r.statistic = stat;
  r.p_value = std::clamp(p, 0.0, 1.0);
  r.sidedness = sidedness;
  r.alpha = alpha;
  r.reject = r.p_value <= alpha;
  return r;
}

MeasureId measure_of(std::span<const EffectEstimate> estimates) { return estimates.front().measure; }

}  // namespace

RegressionFit egger_fit(std::span<const EffectEstimate> estimates, const EggerOptions& options) {
  require_studies(estimates);
  const std::size_t k = estimates.size();
  std::vector<double> x(k), y(k), w(k, 1.0);
  double tau2 = 0;
  if (options.weighting == EggerWeighting::InvVarianceRandom) {
    tau2 = pool_random_effects(estimates).tau2;
  }
  for (std::size_t i = 0; i < k; ++i) {
    const auto& e = estimates[i];
    y[i] = e.value / e.se;
    x[i] = options.axis == EggerAxis::SE ? 1.0 / e.se : e.n;
    switch (options.weighting) {
      case EggerWeighting::Unweighted: break;
      case EggerWeighting::InvVarianceFixed: w[i] = 1.0 / e.variance(); break;
      case EggerWeighting::InvVarianceRandom: w[i] = 1.0 / (e.variance() + tau2); break;
    }
  }
  return weighted_least_squares(x, y, w);
}

AsymmetryTestResult egger_test(std::span<const EffectEstimate> estimates,
                               const EggerOptions& options, Sidedness sidedness, double alpha) {
  const auto fit = egger_fit(estimates, options);
  const double stat = standardized(fit.b0, fit.se_b0, fit.exact_fit, fit.scale_b0);
  const double p = t_p_value(stat, fit.df, +1, sidedness);
  return finish(TestVariant::make_egger(measure_of(estimates), options, sidedness).short_name(),
                stat, p, sidedness, alpha);
}

RegressionFit macaskill_fit(std::span<const EffectEstimate> estimates,
                            const MacaskillOptions& options) {
  require_studies(estimates);
  const std::size_t k = estimates.size();
  std::vector<double> x(k), y(k), w(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& e = estimates[i];
    y[i] = e.value;
    switch (options.predictor) {
      case MacaskillPredictor::N: x[i] = e.n; break;
      case MacaskillPredictor::InvSqrtEss: x[i] = 1.0 / std::sqrt(e.ess); break;
      case MacaskillPredictor::InvN: x[i] = 1.0 / e.n; break;
    }
    switch (options.weighting) {
      case MacaskillWeighting::InvVarianceFixed: w[i] = 1.0 / e.variance(); break;
      case MacaskillWeighting::Ess: w[i] = e.ess; break;
      case MacaskillWeighting::Peters: w[i] = e.n > 0 ? e.m1 * e.m2 / e.n : 0.0; break;
    }
  }
  return weighted_least_squares(x, y, w);
}

AsymmetryTestResult macaskill_test(std::span<const EffectEstimate> estimates,
                                   const MacaskillOptions& options, Sidedness sidedness,
                                   double alpha) {
  const auto fit = macaskill_fit(estimates, options);
  const double stat = standardized(fit.b1, fit.se_b1, fit.exact_fit, fit.scale_b1);
  const int direction = options.predictor == MacaskillPredictor::N ? -1 : +1;
  const double p = t_p_value(stat, fit.df, direction, sidedness);
  return finish(
      TestVariant::make_macaskill(measure_of(estimates), options, sidedness).short_name(), stat,
      p, sidedness, alpha);
}

std::vector<double> begg_standardized(std::span<const EffectEstimate> estimates,
                                      BeggStandardization standardization) {
  const double t_bar = pool_fixed_effects(estimates);
  double sw = 0;
  for (const auto& e : estimates) sw += 1.0 / e.variance();
  std::vector<double> out;
  out.reserve(estimates.size());
  for (const auto& e : estimates) {
    double var = e.variance();
    if (standardization == BeggStandardization::CenteredVariance) var -= 1.0 / sw;
    out.push_back(var > 0 ? (e.value - t_bar) / std::sqrt(var) : 0.0);
  }
  return out;
}

std::vector<double> begg_dispersion(std::span<const EffectEstimate> estimates,
                                    BeggDispersion dispersion) {
  std::vector<double> out;
  out.reserve(estimates.size());
  for (const auto& e : estimates) {
    switch (dispersion) {
      case BeggDispersion::Variance: out.push_back(e.variance()); break;
      case BeggDispersion::InvN: out.push_back(1.0 / e.n); break;
      case BeggDispersion::InvEss: out.push_back(1.0 / e.ess); break;
    }
  }
  return out;
}

int begg_alternative(BeggDispersion) {
  // Every dispersion grows as studies get smaller, so suppression of small
  // low-accuracy studies shows up as a positive association.
  return +1;
}

AsymmetryTestResult begg_test(std::span<const EffectEstimate> estimates,
                              const BeggOptions& options, Sidedness sidedness, double alpha) {
  require_studies(estimates);
  const auto disp = begg_dispersion(estimates, options.dispersion);
  bool all_tied = true;
  for (double d : disp) all_tied = all_tied && d == disp.front();
  if (all_tied) throw Error(ErrorCode::AllTied, "dispersion values are all equal");

  const auto stdz = begg_standardized(estimates, options.standardization);
  const auto kt = kendall_tau(stdz, disp);
  double p = 0;
  if (sidedness == Sidedness::TwoSided) {
    p = kt.p_two_sided();
  } else {
    p = begg_alternative(options.dispersion) > 0 ? kt.p_upper : kt.p_lower;
  }
  return finish(TestVariant::make_begg(measure_of(estimates), options, sidedness).short_name(),
                kt.tau, p, sidedness, alpha);
}

std::vector<FunnelPoint> funnel_points(std::span<const EffectEstimate> estimates,
                                       PrecisionAxis axis) {
  std::vector<FunnelPoint> out;
  out.reserve(estimates.size());
  for (const auto& e : estimates) {
    double a = 0;
    switch (axis) {
      case PrecisionAxis::SE: a = 1.0 / e.se; break;
      case PrecisionAxis::N: a = e.n; break;
      case PrecisionAxis::ESS: a = e.ess; break;
      case PrecisionAxis::InvN: a = 1.0 / e.n; break;
    }
    out.push_back({e.value, a});
  }
  return out;
}

}  // namespace dtapb
