#pragma once

#include <span>

namespace dtapb {

/// Weighted least-squares fit of y = b0 + b1 * x.
///
/// Standard errors use the residual scale estimate sum(w e^2) / (k - 2), the
/// convention of ordinary weighted regression. When the residuals vanish to
/// rounding precision `exact_fit` is set and both standard errors are zero.
struct RegressionFit {
  double b0 = 0;
  double b1 = 0;
  double se_b0 = 0;
  double se_b1 = 0;
  int df = 0;
  bool exact_fit = false;
  /// Magnitude references used to decide whether a coefficient of an exact
  /// fit is zero.
  double scale_b0 = 0;
  double scale_b1 = 0;
};

RegressionFit weighted_least_squares(std::span<const double> x, std::span<const double> y,
                                     std::span<const double> w);

/// Coefficient over its standard error. For exact fits the ratio is 0 when
/// the coefficient is zero to rounding precision and +/-inf otherwise.
double standardized(double coef, double se, bool exact_fit, double scale);

}  // namespace dtapb
