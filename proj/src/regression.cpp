#include "dtapb/regression.hpp"

#include <cmath>
#include <limits>

#include "dtapb/core.hpp"

namespace dtapb {

RegressionFit weighted_least_squares(std::span<const double> x, std::span<const double> y,
                                     std::span<const double> w) {
  const std::size_t k = x.size();
  if (y.size() != k || w.size() != k) {
    throw Error(ErrorCode::LengthMismatch, "regression inputs differ in length");
  }
  if (k < kMinStudies) {
    throw Error(ErrorCode::TooFewStudies, "regression needs at least 3 points");
  }

  double sw = 0, swx = 0, swy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(w[i] >= 0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw Error(ErrorCode::InvalidArgument, "non-finite regression input or negative weight");
    }
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
  }
  if (!(sw > 0)) throw Error(ErrorCode::SingularDesign, "all regression weights are zero");
  const double xbar = swx / sw;
  const double ybar = swy / sw;

  double sxx = 0, sxy = 0, sxx_raw = 0, syy_raw = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dx = x[i] - xbar;
    sxx += w[i] * dx * dx;
    sxy += w[i] * dx * (y[i] - ybar);
    sxx_raw += w[i] * x[i] * x[i];
    syy_raw += w[i] * y[i] * y[i];
  }
  if (!(sxx > 1e-12 * sxx_raw) || sxx == 0) {
    throw Error(ErrorCode::SingularDesign, "predictor is constant across studies");
  }

  RegressionFit fit;
  fit.df = static_cast<int>(k) - 2;
  fit.b1 = sxy / sxx;
  fit.b0 = ybar - fit.b1 * xbar;

  double rss = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double e = y[i] - fit.b0 - fit.b1 * x[i];
    rss += w[i] * e * e;
  }
  const double eps = std::numeric_limits<double>::epsilon();
  fit.exact_fit = rss <= 1e3 * eps * eps * static_cast<double>(k) * syy_raw;

  const double sd_x = std::sqrt(sxx / sw);
  const double sd_y = std::sqrt(syy_raw / sw);
  fit.scale_b1 = sd_x > 0 ? sd_y / sd_x : 0;
  fit.scale_b0 = sd_y + std::abs(fit.b1 * xbar);

  if (fit.exact_fit) {
    fit.se_b0 = 0;
    fit.se_b1 = 0;
  } else {
    const double s2 = rss / fit.df;
    fit.se_b1 = std::sqrt(s2 / sxx);
    fit.se_b0 = std::sqrt(s2 * (1.0 / sw + xbar * xbar / sxx));
  }
  return fit;
}

double standardized(double coef, double se, bool exact_fit, double scale) {
  if (!exact_fit && se > 0) return coef / se;
  if (std::abs(coef) <= 1e-9 * scale || coef == 0) return 0.0;
  return coef > 0 ? std::numeric_limits<double>::infinity()
                  : -std::numeric_limits<double>::infinity();
}

}  // namespace dtapb
