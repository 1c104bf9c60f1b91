#include "dtapb/distributions.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace dtapb {

namespace {

const boost::math::normal_distribution<double>& standard_normal() {
  static const boost::math::normal_distribution<double> dist(0.0, 1.0);
  return dist;
}

}  // namespace

double normal_cdf(double z) {
  if (std::isinf(z)) return z > 0 ? 1.0 : 0.0;
  return boost::math::cdf(standard_normal(), z);
}

double normal_upper(double z) {
  if (std::isinf(z)) return z > 0 ? 0.0 : 1.0;
  return boost::math::cdf(boost::math::complement(standard_normal(), z));
}

double t_upper(double t, double df) {
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  const boost::math::students_t_distribution<double> dist(df);
  return boost::math::cdf(boost::math::complement(dist, t));
}

double t_lower(double t, double df) {
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const boost::math::students_t_distribution<double> dist(df);
  return boost::math::cdf(dist, t);
}

double normal_quantile(double p) { return boost::math::quantile(standard_normal(), p); }

}  // namespace dtapb
