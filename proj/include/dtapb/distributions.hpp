#pragma once

namespace dtapb {

double normal_cdf(double z);
/// P(Z > z) for standard normal Z.
double normal_upper(double z);
/// P(T > t) for Student's t with `df` degrees of freedom.
double t_upper(double t, double df);
/// P(T < t).
double t_lower(double t, double df);
double normal_quantile(double p);

}  // namespace dtapb
