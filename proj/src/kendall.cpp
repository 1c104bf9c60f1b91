#include "dtapb/kendall.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "dtapb/core.hpp"
#include "dtapb/distributions.hpp"

namespace dtapb {

namespace {

// Number of permutations of n items with each inversion count (Mahonian numbers).
std::vector<double> inversion_counts(std::size_t n) {
  std::vector<double> dist{1.0};
  for (std::size_t m = 2; m <= n; ++m) {
    std::vector<double> next(dist.size() + m - 1, 0.0);
    for (std::size_t i = 0; i < dist.size(); ++i) {
      for (std::size_t j = 0; j < m; ++j) next[i + j] += dist[i];
    }
    dist = std::move(next);
  }
  return dist;
}

const std::vector<double>& exact_distribution(std::size_t n) {
  static const auto table = [] {
    std::array<std::vector<double>, kKendallExactMax + 1> t;
    for (std::size_t m = 1; m <= kKendallExactMax; ++m) t[m] = inversion_counts(m);
    return t;
  }();
  return table[n];
}

struct TieSums {
  double pairs = 0;  // sum t(t-1)/2
  double v = 0;      // sum t(t-1)(2t+5)
  double a = 0;      // sum t(t-1)
  double b = 0;      // sum t(t-1)(t-2)
  bool any = false;
};

TieSums tie_sums(std::span<const double> v) {
  std::map<double, int> counts;
  for (double x : v) ++counts[x];
  TieSums s;
  for (const auto& [value, c] : counts) {
    if (c < 2) continue;
    const double t = c;
    s.any = true;
    s.pairs += t * (t - 1) / 2;
    s.v += t * (t - 1) * (2 * t + 5);
    s.a += t * (t - 1);
    s.b += t * (t - 1) * (t - 2);
  }
  return s;
}

}  // namespace

double KendallResult::p_two_sided() const { return std::min(1.0, 2.0 * std::min(p_upper, p_lower)); }

KendallResult kendall_tau(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::LengthMismatch, "kendall_tau inputs differ in length");
  }
  const std::size_t n = xs.size();
  if (n < kMinStudies) throw Error(ErrorCode::TooFewStudies, "kendall_tau needs at least 3 pairs");

  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = xs[i] - xs[j];
      const double dy = ys[i] - ys[j];
      const double prod = dx * dy;
      if (prod > 0) {
        s += 1;
      } else if (prod < 0) {
        s -= 1;
      }
    }
  }

  const double nd = static_cast<double>(n);
  const double n0 = nd * (nd - 1) / 2;
  const TieSums tx = tie_sums(xs);
  const TieSums ty = tie_sums(ys);

  KendallResult r;
  r.s = s;
  const double denom = (n0 - tx.pairs) * (n0 - ty.pairs);
  if (!(denom > 0)) return r;
  r.tau = s / std::sqrt(denom);

  r.var_s = (nd * (nd - 1) * (2 * nd + 5) - tx.v - ty.v) / 18.0 +
            tx.a * ty.a / (2 * nd * (nd - 1)) +
            (n > 2 ? tx.b * ty.b / (9 * nd * (nd - 1) * (nd - 2)) : 0.0);

  const double sd = std::sqrt(r.var_s);
  r.p_upper_normal = std::min(1.0, normal_upper((s - 1.0) / sd));
  r.p_lower_normal = std::min(1.0, normal_cdf((s + 1.0) / sd));
  r.p_upper = r.p_upper_normal;
  r.p_lower = r.p_lower_normal;

  if (!tx.any && !ty.any && n <= kKendallExactMax) {
    const auto& dist = exact_distribution(n);
    double total = 0, upper = 0, lower = 0;
    for (std::size_t inv = 0; inv < dist.size(); ++inv) {
      const double s_perm = n0 - 2.0 * static_cast<double>(inv);
      total += dist[inv];
      if (s_perm >= s - 0.5) upper += dist[inv];
      if (s_perm <= s + 0.5) lower += dist[inv];
    }
    r.p_upper = upper / total;
    r.p_lower = lower / total;
    r.exact = true;
  }
  return r;
}

}  // namespace dtapb
