#include <algorithm>
#include <cmath>
#include <numeric>

#include "dtapb/asymmetry.hpp"
#include "dtapb/distributions.hpp"
#include "dtapb/pooling.hpp"
#include "dtapb/variant.hpp"

namespace dtapb {

namespace {

std::vector<std::size_t> order_by_abs_desc(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(v[a]) > std::abs(v[b]); });
  return idx;
}

double pooled_effect(std::span<const EffectEstimate> subset, TrimFillAxis axis) {
  if (axis == TrimFillAxis::N) {
    double sw = 0, swt = 0;
    for (const auto& e : subset) {
      sw += e.n;
      swt += e.n * e.value;
    }
    return swt / sw;
  }
  if (subset.size() < 2) return subset.front().value;
  return pool_random_effects(subset).theta_hat;
}

// P(S+ >= s) for the Wilcoxon signed-rank sum over ranks 1..k.
double signed_rank_upper_exact(double s, std::size_t k) {
  const std::size_t max_sum = k * (k + 1) / 2;
  std::vector<double> count(max_sum + 1, 0.0);
  count[0] = 1.0;
  std::size_t reach = 0;
  for (std::size_t r = 1; r <= k; ++r) {
    reach += r;
    for (std::size_t t = reach; t >= r; --t) count[t] += count[t - r];
  }
  const double total = std::ldexp(1.0, static_cast<int>(k));
  const auto from = static_cast<std::int64_t>(std::ceil(s - 1e-9));
  double tail = 0;
  for (std::int64_t t = std::max<std::int64_t>(from, 0); t <= static_cast<std::int64_t>(max_sum); ++t) {
    tail += count[static_cast<std::size_t>(t)];
  }
  return tail / total;
}

}  // namespace

std::vector<double> abs_ranks(std::span<const double> centered) {
  const auto idx = order_by_abs_desc(centered);
  const std::size_t k = centered.size();
  std::vector<double> ranks(k);
  std::size_t i = 0;
  while (i < k) {
    std::size_t j = i;
    while (j + 1 < k && std::abs(centered[idx[j + 1]]) == std::abs(centered[idx[i]])) ++j;
    // positions i..j (descending) hold ranks k-i .. k-j
    const double avg = (static_cast<double>(k - i) + static_cast<double>(k - j)) / 2.0;
    for (std::size_t p = i; p <= j; ++p) ranks[idx[p]] = avg;
    i = j + 1;
  }
  return ranks;
}

int rightmost_run(std::span<const double> centered) {
  const auto idx = order_by_abs_desc(centered);
  const std::size_t k = centered.size();
  int run = 0;
  std::size_t i = 0;
  while (i < k) {
    std::size_t j = i;
    while (j + 1 < k && std::abs(centered[idx[j + 1]]) == std::abs(centered[idx[i]])) ++j;
    for (std::size_t p = i; p <= j; ++p) {
      if (!(centered[idx[p]] > 0)) return run;
    }
    run += static_cast<int>(j - i + 1);
    i = j + 1;
  }
  return run;
}

double l_from_rank_sum(double positive_rank_sum, std::size_t k) {
  const double kd = static_cast<double>(k);
  return (4.0 * positive_rank_sum - kd * (kd + 1)) / (2.0 * kd - 1);
}

double rank_sum_from_l(double l, std::size_t k) {
  const double kd = static_cast<double>(k);
  return (l * (2.0 * kd - 1) + kd * (kd + 1)) / 4.0;
}

double r_p_value(int gamma_plus, std::size_t k) {
  const int g = std::clamp(gamma_plus, 0, static_cast<int>(k));
  return std::ldexp(1.0, -g);
}

double l_p_value_normal(double l, std::size_t k) {
  const double kd = static_cast<double>(k);
  const double s = rank_sum_from_l(l, k);
  const double mean = kd * (kd + 1) / 4.0;
  const double var = kd * (kd + 1) * (2 * kd + 1) / 24.0;
  return normal_upper((s - 0.5 - mean) / std::sqrt(var));
}

double l_p_value(double l, std::size_t k, bool ties) {
  if (!ties && k <= kExactSignedRankMax) {
    return signed_rank_upper_exact(rank_sum_from_l(l, k), k);
  }
  return l_p_value_normal(l, k);
}

TrimFillState trim_fill_estimate(std::span<const EffectEstimate> estimates,
                                 const TrimFillOptions& options) {
  const std::size_t k = estimates.size();
  if (k < kMinStudies) {
    throw Error(ErrorCode::TooFewStudies, "trim and fill needs at least 3 studies");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!(estimates[i].se > 0)) {
      throw Error(ErrorCode::DegenerateSE, "estimate without a positive standard error", i);
    }
  }

  // Studies in decreasing order of effect; trimming removes a prefix.
  std::vector<std::size_t> by_value(k);
  std::iota(by_value.begin(), by_value.end(), 0);
  std::stable_sort(by_value.begin(), by_value.end(), [&](std::size_t a, std::size_t b) {
    return estimates[a].value > estimates[b].value;
  });

  TrimFillState st;
  st.converged = false;
  int trimmed = 0;
  std::vector<EffectEstimate> subset;
  subset.reserve(k);
  for (int it = 1; it <= options.max_iterations; ++it) {
    subset.clear();
    for (std::size_t p = static_cast<std::size_t>(trimmed); p < k; ++p) {
      subset.push_back(estimates[by_value[p]]);
    }
    st.theta_hat = pooled_effect(subset, options.axis);
    st.centered.resize(k);
    for (std::size_t i = 0; i < k; ++i) st.centered[i] = estimates[i].value - st.theta_hat;

    st.ranks = abs_ranks(st.centered);
    st.gamma_plus = rightmost_run(st.centered);
    st.r = st.gamma_plus - 1;
    st.positive_rank_sum = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (st.centered[i] > 0) st.positive_rank_sum += st.ranks[i];
    }
    auto sorted = st.ranks;
    std::sort(sorted.begin(), sorted.end());
    st.rank_ties = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
    st.l = l_from_rank_sum(st.positive_rank_sum, k);

    const double raw = options.estimator == K0Estimator::R ? static_cast<double>(st.r) : st.l;
    st.k0 = static_cast<int>(std::clamp<std::int64_t>(round_half_up(raw), 0,
                                                      static_cast<std::int64_t>(k) - 1));
    st.iterations = it;
    if (st.k0 == trimmed) {
      st.converged = true;
      break;
    }
    trimmed = st.k0;
  }
  return st;
}

AsymmetryTestResult trim_fill_test(std::span<const EffectEstimate> estimates,
                                   const TrimFillOptions& options, double alpha) {
  const auto st = trim_fill_estimate(estimates, options);
  const std::size_t k = estimates.size();

  AsymmetryTestResult r;
  r.test_id = TestVariant::make_trim_fill(estimates.front().measure, options).short_name();
  r.sidedness = Sidedness::OneSided;
  r.alpha = alpha;
  if (options.estimator == K0Estimator::R) {
    r.statistic = st.r;
    r.p_value = r_p_value(st.gamma_plus, k);
  } else {
    r.statistic = st.l;
    r.p_value = l_p_value(st.l, k, st.rank_ties);
  }
  r.reject = r.p_value <= alpha;
  r.k0 = st.k0;
  r.pooled_effect = st.theta_hat;
  r.converged = st.converged;
  if (!st.converged) {
    r.warnings.push_back("trim and fill did not converge within " +
                         std::to_string(options.max_iterations) + " iterations");
  }
  if (options.estimator == K0Estimator::R && st.r < 0) {
    r.warnings.push_back("R = -1 clamped to k0 = 0");
  }
  return r;
}

}  // namespace dtapb
