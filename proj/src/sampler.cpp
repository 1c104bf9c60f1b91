#include "dtapb/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/random/binomial_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace dtapb {

namespace {

constexpr std::uint64_t kShuffleStream = 1ULL << 40;

// Square root of the covariance; zero matrix when Sigma = 0.
Eigen::Matrix2d covariance_root(const BivariateParams& p) {
  if (p.is_zero_covariance()) return Eigen::Matrix2d::Zero();
  Eigen::Matrix2d s;
  s << p.sigma_a2, p.sigma_ab, p.sigma_ab, p.sigma_b2;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(s);
  const auto& ev = solver.eigenvalues();
  const double tol = 1e-12 * std::max(1.0, s.cwiseAbs().maxCoeff());
  if (ev(0) < -tol) {
    throw Error(ErrorCode::NonPSDCovariance, "covariance matrix is not positive semi-definite");
  }
  const Eigen::Vector2d root = ev.cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * root.asDiagonal() * solver.eigenvectors().transpose();
}

LogitPair draw_pair(const BivariateParams& p, const Eigen::Matrix2d& root, bool degenerate,
                    CounterRng& rng) {
  if (degenerate) return {p.mu[0], p.mu[1]};
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  const double z0 = normal(rng);
  const double z1 = normal(rng);
  return {p.mu[0] + root(0, 0) * z0 + root(0, 1) * z1,
          p.mu[1] + root(1, 0) * z0 + root(1, 1) * z1};
}

std::int64_t binomial(std::int64_t n, double prob, CounterRng& rng) {
  if (prob <= 0.0) return 0;
  if (prob >= 1.0) return n;
  boost::random::binomial_distribution<std::int64_t, double> dist(n, prob);
  return dist(rng);
}

std::pair<std::int64_t, std::int64_t> draw_size(const SimCondition& c, CounterRng& rng) {
  boost::random::uniform_int_distribution<std::int64_t> uni(c.n_min, c.n_max);
  const std::int64_t n = uni(rng);
  const std::int64_t n1 = std::clamp<std::int64_t>(round_half_up(c.pi * static_cast<double>(n)), 1,
                                                   std::max<std::int64_t>(n - 1, 1));
  return {n1, n - n1};
}

double observed_youden(const StudyTable& t) {
  return static_cast<double>(t.x) / static_cast<double>(t.n1()) +
         static_cast<double>(t.z) / static_cast<double>(t.n2()) - 1.0;
}

}  // namespace

BiasSpec BiasSpec::selection(double fraction) {
  BiasSpec b;
  b.mechanism = BiasMechanism::Selection;
  b.selection_fraction = fraction;
  return b;
}

BiasSpec BiasSpec::mixture(double eta_a, double eta_b) {
  BiasSpec b;
  b.mechanism = BiasMechanism::Mixture;
  b.eta = {eta_a, eta_b};
  return b;
}

std::string BiasSpec::label() const {
  switch (mechanism) {
    case BiasMechanism::None: return "none";
    case BiasMechanism::Selection: return "selection";
    case BiasMechanism::Mixture: return "mixture";
  }
  return "?";
}

double BiasSpec::strength() const {
  switch (mechanism) {
    case BiasMechanism::None: return 0;
    case BiasMechanism::Selection: return selection_fraction;
    case BiasMechanism::Mixture: return eta[0];
  }
  return 0;
}

std::string BiasSpec::describe() const {
  if (mechanism == BiasMechanism::None) return "none";
  std::ostringstream os;
  os << label() << "(" << strength() << ")";
  return os.str();
}

void validate_condition(const SimCondition& c) {
  if (c.k < static_cast<int>(kMinStudies)) {
    throw Error(ErrorCode::InvalidArgument, "condition needs k >= 3");
  }
  if (!(c.pi > 0 && c.pi < 1)) throw Error(ErrorCode::InvalidArgument, "prevalence must be in (0, 1)");
  if (c.n_min < 2 || c.n_min > c.n_max) {
    throw Error(ErrorCode::InvalidArgument, "need 2 <= n_min <= n_max");
  }
  const auto& b = c.bias;
  if (b.mechanism == BiasMechanism::Selection &&
      !(b.selection_fraction >= 0 && b.selection_fraction < 1)) {
    throw Error(ErrorCode::InvalidArgument, "selection fraction must be in [0, 1)");
  }
  if (b.mechanism == BiasMechanism::Mixture) {
    if (b.eta[0] < 0 || b.eta[1] > 0) {
      throw Error(ErrorCode::InvalidArgument, "mixture shift must have eta_A >= 0 and eta_B <= 0");
    }
    if (!(b.mixture_fraction >= 0 && b.mixture_fraction <= 1)) {
      throw Error(ErrorCode::InvalidArgument, "mixture fraction must be in [0, 1]");
    }
  }
  covariance_root(c.params);
}

std::vector<LogitPair> sample_logit_pairs(const BivariateParams& params, std::size_t count,
                                          CounterRng& rng) {
  const auto root = covariance_root(params);
  const bool degenerate = params.is_zero_covariance();
  std::vector<LogitPair> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(draw_pair(params, root, degenerate, rng));
  return out;
}

StudyTable realize_study(double theta_a, double theta_b, std::int64_t n1, std::int64_t n2,
                         CounterRng& rng) {
  StudyTable t;
  t.x = binomial(n1, logistic(theta_a), rng);
  t.y = binomial(n2, logistic(theta_b), rng);
  t.w = n1 - t.x;
  t.z = n2 - t.y;
  return t;
}

std::vector<std::pair<std::int64_t, std::int64_t>> sample_sizes(const SimCondition& condition,
                                                                std::size_t count,
                                                                CounterRng& rng) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(draw_size(condition, rng));
  return out;
}

GeneratedMeta generate_meta_analysis_detailed(const SimCondition& c, const ReplicateKey& key) {
  validate_condition(c);
  const auto root = covariance_root(c.params);
  const bool degenerate = c.params.is_zero_covariance();
  const auto k = static_cast<std::size_t>(c.k);

  std::size_t total = k;
  std::size_t shifted_count = 0;
  if (c.bias.mechanism == BiasMechanism::Selection) {
    total += static_cast<std::size_t>(round_half_up(c.bias.selection_fraction * c.k));
  } else if (c.bias.mechanism == BiasMechanism::Mixture) {
    shifted_count = static_cast<std::size_t>(round_half_up(c.bias.mixture_fraction * c.k));
  }

  BivariateParams shifted_params = c.params;
  shifted_params.mu[0] += c.bias.eta[0];
  shifted_params.mu[1] += c.bias.eta[1];

  std::vector<StudyTable> tables(total);
  std::vector<double> true_youden(total);
  std::vector<bool> shifted(total, false);
  for (std::size_t i = 0; i < total; ++i) {
    auto rng = key.stream(i);
    const auto [n1, n2] = draw_size(c, rng);
    shifted[i] = i < shifted_count;
    const auto& params = shifted[i] ? shifted_params : c.params;
    const auto pair = draw_pair(params, root, degenerate, rng);
    tables[i] = realize_study(pair.theta_a, pair.theta_b, n1, n2, rng);
    true_youden[i] = logistic(pair.theta_a) - logistic(pair.theta_b);
  }

  GeneratedMeta out;
  if (c.bias.mechanism == BiasMechanism::Selection) {
    std::vector<double> score(total);
    for (std::size_t i = 0; i < total; ++i) {
      score[i] = c.bias.select_on_true_youden ? true_youden[i] : observed_youden(tables[i]);
    }
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    // Lowest Youden first; on ties the smaller study goes first.
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (score[a] != score[b]) return score[a] < score[b];
      if (tables[a].total() != tables[b].total()) return tables[a].total() < tables[b].total();
      return a < b;
    });
    std::vector<bool> drop(total, false);
    for (std::size_t j = 0; j < total - k; ++j) drop[order[j]] = true;
    for (std::size_t i = 0; i < total; ++i) {
      if (drop[i]) {
        out.dropped.push_back(tables[i]);
        out.dropped_youden.push_back(score[i]);
      } else {
        out.dataset.studies.push_back(tables[i]);
        out.selection_youden.push_back(score[i]);
      }
    }
    out.shifted.assign(k, false);
  } else if (c.bias.mechanism == BiasMechanism::Mixture) {
    std::vector<std::size_t> perm(total);
    std::iota(perm.begin(), perm.end(), 0);
    auto rng = key.stream(kShuffleStream);
    for (std::size_t i = total - 1; i > 0; --i) {
      boost::random::uniform_int_distribution<std::size_t> pick(0, i);
      std::swap(perm[i], perm[pick(rng)]);
    }
    for (std::size_t i : perm) {
      out.dataset.studies.push_back(tables[i]);
      out.shifted.push_back(shifted[i]);
    }
  } else {
    out.dataset.studies = std::move(tables);
    out.shifted.assign(k, false);
  }
  return out;
}

MetaDataset generate_meta_analysis(const SimCondition& condition, const ReplicateKey& key) {
  return generate_meta_analysis_detailed(condition, key).dataset;
}

std::vector<SimCondition> default_grid() {
  const std::array<std::array<double, 2>, 4> means{{{0, 0}, {1, -1}, {2, -2}, {2, -1}}};
  const std::array<std::array<double, 3>, 3> covs{{{0, 0, 0}, {0.5, 0.3, 0.5}, {1, 0.5, 1}}};
  const std::array<int, 2> ks{10, 30};
  const std::array<double, 2> pis{0.5, 0.2};
  const std::array<BiasSpec, 5> biases{BiasSpec::none(), BiasSpec::selection(0.2),
                                       BiasSpec::selection(0.4), BiasSpec::mixture(0.75, -0.75),
                                       BiasSpec::mixture(1.25, -1.25)};
  std::vector<SimCondition> grid;
  grid.reserve(240);
  for (const auto& mu : means) {
    for (const auto& cov : covs) {
      for (int k : ks) {
        for (double pi : pis) {
          for (const auto& bias : biases) {
            SimCondition c;
            c.id = grid.size();
            c.params = {mu, cov[0], cov[1], cov[2]};
            c.k = k;
            c.pi = pi;
            c.n_min = 50;
            c.n_max = 1000;
            c.bias = bias;
            grid.push_back(c);
          }
        }
      }
    }
  }
  return grid;
}

std::uint64_t dataset_hash(const MetaDataset& dataset) {
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  for (const auto& t : dataset.studies) {
    for (std::int64_t v : {t.x, t.w, t.y, t.z}) h = mix64(h ^ static_cast<std::uint64_t>(v));
  }
  return h;
}

}  // namespace dtapb
