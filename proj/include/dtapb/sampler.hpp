#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dtapb/core.hpp"
#include "dtapb/rng.hpp"

namespace dtapb {

/// Bivariate normal model for (logit Sen, logit(1 - Spe)).
struct BivariateParams {
  std::array<double, 2> mu{0.0, 0.0};
  double sigma_a2 = 0;
  double sigma_ab = 0;
  double sigma_b2 = 0;

  bool is_zero_covariance() const { return sigma_a2 == 0 && sigma_ab == 0 && sigma_b2 == 0; }
  friend bool operator==(const BivariateParams&, const BivariateParams&) = default;
};

enum class BiasMechanism { None, Selection, Mixture };

struct BiasSpec {
  BiasMechanism mechanism = BiasMechanism::None;
  double selection_fraction = 0;            // l = round(fraction * k) extra studies dropped
  std::array<double, 2> eta{0.0, 0.0};      // mean shift of the mixture component
  double mixture_fraction = 1.0 / 3.0;
  bool select_on_true_youden = false;       // default: observed Youden index

  static BiasSpec none() { return {}; }
  static BiasSpec selection(double fraction);
  static BiasSpec mixture(double eta_a, double eta_b);

  std::string label() const;     // none | selection | mixture
  double strength() const;       // fraction, eta_A, or 0
  std::string describe() const;  // e.g. "selection(0.4)"
  friend bool operator==(const BiasSpec&, const BiasSpec&) = default;
};

struct SimCondition {
  std::size_t id = 0;
  BivariateParams params;
  int k = 30;
  double pi = 0.5;
  int n_min = 50;
  int n_max = 1000;
  BiasSpec bias;

  friend bool operator==(const SimCondition&, const SimCondition&) = default;
};

void validate_condition(const SimCondition& condition);

inline double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }

struct LogitPair {
  double theta_a;
  double theta_b;
};

/// Draws from N(mu, Sigma) using the symmetric square root of Sigma. A zero
/// covariance returns exact copies of mu.
std::vector<LogitPair> sample_logit_pairs(const BivariateParams& params, std::size_t count,
                                          CounterRng& rng);

/// Binomial realization of one 2x2 table.
StudyTable realize_study(double theta_a, double theta_b, std::int64_t n1, std::int64_t n2,
                         CounterRng& rng);

/// Group sizes: N uniform on [n_min, n_max], n1 = round(pi * N), n2 = N - n1.
std::vector<std::pair<std::int64_t, std::int64_t>> sample_sizes(const SimCondition& condition,
                                                                std::size_t count,
                                                                CounterRng& rng);

/// A generated meta-analysis together with what the bias mechanism did.
struct GeneratedMeta {
  MetaDataset dataset;
  std::vector<bool> shifted;              // mixture: study drawn from the shifted component
  std::vector<StudyTable> dropped;        // selection: suppressed studies
  std::vector<double> selection_youden;   // Youden index used for selection, kept studies
  std::vector<double> dropped_youden;
};

/// Every study draws from its own stream keyed by (seed, condition,
/// replicate, study), so output is independent of evaluation order.
GeneratedMeta generate_meta_analysis_detailed(const SimCondition& condition,
                                              const ReplicateKey& key);

MetaDataset generate_meta_analysis(const SimCondition& condition, const ReplicateKey& key);

/// The full 240-cell design: 4 means x 3 covariances x 2 study counts x
/// 2 prevalences x 5 bias levels, N uniform on [50, 1000].
std::vector<SimCondition> default_grid();

/// Stable 64-bit fingerprint of a dataset's cell counts.
std::uint64_t dataset_hash(const MetaDataset& dataset);

}  // namespace dtapb
