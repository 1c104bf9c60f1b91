#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dtapb/sampler.hpp"
#include "dtapb/variant.hpp"

namespace dtapb {

inline constexpr double kDefaultAlpha = 0.10;

struct SimResult {
  SimCondition condition;
  TestVariant variant;
  std::int64_t reps = 0;
  std::int64_t rejections = 0;
  std::int64_t degenerate_reps = 0;  // test failed; scored as non-rejection
  double alpha = kDefaultAlpha;
  std::uint64_t seed = 0;

  double rejection_rate() const {
    return reps > 0 ? static_cast<double>(rejections) / static_cast<double>(reps) : 0.0;
  }
};

struct RunOptions {
  std::int64_t reps = 1000;
  double alpha = kDefaultAlpha;
  std::uint64_t master_seed = 0;
  int parallelism = 1;
  CorrectionPolicy correction = CorrectionPolicy::HalfIfAnyZero;
  /// When set, receives the hash of every replicate's dataset (index = replicate).
  std::vector<std::uint64_t>* dataset_hashes = nullptr;
};

/// Every replicate generates one dataset and evaluates all variants on it.
/// Replicate r of condition c always uses the streams keyed by
/// (master_seed, c.id, r), so the counts do not depend on `parallelism`.
std::vector<SimResult> run_condition(const SimCondition& condition,
                                     const std::vector<TestVariant>& variants,
                                     const RunOptions& options);

/// run_condition over every grid cell, in grid order. `progress` (optional)
/// is called after each condition with (done, total).
std::vector<SimResult> run_grid(const std::vector<SimCondition>& grid,
                                const std::vector<TestVariant>& variants,
                                const RunOptions& options,
                                const std::function<void(std::size_t, std::size_t)>& progress = {});

enum class GroupField { Mu, Sigma, K, Pi, Bias, Variant };

struct SummaryRow {
  std::string key;
  double mean_rate = 0;   // mean of the per-result rates
  std::int64_t reps = 0;  // pooled
  std::int64_t rejections = 0;
  double wilson_low = 0;  // 95% Wilson interval of the pooled rate
  double wilson_high = 0;
  std::size_t results = 0;
};

/// Groups results by the chosen fields (in first-seen order).
std::vector<SummaryRow> summarize(const std::vector<SimResult>& results,
                                  const std::vector<GroupField>& group_by);

struct Interval {
  double low;
  double high;
};

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.959963984540054);

/// Column header of the results CSV (no trailing newline).
std::string results_csv_header();
void write_results_csv(std::ostream& out, const std::vector<SimResult>& results);

}  // namespace dtapb
