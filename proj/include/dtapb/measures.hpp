#pragma once

#include <string>
#include <vector>

#include "dtapb/core.hpp"

namespace dtapb {

/// Log diagnostic odds ratio ln(xz / yw) with the usual Woolf standard error.
EffectEstimate ln_dor(const CorrectedTable& table);

/// Negated log of the Lehmann ROC parameter, so that larger means more accurate.
EffectEstimate neg_ln_theta(const CorrectedTable& table);

/// Youden index Sen + Spe - 1.
EffectEstimate youden(const CorrectedTable& table);

/// Cohen's kappa between index test and gold standard, with the
/// Fleiss-Cohen-Everitt large-sample standard error.
EffectEstimate kappa(const CorrectedTable& table);

double effective_sample_size(const StudyTable& table);

EffectEstimate compute_measure(const CorrectedTable& table, MeasureId measure);

/// Correct, compute and attach the source-table fields (ess, n, m1, m2).
EffectEstimate estimate_study(const StudyTable& table, MeasureId measure, CorrectionPolicy policy);

/// Strict map over a dataset. Any per-study failure is rethrown with the
/// study index attached.
std::vector<EffectEstimate> compute_all(const MetaDataset& dataset, MeasureId measure,
                                        CorrectionPolicy policy);

struct ExcludedStudy {
  std::size_t index;
  ErrorCode reason;
  std::string message;
};

/// Estimates usable as test input. Studies whose measure is undefined or has
/// zero standard error are listed in `excluded` instead.
struct EstimateSet {
  std::vector<EffectEstimate> estimates;
  std::vector<std::size_t> source_index;
  std::vector<std::size_t> corrected;  // indices where the continuity correction fired
  std::vector<ExcludedStudy> excluded;
};

EstimateSet compute_usable(const MetaDataset& dataset, MeasureId measure, CorrectionPolicy policy);

}  // namespace dtapb
