#include "dtapb/measures.hpp"

#include <cmath>

namespace dtapb {

namespace {

EffectEstimate make(MeasureId m, double value, double se) {
  EffectEstimate e;
  e.measure = m;
  e.value = value;
  e.se = se;
  return e;
}

}  // namespace

EffectEstimate ln_dor(const CorrectedTable& t) {
  if (t.x <= 0 || t.w <= 0 || t.y <= 0 || t.z <= 0) {
    throw Error(ErrorCode::ZeroCell, "lnDOR undefined with a zero cell");
  }
  const double value = std::log(t.x) + std::log(t.z) - std::log(t.y) - std::log(t.w);
  const double se = std::sqrt(1.0 / t.x + 1.0 / t.y + 1.0 / t.w + 1.0 / t.z);
  return make(MeasureId::LnDor, value, se);
}

EffectEstimate neg_ln_theta(const CorrectedTable& t) {
  if (t.x <= 0 || t.y <= 0) {
    throw Error(ErrorCode::ZeroCell, "lntheta undefined with x = 0 or y = 0");
  }
  const double n1 = t.n1();
  const double n2 = t.n2();
  if (t.w <= 0 || t.z <= 0) {
    throw Error(ErrorCode::BoundaryProportion, "lntheta undefined when x = n1 or y = n2");
  }
  const double log_sen = std::log(t.x) - std::log(n1);
  const double log_fpr = std::log(t.y) - std::log(n2);
  const double value = -(std::log(-log_sen) - std::log(-log_fpr));
  const double var = (1.0 / t.x - 1.0 / n1) / (log_sen * log_sen) +
                     (1.0 / t.y - 1.0 / n2) / (log_fpr * log_fpr);
  return make(MeasureId::NegLnTheta, value, std::sqrt(var));
}

EffectEstimate youden(const CorrectedTable& t) {
  const double n1 = t.n1();
  const double n2 = t.n2();
  if (n1 <= 0 || n2 <= 0) {
    throw Error(ErrorCode::DegenerateMarginals, "Youden index needs n1 > 0 and n2 > 0");
  }
  const double sen = t.x / n1;
  const double fpr = t.y / n2;
  const double value = sen + t.z / n2 - 1.0;
  const double var = sen * (1.0 - sen) / n1 + fpr * (1.0 - fpr) / n2;
  if (!(var > 0)) {
    throw Error(ErrorCode::DegenerateSE, "Youden index has zero standard error");
  }
  return make(MeasureId::Youden, value, std::sqrt(var));
}

EffectEstimate kappa(const CorrectedTable& t) {
  const double n1 = t.n1(), n2 = t.n2(), m1 = t.m1(), m2 = t.m2();
  const double n = t.total();
  const double denom = n1 * m2 + n2 * m1;
  const double pe = (n1 * m1 + n2 * m2) / (n * n);
  if (!(denom > 0) || !(n > 0) || 1.0 - pe == 0.0) {
    throw Error(ErrorCode::DegenerateMarginals, "kappa undefined for these marginals");
  }
  const double k = 2.0 * (t.x * t.z - t.y * t.w) / denom;
  const double one_minus = 1.0 - k;
  const double n3 = n * n * n;
  // Agreement cells are x and z; the disagreement cells w and y enter B.
  const double a1 = n - (n1 + m1) * one_minus;
  const double a2 = n - (n2 + m2) * one_minus;
  const double a = (t.x * a1 * a1 + t.z * a2 * a2) / n3;
  const double b = one_minus * one_minus *
                   (t.w * (n2 + m1) * (n2 + m1) + t.y * (n1 + m2) * (n1 + m2)) / n3;
  const double c0 = k - pe * one_minus;
  const double c = c0 * c0;
  const double num = a + b - c;
  if (!(num > 0)) {
    throw Error(ErrorCode::DegenerateSE, "kappa has zero standard error");
  }
  const double se = std::sqrt(num) / ((1.0 - pe) * std::sqrt(n));
  return make(MeasureId::Kappa, k, se);
}

double effective_sample_size(const StudyTable& t) {
  const double n1 = static_cast<double>(t.n1());
  const double n2 = static_cast<double>(t.n2());
  return 4.0 * n1 * n2 / (n1 + n2);
}

EffectEstimate compute_measure(const CorrectedTable& table, MeasureId measure) {
  switch (measure) {
    case MeasureId::LnDor: return ln_dor(table);
    case MeasureId::NegLnTheta: return neg_ln_theta(table);
    case MeasureId::Youden: return youden(table);
    case MeasureId::Kappa: return kappa(table);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown measure");
}

EffectEstimate estimate_study(const StudyTable& table, MeasureId measure,
                              CorrectionPolicy policy) {
  auto e = compute_measure(continuity_correct(table, policy), measure);
  e.ess = effective_sample_size(table);
  e.n = static_cast<double>(table.total());
  e.m1 = static_cast<double>(table.m1());
  e.m2 = static_cast<double>(table.m2());
  return e;
}

std::vector<EffectEstimate> compute_all(const MetaDataset& dataset, MeasureId measure,
                                        CorrectionPolicy policy) {
  std::vector<EffectEstimate> out;
  out.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    validate_table(dataset.studies[i], i);
    try {
      out.push_back(estimate_study(dataset.studies[i], measure, policy));
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (study " + dataset.id_of(i) + ")", i);
    }
  }
  return out;
}

EstimateSet compute_usable(const MetaDataset& dataset, MeasureId measure,
                           CorrectionPolicy policy) {
  EstimateSet set;
  set.estimates.reserve(dataset.size());
  set.source_index.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& table = dataset.studies[i];
    validate_table(table, i);
    if (policy == CorrectionPolicy::HalfIfAnyZero && table.has_zero_cell()) {
      set.corrected.push_back(i);
    }
    try {
      set.estimates.push_back(estimate_study(table, measure, policy));
      set.source_index.push_back(i);
    } catch (const Error& e) {
      set.excluded.push_back({i, e.code(), e.what()});
    }
  }
  return set;
}

}  // namespace dtapb
