#include "dtapb/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace dtapb {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::TooFewStudies: return "TooFewStudies";
    case ErrorCode::NegativeCell: return "NegativeCell";
    case ErrorCode::ZeroCell: return "ZeroCell";
    case ErrorCode::BoundaryProportion: return "BoundaryProportion";
    case ErrorCode::DegenerateSE: return "DegenerateSE";
    case ErrorCode::DegenerateMarginals: return "DegenerateMarginals";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::AllTied: return "AllTied";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonPSDCovariance: return "NonPSDCovariance";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

bool Error::is_statistical() const noexcept {
  switch (code_) {
    case ErrorCode::TooFewStudies:
    case ErrorCode::ZeroCell:
    case ErrorCode::BoundaryProportion:
    case ErrorCode::DegenerateSE:
    case ErrorCode::DegenerateMarginals:
    case ErrorCode::SingularDesign:
    case ErrorCode::AllTied:
      return true;
    default:
      return false;
  }
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(MeasureId m) {
  switch (m) {
    case MeasureId::LnDor: return "lndor";
    case MeasureId::NegLnTheta: return "lntheta";
    case MeasureId::Youden: return "youden";
    case MeasureId::Kappa: return "kappa";
  }
  return "?";
}

MeasureId parse_measure(std::string_view text) {
  const auto s = lower(text);
  if (s == "lndor") return MeasureId::LnDor;
  if (s == "lntheta" || s == "-lntheta" || s == "neg_lntheta") return MeasureId::NegLnTheta;
  if (s == "youden" || s == "y") return MeasureId::Youden;
  if (s == "kappa" || s == "k") return MeasureId::Kappa;
  throw Error(ErrorCode::InvalidArgument, "unknown measure '" + std::string(text) + "'");
}

std::string_view to_string(Sidedness s) {
  return s == Sidedness::OneSided ? "one" : "two";
}

std::string MetaDataset::id_of(std::size_t i) const {
  if (i < study_ids.size() && !study_ids[i].empty()) return study_ids[i];
  return std::to_string(i + 1);
}

void validate_table(const StudyTable& t, std::optional<std::size_t> index) {
  const auto where = index ? " in study " + std::to_string(*index + 1) : std::string();
  if (t.x < 0 || t.w < 0 || t.y < 0 || t.z < 0) {
    throw Error(ErrorCode::NegativeCell, "negative cell count" + where, index);
  }
  if (t.n1() < 1 || t.n2() < 1) {
    throw Error(ErrorCode::EmptyGroup, "empty gold-standard group" + where, index);
  }
}

const MetaDataset& validate_dataset(const MetaDataset& dataset) {
  for (std::size_t i = 0; i < dataset.studies.size(); ++i) {
    validate_table(dataset.studies[i], i);
  }
  if (dataset.size() < kMinStudies) {
    throw Error(ErrorCode::TooFewStudies,
                "need at least 3 studies, got " + std::to_string(dataset.size()));
  }
  return dataset;
}

CorrectedTable continuity_correct(const StudyTable& t, CorrectionPolicy policy) {
  CorrectedTable c{static_cast<double>(t.x), static_cast<double>(t.w),
                   static_cast<double>(t.y), static_cast<double>(t.z), false};
  if (policy == CorrectionPolicy::HalfIfAnyZero && t.has_zero_cell()) {
    c.x += 0.5;
    c.w += 0.5;
    c.y += 0.5;
    c.z += 0.5;
    c.correction_applied = true;
  }
  return c;
}

CorrectedTable continuity_correct(const CorrectedTable& t, CorrectionPolicy policy) {
  CorrectedTable c = t;
  const bool any_zero = t.x == 0 || t.w == 0 || t.y == 0 || t.z == 0;
  if (policy == CorrectionPolicy::HalfIfAnyZero && any_zero) {
    c.x += 0.5;
    c.w += 0.5;
    c.y += 0.5;
    c.z += 0.5;
    c.correction_applied = true;
  }
  return c;
}

CorrectionPolicy parse_correction(std::string_view text) {
  const auto s = lower(text);
  if (s == "half") return CorrectionPolicy::HalfIfAnyZero;
  if (s == "never") return CorrectionPolicy::Never;
  throw Error(ErrorCode::InvalidArgument, "unknown correction policy '" + std::string(text) + "'");
}

std::string_view to_string(CorrectionPolicy p) {
  return p == CorrectionPolicy::HalfIfAnyZero ? "half" : "never";
}

std::int64_t round_half_up(double v) { return static_cast<std::int64_t>(std::floor(v + 0.5)); }

}  // namespace dtapb
