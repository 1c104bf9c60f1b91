#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dtapb {

enum class ErrorCode {
  EmptyGroup,
  TooFewStudies,
  NegativeCell,
  ZeroCell,
  BoundaryProportion,
  DegenerateSE,
  DegenerateMarginals,
  SingularDesign,
  AllTied,
  LengthMismatch,
  NonPSDCovariance,
  EmptyInput,
  ParseError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library. `study_index` is set when the
/// failure is attributable to one study of a dataset.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<std::size_t> study_index = std::nullopt)
      : std::runtime_error(what), code_(code), study_index_(study_index) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> study_index() const noexcept { return study_index_; }

  /// True for failures of a statistical precondition (as opposed to
  /// malformed input).
  bool is_statistical() const noexcept;

 private:
  ErrorCode code_;
  std::optional<std::size_t> study_index_;
};

/// One diagnostic 2x2 table.
///
///                   test +   test -
///   diseased          x        w       n1
///   healthy           y        z       n2
///                    m1       m2       N
struct StudyTable {
  std::int64_t x = 0;  // true positives
  std::int64_t w = 0;  // false negatives
  std::int64_t y = 0;  // false positives
  std::int64_t z = 0;  // true negatives

  std::int64_t n1() const { return x + w; }
  std::int64_t n2() const { return y + z; }
  std::int64_t m1() const { return x + y; }
  std::int64_t m2() const { return w + z; }
  std::int64_t total() const { return x + w + y + z; }

  bool has_zero_cell() const { return x == 0 || w == 0 || y == 0 || z == 0; }

  friend bool operator==(const StudyTable&, const StudyTable&) = default;
};

enum class CorrectionPolicy { HalfIfAnyZero, Never };

/// Cell counts after continuity correction.
struct CorrectedTable {
  double x = 0, w = 0, y = 0, z = 0;
  bool correction_applied = false;

  double n1() const { return x + w; }
  double n2() const { return y + z; }
  double m1() const { return x + y; }
  double m2() const { return w + z; }
  double total() const { return x + w + y + z; }

  friend bool operator==(const CorrectedTable&, const CorrectedTable&) = default;
};

enum class MeasureId { LnDor, NegLnTheta, Youden, Kappa };

std::string_view to_string(MeasureId m);
MeasureId parse_measure(std::string_view text);

/// One study's univariate accuracy measure. `ess`, `n`, `m1` and `m2` come
/// from the uncorrected source table.
struct EffectEstimate {
  MeasureId measure = MeasureId::LnDor;
  double value = 0;
  double se = 1;
  double ess = 0;
  double n = 0;
  double m1 = 0;
  double m2 = 0;

  double variance() const { return se * se; }
};

enum class Sidedness { OneSided, TwoSided };

std::string_view to_string(Sidedness s);

struct AsymmetryTestResult {
  std::string test_id;
  double statistic = 0;
  double p_value = 1;
  Sidedness sidedness = Sidedness::OneSided;
  double alpha = 0.1;
  bool reject = false;
  std::optional<int> k0;                // trim and fill only
  std::optional<double> pooled_effect;  // trim and fill only
  bool converged = true;
  std::vector<std::string> warnings;
};

struct MetaDataset {
  std::vector<StudyTable> studies;
  std::vector<std::string> study_ids;  // optional; empty or one per study
  std::string label;

  std::size_t size() const { return studies.size(); }
  std::string id_of(std::size_t i) const;

  friend bool operator==(const MetaDataset&, const MetaDataset&) = default;
};

inline constexpr std::size_t kMinStudies = 3;

/// Returns the dataset unchanged if every table is valid and k >= 3.
const MetaDataset& validate_dataset(const MetaDataset& dataset);

/// Checks a single table (non-negative cells, both groups present).
void validate_table(const StudyTable& table, std::optional<std::size_t> index = std::nullopt);

CorrectedTable continuity_correct(const StudyTable& table, CorrectionPolicy policy);
CorrectedTable continuity_correct(const CorrectedTable& table, CorrectionPolicy policy);

CorrectionPolicy parse_correction(std::string_view text);
std::string_view to_string(CorrectionPolicy p);

/// Round half up, used for every "nearest integer" rule in the package.
std::int64_t round_half_up(double v);

}  // namespace dtapb
