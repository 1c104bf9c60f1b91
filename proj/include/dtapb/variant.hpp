#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtapb/asymmetry.hpp"
#include "dtapb/core.hpp"

namespace dtapb {

enum class TestFamily { Egger, Macaskill, Begg, TrimFill };

std::string_view to_string(TestFamily f);
std::string_view to_string(PrecisionAxis a);
PrecisionAxis parse_precision_axis(std::string_view text);

/// One fully specified asymmetry test: family, measure, and family options.
/// Only the options block of `family` is meaningful; the factories leave the
/// others at their defaults so that equality is well defined.
struct TestVariant {
  TestFamily family = TestFamily::Egger;
  MeasureId measure = MeasureId::LnDor;
  Sidedness sidedness = Sidedness::OneSided;
  EggerOptions egger{};
  MacaskillOptions macaskill{};
  BeggOptions begg{};
  TrimFillOptions trim_fill{};

  static TestVariant make_egger(MeasureId m, EggerOptions o = {},
                                Sidedness s = Sidedness::OneSided);
  static TestVariant make_macaskill(MeasureId m, MacaskillOptions o = {},
                                    Sidedness s = Sidedness::OneSided);
  static TestVariant make_begg(MeasureId m, BeggOptions o = {},
                               Sidedness s = Sidedness::OneSided);
  static TestVariant make_trim_fill(MeasureId m, TrimFillOptions o = {});

  /// Short form such as "E(lnDOR,SE)", "M(lnDOR,ESS)", "B(Y,Var)" or
  /// "T(lnDOR,N,R)". Sidedness is not part of it.
  std::string short_name() const;

  // Column values for result tables.
  std::string axis_name() const;
  std::string weighting_name() const;
  std::string estimator_name() const;

  friend bool operator==(const TestVariant&, const TestVariant&) = default;
};

/// Inverse of TestVariant::short_name. Also accepts the natural default
/// weighting spelled out, e.g. "M(lnDOR,ESS,ess)".
TestVariant parse_variant(std::string_view text, Sidedness sidedness = Sidedness::OneSided);

AsymmetryTestResult run_test(const TestVariant& variant, std::span<const EffectEstimate> estimates,
                             double alpha);

/// The battery used by `simulate` when no variant is given: the common
/// Egger, Begg and trim-and-fill forms for every measure, plus all lnDOR
/// variants.
std::vector<TestVariant> default_battery();

}  // namespace dtapb
