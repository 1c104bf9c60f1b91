#include "dtapb/variant.hpp"

#include <algorithm>
#include <cctype>

namespace dtapb {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_variant(std::string_view text, std::string_view why) {
  throw Error(ErrorCode::InvalidArgument,
              "invalid test variant '" + std::string(text) + "': " + std::string(why));
}

std::string_view egger_weight_name(EggerWeighting w) {
  switch (w) {
    case EggerWeighting::Unweighted: return "none";
    case EggerWeighting::InvVarianceFixed: return "ivfixed";
    case EggerWeighting::InvVarianceRandom: return "ivrandom";
  }
  return "?";
}

std::string_view macaskill_weight_name(MacaskillWeighting w) {
  switch (w) {
    case MacaskillWeighting::InvVarianceFixed: return "ivfixed";
    case MacaskillWeighting::Ess: return "ess";
    case MacaskillWeighting::Peters: return "peters";
  }
  return "?";
}

MacaskillWeighting natural_weighting(MacaskillPredictor p) {
  switch (p) {
    case MacaskillPredictor::N: return MacaskillWeighting::InvVarianceFixed;
    case MacaskillPredictor::InvSqrtEss: return MacaskillWeighting::Ess;
    case MacaskillPredictor::InvN: return MacaskillWeighting::Peters;
  }
  return MacaskillWeighting::InvVarianceFixed;
}

std::string_view measure_token(MeasureId m) {
  switch (m) {
    case MeasureId::LnDor: return "lnDOR";
    case MeasureId::NegLnTheta: return "lntheta";
    case MeasureId::Youden: return "Y";
    case MeasureId::Kappa: return "K";
  }
  return "?";
}

}  // namespace

std::string_view to_string(TestFamily f) {
  switch (f) {
    case TestFamily::Egger: return "egger";
    case TestFamily::Macaskill: return "macaskill";
    case TestFamily::Begg: return "begg";
    case TestFamily::TrimFill: return "trimfill";
  }
  return "?";
}

std::string_view to_string(PrecisionAxis a) {
  switch (a) {
    case PrecisionAxis::SE: return "se";
    case PrecisionAxis::N: return "n";
    case PrecisionAxis::ESS: return "ess";
    case PrecisionAxis::InvN: return "inv-n";
  }
  return "?";
}

PrecisionAxis parse_precision_axis(std::string_view text) {
  const auto s = lower(text);
  if (s == "se") return PrecisionAxis::SE;
  if (s == "n") return PrecisionAxis::N;
  if (s == "ess") return PrecisionAxis::ESS;
  if (s == "inv-n" || s == "1/n") return PrecisionAxis::InvN;
  throw Error(ErrorCode::InvalidArgument, "unknown axis '" + std::string(text) + "'");
}

TestVariant TestVariant::make_egger(MeasureId m, EggerOptions o, Sidedness s) {
  TestVariant v;
  v.family = TestFamily::Egger;
  v.measure = m;
  v.sidedness = s;
  v.egger = o;
  return v;
}

TestVariant TestVariant::make_macaskill(MeasureId m, MacaskillOptions o, Sidedness s) {
  TestVariant v;
  v.family = TestFamily::Macaskill;
  v.measure = m;
  v.sidedness = s;
  v.macaskill = o;
  return v;
}

TestVariant TestVariant::make_begg(MeasureId m, BeggOptions o, Sidedness s) {
  TestVariant v;
  v.family = TestFamily::Begg;
  v.measure = m;
  v.sidedness = s;
  v.begg = o;
  return v;
}

TestVariant TestVariant::make_trim_fill(MeasureId m, TrimFillOptions o) {
  TestVariant v;
  v.family = TestFamily::TrimFill;
  v.measure = m;
  v.sidedness = Sidedness::OneSided;
  v.trim_fill = o;
  return v;
}

std::string TestVariant::axis_name() const {
  switch (family) {
    case TestFamily::Egger: return egger.axis == EggerAxis::SE ? "se" : "n";
    case TestFamily::Macaskill:
      switch (macaskill.predictor) {
        case MacaskillPredictor::N: return "n";
        case MacaskillPredictor::InvSqrtEss: return "ess";
        case MacaskillPredictor::InvN: return "inv-n";
      }
      break;
    case TestFamily::Begg:
      switch (begg.dispersion) {
        case BeggDispersion::Variance: return "var";
        case BeggDispersion::InvN: return "n";
        case BeggDispersion::InvEss: return "ess";
      }
      break;
    case TestFamily::TrimFill: return trim_fill.axis == TrimFillAxis::SE ? "se" : "n";
  }
  return "?";
}

std::string TestVariant::weighting_name() const {
  switch (family) {
    case TestFamily::Egger: return std::string(egger_weight_name(egger.weighting));
    case TestFamily::Macaskill: return std::string(macaskill_weight_name(macaskill.weighting));
    case TestFamily::Begg:
      return begg.standardization == BeggStandardization::CenteredVariance ? "none" : "plain";
    case TestFamily::TrimFill: return trim_fill.axis == TrimFillAxis::SE ? "ivrandom" : "n";
  }
  return "?";
}

std::string TestVariant::estimator_name() const {
  if (family != TestFamily::TrimFill) return "-";
  return trim_fill.estimator == K0Estimator::R ? "r" : "l";
}

std::string TestVariant::short_name() const {
  std::string out;
  const std::string m(measure_token(measure));
  switch (family) {
    case TestFamily::Egger:
      out = "E(" + m + (egger.axis == EggerAxis::SE ? ",SE" : ",N");
      if (egger.weighting != EggerWeighting::Unweighted) {
        out += ",";
        out += egger_weight_name(egger.weighting);
      }
      break;
    case TestFamily::Macaskill:
      out = "M(" + m;
      switch (macaskill.predictor) {
        case MacaskillPredictor::N: out += ",N"; break;
        case MacaskillPredictor::InvSqrtEss: out += ",ESS"; break;
        case MacaskillPredictor::InvN: out += ",1/N"; break;
      }
      if (macaskill.weighting != natural_weighting(macaskill.predictor)) {
        out += ",";
        out += macaskill_weight_name(macaskill.weighting);
      }
      break;
    case TestFamily::Begg:
      out = "B(" + m;
      switch (begg.dispersion) {
        case BeggDispersion::Variance: out += ",Var"; break;
        case BeggDispersion::InvN: out += ",N"; break;
        case BeggDispersion::InvEss: out += ",ESS"; break;
      }
      if (begg.standardization == BeggStandardization::PlainSE) out += ",plain";
      break;
    case TestFamily::TrimFill:
      out = "T(" + m + (trim_fill.axis == TrimFillAxis::SE ? ",SE" : ",N") +
            (trim_fill.estimator == K0Estimator::R ? ",R" : ",L");
      break;
  }
  return out + ")";
}

TestVariant parse_variant(std::string_view text, Sidedness sidedness) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open ||
      trim(text.substr(close + 1)).size() != 0) {
    bad_variant(text, "expected F(measure,axis[,option])");
  }
  const auto family = lower(trim(text.substr(0, open)));
  std::vector<std::string> args;
  std::string_view inner = text.substr(open + 1, close - open - 1);
  while (true) {
    const auto comma = inner.find(',');
    args.push_back(trim(inner.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    inner = inner.substr(comma + 1);
  }
  if (args.size() < 2 || args.size() > 3) bad_variant(text, "expected 2 or 3 arguments");

  MeasureId measure;
  try {
    measure = parse_measure(args[0]);
  } catch (const Error&) {
    bad_variant(text, "unknown measure");
  }
  const auto axis = lower(args[1]);
  const auto extra = args.size() == 3 ? lower(args[2]) : std::string();

  if (family == "e" || family == "egger") {
    EggerOptions o;
    if (axis == "se") o.axis = EggerAxis::SE;
    else if (axis == "n") o.axis = EggerAxis::N;
    else bad_variant(text, "Egger axis must be SE or N");
    if (extra.empty() || extra == "none") o.weighting = EggerWeighting::Unweighted;
    else if (extra == "ivfixed") o.weighting = EggerWeighting::InvVarianceFixed;
    else if (extra == "ivrandom") o.weighting = EggerWeighting::InvVarianceRandom;
    else bad_variant(text, "Egger weighting must be none, ivfixed or ivrandom");
    return TestVariant::make_egger(measure, o, sidedness);
  }
  if (family == "m" || family == "macaskill") {
    MacaskillOptions o;
    if (axis == "n") o.predictor = MacaskillPredictor::N;
    else if (axis == "ess") o.predictor = MacaskillPredictor::InvSqrtEss;
    else if (axis == "1/n" || axis == "inv-n") o.predictor = MacaskillPredictor::InvN;
    else bad_variant(text, "Macaskill predictor must be N, ESS or 1/N");
    o.weighting = natural_weighting(o.predictor);
    if (extra == "ivfixed") o.weighting = MacaskillWeighting::InvVarianceFixed;
    else if (extra == "ess") o.weighting = MacaskillWeighting::Ess;
    else if (extra == "peters") o.weighting = MacaskillWeighting::Peters;
    else if (!extra.empty()) bad_variant(text, "Macaskill weighting must be ivfixed, ess or peters");
    return TestVariant::make_macaskill(measure, o, sidedness);
  }
  if (family == "b" || family == "begg") {
    BeggOptions o;
    if (axis == "var" || axis == "se") o.dispersion = BeggDispersion::Variance;
    else if (axis == "n" || axis == "1/n" || axis == "inv-n") o.dispersion = BeggDispersion::InvN;
    else if (axis == "ess") o.dispersion = BeggDispersion::InvEss;
    else bad_variant(text, "Begg dispersion must be Var, N or ESS");
    if (extra == "plain") o.standardization = BeggStandardization::PlainSE;
    else if (!extra.empty()) bad_variant(text, "Begg option must be 'plain'");
    return TestVariant::make_begg(measure, o, sidedness);
  }
  if (family == "t" || family == "trimfill") {
    TrimFillOptions o;
    if (axis == "se") o.axis = TrimFillAxis::SE;
    else if (axis == "n") o.axis = TrimFillAxis::N;
    else bad_variant(text, "trim-and-fill axis must be SE or N");
    if (extra.empty() || extra == "r") o.estimator = K0Estimator::R;
    else if (extra == "l") o.estimator = K0Estimator::L;
    else bad_variant(text, "trim-and-fill estimator must be R or L");
    if (sidedness != Sidedness::OneSided) bad_variant(text, "trim and fill is one-sided only");
    return TestVariant::make_trim_fill(measure, o);
  }
  bad_variant(text, "unknown family");
}

AsymmetryTestResult run_test(const TestVariant& v, std::span<const EffectEstimate> estimates,
                             double alpha) {
  switch (v.family) {
    case TestFamily::Egger: return egger_test(estimates, v.egger, v.sidedness, alpha);
    case TestFamily::Macaskill: return macaskill_test(estimates, v.macaskill, v.sidedness, alpha);
    case TestFamily::Begg: return begg_test(estimates, v.begg, v.sidedness, alpha);
    case TestFamily::TrimFill: return trim_fill_test(estimates, v.trim_fill, alpha);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown test family");
}

std::vector<TestVariant> default_battery() {
  std::vector<TestVariant> out;
  for (auto m : {MeasureId::LnDor, MeasureId::NegLnTheta, MeasureId::Youden, MeasureId::Kappa}) {
    out.push_back(TestVariant::make_egger(m));
    out.push_back(TestVariant::make_begg(m));
    out.push_back(TestVariant::make_trim_fill(m, {TrimFillAxis::SE, K0Estimator::R}));
  }
  const auto m = MeasureId::LnDor;
  out.push_back(TestVariant::make_egger(m, {EggerAxis::SE, EggerWeighting::InvVarianceFixed}));
  out.push_back(TestVariant::make_egger(m, {EggerAxis::SE, EggerWeighting::InvVarianceRandom}));
  out.push_back(TestVariant::make_egger(m, {EggerAxis::N, EggerWeighting::Unweighted}));
  out.push_back(TestVariant::make_macaskill(m, {MacaskillPredictor::N, MacaskillWeighting::InvVarianceFixed}));
  out.push_back(TestVariant::make_macaskill(m, {MacaskillPredictor::InvSqrtEss, MacaskillWeighting::Ess}));
  out.push_back(TestVariant::make_macaskill(m, {MacaskillPredictor::InvN, MacaskillWeighting::Peters}));
  out.push_back(TestVariant::make_begg(m, {BeggDispersion::InvN}));
  out.push_back(TestVariant::make_begg(m, {BeggDispersion::InvEss}));
  out.push_back(TestVariant::make_trim_fill(m, {TrimFillAxis::N, K0Estimator::R}));
  out.push_back(TestVariant::make_trim_fill(m, {TrimFillAxis::SE, K0Estimator::L}));
  out.push_back(TestVariant::make_trim_fill(m, {TrimFillAxis::N, K0Estimator::L}));
  return out;
}

}  // namespace dtapb
