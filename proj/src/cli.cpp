#include "dtapb/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dtapb/dataset_io.hpp"
#include "dtapb/grid_io.hpp"
#include "dtapb/harness.hpp"
#include "dtapb/measures.hpp"

namespace dtapb {

namespace {

using nlohmann::json;

Sidedness parse_sided(const std::string& s) {
  if (s == "one") return Sidedness::OneSided;
  if (s == "two") return Sidedness::TwoSided;
  throw Error(ErrorCode::InvalidArgument, "--sided must be 'one' or 'two'");
}

[[noreturn]] void bad_flag(const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct AnalyzeArgs {
  std::string input;
  std::string measure = "lndor";
  std::string test = "trimfill";
  std::optional<std::string> axis;
  std::optional<std::string> weighting;
  std::string estimator = "r";
  std::string sided = "one";
  double alpha = kDefaultAlpha;
  std::string correction = "half";
};

struct FunnelArgs {
  std::string input;
  std::string measure = "lndor";
  std::string axis = "se";
  std::string correction = "half";
  std::string format = "csv";
};

struct SimulateArgs {
  std::string grid = "default";
  std::vector<std::string> variants;
  std::optional<std::string> test;
  std::string measure = "lndor";
  std::optional<std::string> axis;
  std::optional<std::string> weighting;
  std::string estimator = "r";
  std::string sided = "one";
  std::int64_t reps = 1000;
  double alpha = kDefaultAlpha;
  std::uint64_t seed = 0;
  std::string out = "results.csv";
  int parallelism = 1;
  std::string correction = "half";
  std::string summary_by = "variant";
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const auto measure = parse_measure(a.measure);
  const auto policy = parse_correction(a.correction);
  const auto variant =
      variant_from_flags(a.test, measure, a.axis, a.weighting, a.estimator, parse_sided(a.sided));
  if (!(a.alpha > 0 && a.alpha < 1)) bad_flag("--alpha must be in (0, 1)");

  const auto dataset = load_dataset_csv(a.input);
  validate_dataset(dataset);
  const auto set = compute_usable(dataset, measure, policy);

  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["input"] = a.input;
  report["measure"] = std::string(to_string(measure));
  report["correction"] = std::string(to_string(policy));
  report["test"] = {{"id", variant.short_name()},
                    {"family", std::string(to_string(variant.family))},
                    {"axis", variant.axis_name()},
                    {"weighting", variant.weighting_name()},
                    {"estimator", variant.estimator_name()},
                    {"sided", std::string(to_string(variant.sidedness))}};
  report["k_total"] = dataset.size();
  report["k_used"] = set.estimates.size();

  json warnings = json::array();
  json studies = json::array();
  std::size_t next_usable = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& t = dataset.studies[i];
    json s = {{"study_id", dataset.id_of(i)}, {"tp", t.x}, {"fn", t.w}, {"fp", t.y}, {"tn", t.z}};
    const bool corrected =
        std::find(set.corrected.begin(), set.corrected.end(), i) != set.corrected.end();
    s["corrected"] = corrected;
    if (corrected) warnings.push_back("study " + dataset.id_of(i) + ": continuity correction (+0.5) applied");
    if (next_usable < set.source_index.size() && set.source_index[next_usable] == i) {
      const auto& e = set.estimates[next_usable++];
      s["value"] = e.value;
      s["se"] = e.se;
      s["n"] = e.n;
      s["ess"] = e.ess;
      s["excluded"] = false;
    } else {
      for (const auto& ex : set.excluded) {
        if (ex.index != i) continue;
        s["excluded"] = true;
        s["reason"] = std::string(to_string(ex.reason));
        warnings.push_back("study " + dataset.id_of(i) + " excluded: " + ex.message);
      }
    }
    studies.push_back(std::move(s));
  }
  report["studies"] = std::move(studies);

  const auto result = run_test(variant, set.estimates, a.alpha);
  json r = {{"statistic", number_or_null(result.statistic)},
            {"p_value", result.p_value},
            {"alpha", result.alpha},
            {"sided", std::string(to_string(result.sidedness))},
            {"reject", result.reject},
            {"converged", result.converged}};
  if (result.k0) r["k0"] = *result.k0;
  if (result.pooled_effect) r["pooled_effect"] = *result.pooled_effect;
  report["result"] = std::move(r);
  for (const auto& w : result.warnings) warnings.push_back(w);
  report["warnings"] = std::move(warnings);

  out << report.dump(2) << "\n";
  return kExitOk;
}

int cmd_funnel(const FunnelArgs& a, std::ostream& out, std::ostream& err) {
  const auto measure = parse_measure(a.measure);
  const auto axis = parse_precision_axis(a.axis);
  const auto policy = parse_correction(a.correction);
  if (a.format != "csv" && a.format != "json") bad_flag("--format must be csv or json");

  const auto dataset = load_dataset_csv(a.input);
  validate_dataset(dataset);
  const auto set = compute_usable(dataset, measure, policy);
  for (const auto& ex : set.excluded) {
    err << "warning: study " << dataset.id_of(ex.index) << " excluded: " << ex.message << "\n";
  }
  const auto points = funnel_points(set.estimates, axis);

  if (a.format == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < points.size(); ++i) {
      rows.push_back({{"study_id", dataset.id_of(set.source_index[i])},
                      {"effect", points[i].effect},
                      {"axis_value", points[i].axis_value}});
    }
    json doc = {{"schema_version", kReportSchemaVersion},
                {"measure", std::string(to_string(measure))},
                {"axis", std::string(to_string(axis))},
                {"points", std::move(rows)}};
    out << doc.dump(2) << "\n";
  } else {
    out << "study_id,effect,axis_value\n";
    char buf[96];
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.12g,%.12g", points[i].effect, points[i].axis_value);
      out << dataset.id_of(set.source_index[i]) << ',' << buf << "\n";
    }
  }
  return kExitOk;
}

std::vector<GroupField> parse_group_fields(const std::string& text) {
  std::vector<GroupField> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "mu") out.push_back(GroupField::Mu);
    else if (tok == "sigma") out.push_back(GroupField::Sigma);
    else if (tok == "k") out.push_back(GroupField::K);
    else if (tok == "pi") out.push_back(GroupField::Pi);
    else if (tok == "bias") out.push_back(GroupField::Bias);
    else if (tok == "variant") out.push_back(GroupField::Variant);
    else bad_flag("--summary-by accepts mu,sigma,k,pi,bias,variant");
  }
  if (out.empty()) bad_flag("--summary-by needs at least one field");
  return out;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  if (a.reps < 1) bad_flag("--reps must be >= 1");
  if (a.parallelism < 1) bad_flag("--parallelism must be >= 1");
  if (!(a.alpha > 0 && a.alpha < 1)) bad_flag("--alpha must be in (0, 1)");
  const auto sided = parse_sided(a.sided);
  const auto group_by = parse_group_fields(a.summary_by);

  std::vector<TestVariant> variants;
  for (const auto& v : a.variants) variants.push_back(parse_variant(v, sided));
  if (a.test) {
    variants.push_back(variant_from_flags(*a.test, parse_measure(a.measure), a.axis, a.weighting,
                                          a.estimator, sided));
  }
  if (variants.empty()) variants = default_battery();

  const auto grid = resolve_grid(a.grid);

  RunOptions opts;
  opts.reps = a.reps;
  opts.alpha = a.alpha;
  opts.master_seed = a.seed;
  opts.parallelism = a.parallelism;
  opts.correction = parse_correction(a.correction);
  const auto results = run_grid(grid, variants, opts);

  const std::filesystem::path target(a.out);
  const std::filesystem::path tmp = target.string() + ".partial";
  try {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write '" + tmp.string() + "'");
    write_results_csv(file, results);
    file.close();
    if (!file) throw Error(ErrorCode::InvalidArgument, "failed writing '" + tmp.string() + "'");
    std::filesystem::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }

  out << "wrote " << results.size() << " rows (" << grid.size() << " conditions x "
      << variants.size() << " tests) to " << a.out << "\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-48s %8s %8s %19s\n", "group", "rate", "reps", "wilson95");
  out << buf;
  for (const auto& row : summarize(results, group_by)) {
    std::snprintf(buf, sizeof buf, "%-48s %8.4f %8lld   [%.4f, %.4f]\n", row.key.c_str(),
                  row.mean_rate, static_cast<long long>(row.reps), row.wilson_low, row.wilson_high);
    out << buf;
  }
  return kExitOk;
}

}  // namespace

TestVariant variant_from_flags(const std::string& test, MeasureId measure,
                               const std::optional<std::string>& axis,
                               const std::optional<std::string>& weighting,
                               const std::string& estimator, Sidedness sidedness) {
  if (test == "egger") {
    EggerOptions o;
    const auto ax = axis.value_or("se");
    if (ax == "se") o.axis = EggerAxis::SE;
    else if (ax == "n") o.axis = EggerAxis::N;
    else bad_flag("egger accepts --axis se|n");
    const auto w = weighting.value_or("none");
    if (w == "none") o.weighting = EggerWeighting::Unweighted;
    else if (w == "ivfixed") o.weighting = EggerWeighting::InvVarianceFixed;
    else if (w == "ivrandom") o.weighting = EggerWeighting::InvVarianceRandom;
    else bad_flag("egger accepts --weighting none|ivfixed|ivrandom");
    return TestVariant::make_egger(measure, o, sidedness);
  }
  if (test == "macaskill") {
    MacaskillOptions o;
    const auto ax = axis.value_or("n");
    if (ax == "n") o = {MacaskillPredictor::N, MacaskillWeighting::InvVarianceFixed};
    else if (ax == "ess") o = {MacaskillPredictor::InvSqrtEss, MacaskillWeighting::Ess};
    else if (ax == "inv-n") o = {MacaskillPredictor::InvN, MacaskillWeighting::Peters};
    else bad_flag("macaskill accepts --axis n|ess|inv-n");
    if (weighting) {
      if (*weighting == "ivfixed") o.weighting = MacaskillWeighting::InvVarianceFixed;
      else if (*weighting == "ess") o.weighting = MacaskillWeighting::Ess;
      else if (*weighting == "peters") o.weighting = MacaskillWeighting::Peters;
      else bad_flag("macaskill accepts --weighting ivfixed|ess|peters");
    }
    return TestVariant::make_macaskill(measure, o, sidedness);
  }
  if (test == "begg") {
    BeggOptions o;
    const auto ax = axis.value_or("se");
    if (ax == "se") o.dispersion = BeggDispersion::Variance;
    else if (ax == "n" || ax == "inv-n") o.dispersion = BeggDispersion::InvN;
    else if (ax == "ess") o.dispersion = BeggDispersion::InvEss;
    else bad_flag("begg accepts --axis se|n|ess");
    if (weighting && *weighting != "none") bad_flag("begg takes no --weighting");
    return TestVariant::make_begg(measure, o, sidedness);
  }
  if (test == "trimfill") {
    TrimFillOptions o;
    const auto ax = axis.value_or("se");
    if (ax == "se") o.axis = TrimFillAxis::SE;
    else if (ax == "n") o.axis = TrimFillAxis::N;
    else bad_flag("trimfill accepts --axis se|n");
    if (estimator == "r") o.estimator = K0Estimator::R;
    else if (estimator == "l") o.estimator = K0Estimator::L;
    else bad_flag("--estimator must be r or l");
    if (weighting && *weighting != "none") bad_flag("trimfill takes no --weighting");
    if (sidedness != Sidedness::OneSided) bad_flag("trim and fill is one-sided only");
    return TestVariant::make_trim_fill(measure, o);
  }
  bad_flag("--test must be egger, macaskill, begg or trimfill");
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Funnel-plot asymmetry tests for diagnostic accuracy meta-analysis", "dtapb"};
  app.require_subcommand(1);

  const std::vector<std::string> measures{"lndor", "lntheta", "youden", "kappa"};
  const std::vector<std::string> tests{"egger", "macaskill", "begg", "trimfill"};
  const std::vector<std::string> axes{"se", "n", "ess", "inv-n"};
  const std::vector<std::string> weights{"none", "ivfixed", "ivrandom", "ess", "peters"};

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Test a dataset for funnel-plot asymmetry");
  analyze->add_option("input", an.input, "Dataset CSV (study_id,tp,fn,fp,tn)")->required();
  analyze->add_option("--measure", an.measure)->check(CLI::IsMember(measures))->capture_default_str();
  analyze->add_option("--test", an.test)->check(CLI::IsMember(tests))->capture_default_str();
  analyze->add_option("--axis", an.axis)->check(CLI::IsMember(axes));
  analyze->add_option("--weighting", an.weighting)->check(CLI::IsMember(weights));
  analyze->add_option("--estimator", an.estimator)->check(CLI::IsMember({"r", "l"}))->capture_default_str();
  analyze->add_option("--sided", an.sided)->check(CLI::IsMember({"one", "two"}))->capture_default_str();
  analyze->add_option("--alpha", an.alpha)->capture_default_str();
  analyze->add_option("--correction", an.correction)->check(CLI::IsMember({"half", "never"}))->capture_default_str();

  FunnelArgs fu;
  auto* funnel = app.add_subcommand("funnel", "Emit funnel-plot coordinates");
  funnel->add_option("input", fu.input, "Dataset CSV (study_id,tp,fn,fp,tn)")->required();
  funnel->add_option("--measure", fu.measure)->check(CLI::IsMember(measures))->capture_default_str();
  funnel->add_option("--axis", fu.axis)->check(CLI::IsMember(axes))->capture_default_str();
  funnel->add_option("--correction", fu.correction)->check(CLI::IsMember({"half", "never"}))->capture_default_str();
  funnel->add_option("--format", fu.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  SimulateArgs si;
  auto* simulate = app.add_subcommand("simulate", "Run the Monte Carlo rejection-rate study");
  simulate->add_option("--grid", si.grid, "'default' or a grid JSON file")->capture_default_str();
  simulate->add_option("--variant", si.variants, "Test in short form, e.g. 'T(lnDOR,SE,R)'; repeatable");
  simulate->add_option("--test", si.test)->check(CLI::IsMember(tests));
  simulate->add_option("--measure", si.measure)->check(CLI::IsMember(measures))->capture_default_str();
  simulate->add_option("--axis", si.axis)->check(CLI::IsMember(axes));
  simulate->add_option("--weighting", si.weighting)->check(CLI::IsMember(weights));
  simulate->add_option("--estimator", si.estimator)->check(CLI::IsMember({"r", "l"}))->capture_default_str();
  simulate->add_option("--sided", si.sided)->check(CLI::IsMember({"one", "two"}))->capture_default_str();
  simulate->add_option("--reps", si.reps)->capture_default_str();
  simulate->add_option("--alpha", si.alpha)->capture_default_str();
  simulate->add_option("--seed", si.seed)->capture_default_str();
  simulate->add_option("--out", si.out)->capture_default_str();
  simulate->add_option("--parallelism", si.parallelism)->capture_default_str();
  simulate->add_option("--correction", si.correction)->check(CLI::IsMember({"half", "never"}))->capture_default_str();
  simulate->add_option("--summary-by", si.summary_by, "Comma-separated: mu,sigma,k,pi,bias,variant")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze(an, out);
    if (*funnel) return cmd_funnel(fu, out, err);
    if (*simulate) return cmd_simulate(si, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_statistical() ? kExitStatistical : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace dtapb
