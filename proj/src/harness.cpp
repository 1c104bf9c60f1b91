#include "dtapb/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "dtapb/measures.hpp"

namespace dtapb {

namespace {

struct Tally {
  std::int64_t rejections = 0;
  std::int64_t degenerate = 0;
};

constexpr std::size_t kMeasureCount = 4;

std::size_t measure_slot(MeasureId m) { return static_cast<std::size_t>(m); }

void run_replicate(const SimCondition& condition, const std::vector<TestVariant>& variants,
                   const RunOptions& options, std::int64_t rep, std::vector<Tally>& tally) {
  const ReplicateKey key{options.master_seed, condition.id, static_cast<std::uint64_t>(rep)};
  const MetaDataset data = generate_meta_analysis(condition, key);
  if (options.dataset_hashes) (*options.dataset_hashes)[static_cast<std::size_t>(rep)] = dataset_hash(data);

  std::array<std::optional<EstimateSet>, kMeasureCount> cache;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    const auto& variant = variants[v];
    auto& slot = cache[measure_slot(variant.measure)];
    if (!slot) slot = compute_usable(data, variant.measure, options.correction);
    try {
      if (run_test(variant, slot->estimates, options.alpha).reject) ++tally[v].rejections;
    } catch (const Error&) {
      ++tally[v].degenerate;
    }
  }
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string group_key(const SimResult& r, const std::vector<GroupField>& fields) {
  std::ostringstream os;
  bool first = true;
  for (auto f : fields) {
    if (!first) os << ";";
    first = false;
    const auto& c = r.condition;
    switch (f) {
      case GroupField::Mu: os << "mu=(" << c.params.mu[0] << "," << c.params.mu[1] << ")"; break;
      case GroupField::Sigma:
        os << "sigma=(" << c.params.sigma_a2 << "," << c.params.sigma_ab << "," << c.params.sigma_b2 << ")";
        break;
      case GroupField::K: os << "k=" << c.k; break;
      case GroupField::Pi: os << "pi=" << c.pi; break;
      case GroupField::Bias: os << "bias=" << c.bias.describe(); break;
      case GroupField::Variant:
        os << "test=" << r.variant.short_name()
           << (r.variant.sidedness == Sidedness::TwoSided ? "[two-sided]" : "");
        break;
    }
  }
  return os.str();
}

}  // namespace

std::vector<SimResult> run_condition(const SimCondition& condition,
                                     const std::vector<TestVariant>& variants,
                                     const RunOptions& options) {
  if (options.reps < 1) throw Error(ErrorCode::InvalidArgument, "reps must be >= 1");
  if (variants.empty()) throw Error(ErrorCode::InvalidArgument, "no test variants given");
  if (!(options.alpha > 0 && options.alpha < 1)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must be in (0, 1)");
  }
  validate_condition(condition);
  if (options.dataset_hashes) options.dataset_hashes->assign(static_cast<std::size_t>(options.reps), 0);

  std::vector<Tally> total(variants.size());
  const int workers =
      static_cast<int>(std::clamp<std::int64_t>(options.parallelism, 1, options.reps));
  if (workers == 1) {
    for (std::int64_t r = 0; r < options.reps; ++r) run_replicate(condition, variants, options, r, total);
  } else {
    std::atomic<std::int64_t> next{0};
    std::mutex merge;
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        std::vector<Tally> local(variants.size());
        try {
          constexpr std::int64_t kChunk = 16;
          for (;;) {
            const std::int64_t begin = next.fetch_add(kChunk);
            if (begin >= options.reps) break;
            const std::int64_t end = std::min(begin + kChunk, options.reps);
            for (std::int64_t r = begin; r < end; ++r) run_replicate(condition, variants, options, r, local);
          }
        } catch (...) {
          std::lock_guard lock(merge);
          if (!failure) failure = std::current_exception();
          return;
        }
        std::lock_guard lock(merge);
        for (std::size_t v = 0; v < local.size(); ++v) {
          total[v].rejections += local[v].rejections;
          total[v].degenerate += local[v].degenerate;
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<SimResult> out;
  out.reserve(variants.size());
  for (std::size_t v = 0; v < variants.size(); ++v) {
    SimResult r;
    r.condition = condition;
    r.variant = variants[v];
    r.reps = options.reps;
    r.rejections = total[v].rejections;
    r.degenerate_reps = total[v].degenerate;
    r.alpha = options.alpha;
    r.seed = options.master_seed;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SimResult> run_grid(const std::vector<SimCondition>& grid,
                                const std::vector<TestVariant>& variants,
                                const RunOptions& options,
                                const std::function<void(std::size_t, std::size_t)>& progress) {
  std::vector<SimResult> out;
  out.reserve(grid.size() * variants.size());
  RunOptions opts = options;
  opts.dataset_hashes = nullptr;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto part = run_condition(grid[i], variants, opts);
    std::move(part.begin(), part.end(), std::back_inserter(out));
    if (progress) progress(i + 1, grid.size());
  }
  return out;
}

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  const double low = successes <= 0 ? 0.0 : std::max(0.0, centre - half);
  const double high = successes >= trials ? 1.0 : std::min(1.0, centre + half);
  return {low, high};
}

std::vector<SummaryRow> summarize(const std::vector<SimResult>& results,
                                  const std::vector<GroupField>& group_by) {
  if (results.empty()) throw Error(ErrorCode::EmptyInput, "no results to summarize");
  std::vector<SummaryRow> rows;
  std::map<std::string, std::size_t> index;
  std::vector<double> rate_sum;
  for (const auto& r : results) {
    const auto key = group_key(r, group_by);
    auto [it, inserted] = index.emplace(key, rows.size());
    if (inserted) {
      rows.push_back(SummaryRow{key});
      rate_sum.push_back(0.0);
    }
    auto& row = rows[it->second];
    row.reps += r.reps;
    row.rejections += r.rejections;
    row.results += 1;
    rate_sum[it->second] += r.rejection_rate();
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    row.mean_rate = rate_sum[i] / static_cast<double>(row.results);
    const auto ci = wilson_interval(row.rejections, row.reps);
    row.wilson_low = ci.low;
    row.wilson_high = ci.high;
  }
  return rows;
}

std::string results_csv_header() {
  return "condition_id,mu_a,mu_b,sigma_a2,sigma_ab,sigma_b2,k,pi,bias,bias_strength,"
         "test_family,measure,axis,weighting,estimator,sided,reps,rejections,rate,degenerate,seed";
}

void write_results_csv(std::ostream& out, const std::vector<SimResult>& results) {
  out << results_csv_header() << "\n";
  for (const auto& r : results) {
    const auto& c = r.condition;
    const auto& v = r.variant;
    out << c.id << ',' << fmt_double(c.params.mu[0]) << ',' << fmt_double(c.params.mu[1]) << ','
        << fmt_double(c.params.sigma_a2) << ',' << fmt_double(c.params.sigma_ab) << ','
        << fmt_double(c.params.sigma_b2) << ',' << c.k << ',' << fmt_double(c.pi) << ','
        << c.bias.label() << ',' << fmt_double(c.bias.strength()) << ',' << to_string(v.family)
        << ',' << to_string(v.measure) << ',' << v.axis_name() << ',' << v.weighting_name() << ','
        << v.estimator_name() << ',' << to_string(v.sidedness) << ',' << r.reps << ','
        << r.rejections << ',' << fmt_double(r.rejection_rate()) << ',' << r.degenerate_reps << ','
        << r.seed << "\n";
  }
}

}  // namespace dtapb
