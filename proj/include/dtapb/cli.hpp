#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "dtapb/variant.hpp"

namespace dtapb {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitStatistical = 3;
inline constexpr int kReportSchemaVersion = 1;

/// Entry point of the `dtapb` tool (subcommands analyze, funnel, simulate).
/// Returns the process exit code: 0 success, 2 input or usage error, 3
/// statistical precondition failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Builds a variant from the --test/--axis/--weighting/--estimator flags.
/// Unset optional flags take the family's usual choice.
TestVariant variant_from_flags(const std::string& test, MeasureId measure,
                               const std::optional<std::string>& axis,
                               const std::optional<std::string>& weighting,
                               const std::string& estimator, Sidedness sidedness);

}  // namespace dtapb
