#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdym/operators.hpp"

namespace sdym {

/// One line of a report; flattened from VerificationReport or from a numeric
/// threshold comparison.
struct CheckResult {
  std::string name;
  Verdict status = Verdict::inconclusive;
  std::string method;
  /// Numeric value compared against threshold (residual norm, order, ...).
  std::optional<double> value;
  std::optional<double> threshold;
  /// Symbolic residual as printed, empty when not applicable.
  std::string residual;
  std::string details;
};

CheckResult to_check(const VerificationReport& r);
/// pass iff value < threshold (both finite).
CheckResult threshold_check(std::string name, double value, double threshold, std::string method);
/// pass iff lo <= value <= hi.
CheckResult range_check(std::string name, double value, double lo, double hi, std::string method);

struct SuiteOptions {
  std::uint64_t random_seed = 20240611;
  int probes = 50;
  int grid = 16;
};

struct SuiteResult {
  int criterion = 0;
  std::string title;
  std::vector<CheckResult> checks;
  double seconds = 0;
  /// Wall-clock budget; <= 0 means none.
  double runtime_limit = 0;

  bool within_budget() const { return runtime_limit <= 0 || seconds < runtime_limit; }
  bool passed(bool allow_inconclusive = false) const;
};

inline constexpr int kCriteria = 8;

/// Runs acceptance criterion k in [1, kCriteria].
SuiteResult run_criterion(int k, const SuiteOptions& opt = {});

/// Probes used by criterion 3 (also by the CLI when no expression is given).
std::vector<Expr> identity_probes(std::uint64_t seed, int count, bool allow_j);

}  // namespace sdym
