#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace conic_qm {

/// Outcome of one named property over its seeded cases.
struct PropertyResult {
  std::string name;  // "<module>.<property>"
  int passed = 0;
  int total = 0;
  // Worst case, as the largest ratio value / limit.
  double worst_value = 0.0;
  double worst_limit = 0.0;
  std::uint64_t worst_case = 0;
  std::string error;  // first exception message, if any case threw

  bool ok() const { return passed == total && total > 0; }
};

/// Runs the invariant suites of every module at fixed seeds. Each case
/// passes when its measured residual is at most `tolerance_scale` times the
/// property's limit.
std::vector<PropertyResult> RunSelfCheck(double tolerance_scale = 1.0);

/// One line per property plus a summary line; byte-stable for a given
/// result list.
std::string FormatSelfCheck(const std::vector<PropertyResult>& results);

}  // namespace conic_qm
