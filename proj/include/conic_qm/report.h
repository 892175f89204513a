#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "conic_qm/measurement.h"
#include "conic_qm/scenario.h"

namespace conic_qm {

struct ReportOptions {
  // Wall-clock timings make reports differ between runs; off by default.
  bool timing = false;
};

/// A tolerance check recorded in the report. The run fails (exit 4) when
/// any check does not pass.
struct ReportCheck {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = true;
};

struct RunResult {
  nlohmann::ordered_json report;
  std::vector<ReportCheck> checks;
  bool ok() const;
  /// Names and values of the failed checks, one per line.
  std::string FailureSummary() const;
};

/// Runs the measurement pipeline on the requested routes.
///
/// The numeric route uses the smallest epsilon of the scenario. Its node
/// count is the scenario's when given, otherwise ResolvingNodeCount. When
/// the quantity has a spectral projector and the numeric route is
/// requested, the report also carries |Q_eps x - Q x| for every epsilon.
RunResult RunScenario(const Scenario& scenario,
                      const ReportOptions& options = {});

struct ConvergenceRow {
  double epsilon = 0.0;
  double error_norm = 0.0;
  int nodes = 0;
  double wall_time_ms = 0.0;
};

/// |Q_eps x - Q x| (Euclidean norm of the coordinates) for each epsilon.
/// Needs a quantity with a spectral projector (kUnsupported otherwise).
std::vector<ConvergenceRow> RunConvergence(const Scenario& scenario,
                                           const std::vector<double>& epsilons);

/// Header `epsilon,error_norm,nodes,wall_time_ms`, one row per epsilon,
/// doubles in shortest round-trip form.
std::string FormatConvergenceCsv(const std::vector<ConvergenceRow>& rows);

/// Shortest decimal string that parses back to exactly `x`.
std::string FormatDouble(double x);

/// Writes `content` to a temporary file next to `path` and renames it into
/// place, so readers never observe a partial file.
void WriteFileAtomic(const std::string& path, const std::string& content);

/// Serialized report, two-space indented, with a trailing newline.
std::string DumpReport(const nlohmann::ordered_json& report);

}  // namespace conic_qm
