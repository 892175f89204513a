#include "conic_qm/report.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <unistd.h>

#include "conic_qm/errors.h"

namespace conic_qm {
namespace {

using OrderedJson = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double MillisecondsSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

double SmallestEpsilon(const Scenario& s) {
  return *std::min_element(s.epsilons.begin(), s.epsilons.end());
}

int NodesFor(const Scenario& s, double epsilon) {
  return s.nodes ? *s.nodes : ResolvingNodeCount(s.quantity, epsilon);
}

OrderedJson DistributionJson(const OutcomeDistribution& d) {
  OrderedJson outcomes = OrderedJson::array();
  for (const Outcome& o : d.entries) {
    outcomes.push_back({{"value", o.value},
                        {"probability", std::max(0.0, o.probability)},
                        {"representative", o.representative.coords()}});
  }
  return {{"outcomes", std::move(outcomes)},
          {"outcome_tol", d.outcome_tol},
          {"conventional_representatives", d.conventional_representatives}};
}

// Largest value and probability difference between two distributions, or
// nullopt when their outcome counts differ.
std::optional<std::pair<double, double>> DistributionDelta(
    const OutcomeDistribution& a, const OutcomeDistribution& b) {
  if (a.entries.size() != b.entries.size()) return std::nullopt;
  double dv = 0.0;
  double dp = 0.0;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    dv = std::max(dv, std::abs(a.entries[i].value - b.entries[i].value));
    dp = std::max(dp, std::abs(a.entries[i].probability -
                               b.entries[i].probability));
  }
  return std::make_pair(dv, dp);
}

class CheckList {
 public:
  // Passes when value <= limit.
  void AtMost(const std::string& name, double value, double limit) {
    checks_.push_back({name, value, limit, value <= limit});
  }
  // Passes when value >= limit.
  void AtLeast(const std::string& name, double value, double limit) {
    checks_.push_back({name, value, limit, value >= limit});
  }
  std::vector<ReportCheck> Take() { return std::move(checks_); }

 private:
  std::vector<ReportCheck> checks_;
};

struct RouteOutput {
  std::string name;
  StateVector projected;
  OutcomeDistribution distribution;
  double epsilon = 0.0;
  int nodes = 0;
  double elapsed_ms = 0.0;
};

}  // namespace

bool RunResult::ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ReportCheck& c) { return c.passed; });
}

std::string RunResult::FailureSummary() const {
  std::ostringstream out;
  for (const ReportCheck& c : checks) {
    if (c.passed) continue;
    out << "check failed: " << c.name << " = " << FormatDouble(c.value)
        << " (limit " << FormatDouble(c.limit) << ")\n";
  }
  return out.str();
}

RunResult RunScenario(const Scenario& s, const ReportOptions& options) {
  const auto start = Clock::now();
  const PhysicalQuantity& q = s.quantity;
  const ConeModel& cone = s.cone;
  const bool want_spectral = s.route != RouteChoice::kNumeric;
  const bool want_numeric = s.route != RouteChoice::kSpectral;
  const bool has_projector = q.generator().declared_skew;

  DistributionOptions base;
  base.outcome_tol = s.outcome_tol;
  base.membership_tol = s.membership_tol;

  std::vector<RouteOutput> routes;
  if (want_spectral) {
    const auto t0 = Clock::now();
    RouteOutput r;
    r.name = "spectral";
    r.projected = QSpectral(q, s.state);
    DistributionOptions opt = base;
    opt.route = Route::kSpectral;
    r.distribution = ComputeOutcomeDistribution(q, s.state, opt);
    r.elapsed_ms = MillisecondsSince(t0);
    routes.push_back(std::move(r));
  }
  if (want_numeric) {
    const auto t0 = Clock::now();
    RouteOutput r;
    r.name = "numeric";
    r.epsilon = SmallestEpsilon(s);
    r.nodes = NodesFor(s, r.epsilon);
    r.projected = QNumeric(q, s.state, r.epsilon, r.nodes);
    DistributionOptions opt = base;
    opt.route = Route::kNumeric;
    opt.epsilon = r.epsilon;
    opt.nodes = r.nodes;
    r.distribution = ComputeOutcomeDistribution(q, s.state, opt);
    r.elapsed_ms = MillisecondsSince(t0);
    routes.push_back(std::move(r));
  }

  CheckList checks;
  OrderedJson results = OrderedJson::object();
  const double a_x = q.OutcomeValue(s.state);
  const double e_x = EValue(cone, s.state);
  double e_drift = 0.0;
  double margin = INFINITY;
  for (const RouteOutput& r : routes) {
    OrderedJson entry;
    if (r.name == "numeric") {
      entry["epsilon"] = r.epsilon;
      entry["nodes"] = r.nodes;
    }
    entry["projected_state"] = r.projected.coords();
    const OrderedJson dist = DistributionJson(r.distribution);
    for (const auto& item : dist.items()) entry[item.key()] = item.value();
    double total = 0.0;
    double mean = 0.0;
    double min_p = INFINITY;
    for (const Outcome& o : r.distribution.entries) {
      total += o.probability;
      mean += o.probability * o.value;
      min_p = std::min(min_p, o.probability);
    }
    entry["expectation"] = mean;
    results[r.name] = std::move(entry);

    checks.AtLeast(r.name + ".min_probability", min_p, 0.0);
    checks.AtMost(r.name + ".probability_sum_residual", std::abs(total - 1.0),
                  1e-9);
    checks.AtMost(r.name + ".expectation_residual", std::abs(mean - a_x),
                  1e-9);
    e_drift = std::max(e_drift, std::abs(EValue(cone, r.projected) - e_x));
    margin = std::min(margin, ConeMargin(cone, r.projected));
  }

  OrderedJson diagnostics;
  diagnostics["outcome_expectation"] = a_x;
  diagnostics["e_drift"] = e_drift;
  checks.AtMost("e_drift", e_drift, 1e-10);
  diagnostics["cone_margin"] = margin;
  checks.AtLeast("cone_margin", margin, -1e-8);

  if (want_spectral) {
    const StateVector& qx = routes.front().projected;
    const double idem = MaxAbs(Subtract(QSpectral(q, qx).coords(), qx.coords()));
    diagnostics["idempotence_residual"] = idem;
    checks.AtMost("idempotence_residual", idem, 1e-10);
  }

  if (q.observable()) {
    const OutcomeDistribution born = BornOracle(
        *q.observable(), HermitianFromCoords(s.state.coords(), cone.size()),
        s.outcome_tol);
    OrderedJson deltas;
    for (const RouteOutput& r : routes) {
      const auto delta = DistributionDelta(r.distribution, born);
      const double count_mismatch = delta ? 0.0 : 1.0;
      checks.AtMost(r.name + ".born_outcome_count_mismatch", count_mismatch,
                    0.0);
      if (!delta) continue;
      deltas[r.name] = {{"value", delta->first},
                        {"probability", delta->second}};
      checks.AtMost(r.name + ".born_value_delta", delta->first, 1e-8);
      checks.AtMost(r.name + ".born_probability_delta", delta->second, 1e-8);
    }
    diagnostics["born_delta"] = std::move(deltas);
  }

  if (routes.size() == 2) {
    const auto delta =
        DistributionDelta(routes[0].distribution, routes[1].distribution);
    checks.AtMost("route_outcome_count_mismatch", delta ? 0.0 : 1.0, 0.0);
    if (delta) {
      diagnostics["route_delta"] = {{"value", delta->first},
                                    {"probability", delta->second}};
      checks.AtMost("route_value_delta", delta->first, 1e-6);
      checks.AtMost("route_probability_delta", delta->second, 1e-6);
    }
  }

  if (want_numeric && has_projector) {
    OrderedJson conv = OrderedJson::array();
    for (const ConvergenceRow& row : RunConvergence(s, s.epsilons)) {
      conv.push_back({{"epsilon", row.epsilon},
                      {"nodes", row.nodes},
                      {"error_norm", row.error_norm}});
    }
    diagnostics["convergence"] = std::move(conv);
  }

  RunResult out;
  out.checks = checks.Take();
  OrderedJson check_json = OrderedJson::array();
  for (const ReportCheck& c : out.checks) {
    check_json.push_back({{"name", c.name},
                          {"value", c.value},
                          {"limit", c.limit},
                          {"passed", c.passed}});
  }
  diagnostics["checks"] = std::move(check_json);

  out.report["scenario"] = ScenarioEcho(s);
  out.report["results"] = std::move(results);
  out.report["diagnostics"] = std::move(diagnostics);
  out.report["status"] = out.ok() ? "ok" : "check_failed";
  if (options.timing) {
    OrderedJson timing;
    for (const RouteOutput& r : routes) timing[r.name + "_ms"] = r.elapsed_ms;
    timing["total_ms"] = MillisecondsSince(start);
    out.report["timing"] = std::move(timing);
  }
  return out;
}

std::vector<ConvergenceRow> RunConvergence(
    const Scenario& s, const std::vector<double>& epsilons) {
  const StateVector exact = QSpectral(s.quantity, s.state);
  std::vector<ConvergenceRow> rows;
  for (double eps : epsilons) {
    const auto t0 = Clock::now();
    ConvergenceRow row;
    row.epsilon = eps;
    row.nodes = NodesFor(s, eps);
    const StateVector approx = QNumeric(s.quantity, s.state, eps, row.nodes);
    row.error_norm = Norm2(Subtract(approx.coords(), exact.coords()));
    row.wall_time_ms = MillisecondsSince(t0);
    rows.push_back(row);
  }
  return rows;
}

std::string FormatDouble(double x) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, result.ptr);
}

std::string FormatConvergenceCsv(const std::vector<ConvergenceRow>& rows) {
  std::string out = "epsilon,error_norm,nodes,wall_time_ms\n";
  for (const ConvergenceRow& r : rows) {
    out += FormatDouble(r.epsilon) + "," + FormatDouble(r.error_norm) + "," +
           std::to_string(r.nodes) + "," + FormatDouble(r.wall_time_ms) + "\n";
  }
  return out;
}

void WriteFileAtomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path temp = target;
  temp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) Throw(ErrorKind::kValidation, "cannot write " + temp.string());
    out << content;
    out.flush();
    if (!out) Throw(ErrorKind::kValidation, "write failed for " + temp.string());
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    Throw(ErrorKind::kValidation, "cannot move report into " + path);
  }
}

std::string DumpReport(const OrderedJson& report) {
  return report.dump(2) + "\n";
}

}  // namespace conic_qm
