// Command-line front end: run scenarios, study epsilon convergence, and
// execute the self-check suites.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "conic_qm/errors.h"
#include "conic_qm/report.h"
#include "conic_qm/scenario.h"
#include "conic_qm/selfcheck.h"

namespace conic_qm {
namespace {

constexpr int kInvariantExit = 4;

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> nodes;
  std::optional<std::string> route;
  std::vector<double> eps;
  std::string out;

  ScenarioOverrides Overrides() const {
    ScenarioOverrides o;
    o.seed = seed;
    o.nodes = nodes;
    if (route) o.route = ParseRouteChoice(*route);
    if (!eps.empty()) o.epsilons = eps;
    return o;
  }
};

void AddCommonFlags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--seed", flags.seed, "Seed for random states/quantities");
  cmd->add_option("--nodes", flags.nodes, "Gauss-Hermite node count (1-256)")
      ->check(CLI::Range(1, 256));
  cmd->add_option("--eps", flags.eps, "Epsilon values, e.g. --eps 1,0.1,0.01")
      ->delimiter(',');
}

int ReportError(const std::string& context, const Error& e) {
  std::cerr << "error: " << context << e.what() << "\n";
  return ExitCodeFor(e.kind());
}

// Number of worker threads for a batch of `jobs` scenarios.
std::size_t WorkerCount(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CONIC_QM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) n = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring CONIC_QM_THREADS=" << env << "\n";
    }
  }
  return std::min(n, jobs);
}

struct JobOutcome {
  int exit_code = 0;
  std::string messages;
};

JobOutcome RunOne(const std::string& scenario_path,
                  const std::optional<std::string>& report_path,
                  const ScenarioOverrides& overrides,
                  const ReportOptions& options) {
  JobOutcome outcome;
  try {
    const Scenario scenario = LoadScenario(scenario_path, overrides);
    const RunResult result = RunScenario(scenario, options);
    const std::string text = DumpReport(result.report);
    if (report_path) {
      WriteFileAtomic(*report_path, text);
    } else {
      std::cout << text;
    }
    if (!result.ok()) {
      outcome.exit_code = kInvariantExit;
      outcome.messages = "error: " + scenario_path + ": tolerance check " +
                         "failed\n" + result.FailureSummary();
    }
  } catch (const Error& e) {
    outcome.exit_code = ExitCodeFor(e.kind());
    outcome.messages = std::string("error: ") + e.what() + "\n";
  } catch (const std::exception& e) {
    outcome.exit_code = 2;
    outcome.messages = std::string("error: ") + scenario_path + ": " +
                       e.what() + "\n";
  }
  return outcome;
}

int RunCommand(const std::vector<std::string>& scenarios,
               const CommonFlags& flags, bool timing) {
  ScenarioOverrides overrides;
  try {
    overrides = flags.Overrides();
  } catch (const Error& e) {
    return ReportError("", e);
  }
  const ReportOptions options{.timing = timing};

  if (scenarios.size() == 1) {
    std::optional<std::string> out;
    if (!flags.out.empty()) out = flags.out;
    const JobOutcome r = RunOne(scenarios[0], out, overrides, options);
    std::cerr << r.messages;
    return r.exit_code;
  }

  // Batch: --out names a directory receiving <stem>.report.json files.
  if (flags.out.empty()) {
    std::cerr << "error: --out <directory> is required for several "
                 "scenarios\n";
    return 2;
  }
  std::error_code ec;
  std::filesystem::create_directories(flags.out, ec);
  if (ec) {
    std::cerr << "error: cannot create " << flags.out << "\n";
    return 2;
  }
  std::vector<JobOutcome> outcomes(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      const std::filesystem::path src(scenarios[i]);
      const std::string target =
          (std::filesystem::path(flags.out) /
           (src.stem().string() + ".report.json"))
              .string();
      outcomes[i] = RunOne(scenarios[i], target, overrides, options);
    }
  };
  std::vector<std::thread> pool;
  const std::size_t workers = WorkerCount(scenarios.size());
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  // Report in input order; the exit code is the first failure's.
  int code = 0;
  for (const JobOutcome& o : outcomes) {
    std::cerr << o.messages;
    if (code == 0) code = o.exit_code;
  }
  return code;
}

int ConvergeCommand(const std::string& scenario_path,
                    const CommonFlags& flags) {
  try {
    const Scenario scenario = LoadScenario(scenario_path, flags.Overrides());
    const std::vector<ConvergenceRow> rows =
        RunConvergence(scenario, scenario.epsilons);
    const std::string csv = FormatConvergenceCsv(rows);
    if (flags.out.empty()) {
      std::cout << csv;
    } else {
      WriteFileAtomic(flags.out, csv);
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i - 1].epsilon > rows[i].epsilon &&
          rows[i - 1].error_norm > 0.0 &&
          !(rows[i].error_norm < rows[i - 1].error_norm)) {
        std::cerr << "warning: error_norm does not decrease from epsilon "
                  << FormatDouble(rows[i - 1].epsilon) << " to "
                  << FormatDouble(rows[i].epsilon) << "\n";
      }
    }
    return 0;
  } catch (const Error& e) {
    return ReportError("", e);
  }
}

int SelfCheckCommand(double tolerance_scale, const std::string& out) {
  const std::vector<PropertyResult> results = RunSelfCheck(tolerance_scale);
  const std::string summary = FormatSelfCheck(results);
  std::cout << summary;
  if (!out.empty()) {
    try {
      WriteFileAtomic(out, summary);
    } catch (const Error& e) {
      return ReportError("", e);
    }
  }
  const bool ok = std::all_of(results.begin(), results.end(),
                              [](const PropertyResult& r) { return r.ok(); });
  return ok ? 0 : kInvariantExit;
}

int Main(int argc, char** argv) {
  CLI::App app{"Geometric measurement pipeline on state cones"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::vector<std::string> run_scenarios;
  bool timing = false;
  CLI::App* run = app.add_subcommand("run", "Run scenario files and emit "
                                            "JSON reports");
  run->add_option("scenario", run_scenarios, "Scenario JSON file(s)")
      ->required();
  run->add_option("--out", run_flags.out,
                  "Report file (one scenario) or directory (several)");
  run->add_option("--route", run_flags.route, "spectral, numeric or both")
      ->check(CLI::IsMember({"spectral", "numeric", "both"}));
  run->add_flag("--timing", timing, "Include wall-clock timings in reports");
  AddCommonFlags(run, run_flags);

  CommonFlags conv_flags;
  std::string conv_scenario;
  CLI::App* converge = app.add_subcommand(
      "converge", "Tabulate |Q_eps x - Q x| over an epsilon list as CSV");
  converge->add_option("scenario", conv_scenario, "Scenario JSON file")
      ->required();
  converge->add_option("--out", conv_flags.out, "CSV file (default stdout)");
  AddCommonFlags(converge, conv_flags);

  double tolerance_scale = 1.0;
  std::string check_out;
  CLI::App* selfcheck = app.add_subcommand(
      "selfcheck", "Run the invariant suites at fixed seeds");
  selfcheck->add_option("--out", check_out, "Also write the summary here");
  selfcheck->add_option("--tolerance-scale", tolerance_scale)
      ->group("")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run) return RunCommand(run_scenarios, run_flags, timing);
  if (*converge) return ConvergeCommand(conv_scenario, conv_flags);
  return SelfCheckCommand(tolerance_scale, check_out);
}

}  // namespace
}  // namespace conic_qm

int main(int argc, char** argv) { return conic_qm::Main(argc, argv); }
