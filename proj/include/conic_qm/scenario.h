#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "conic_qm/cone.h"

namespace conic_qm {

enum class RouteChoice { kSpectral, kNumeric, kBoth };

/// "spectral", "numeric", "both". Throws kParse on anything else.
RouteChoice ParseRouteChoice(const std::string& name);
std::string RouteChoiceName(RouteChoice route);

/// A fully resolved scenario: validated cone, normalized state and physical
/// quantity, plus the run settings.
///
/// JSON layout (complex entries as [re, im], matrices as row-major nested
/// arrays):
///
///   {
///     "cone": {"kind": "psd" | "simplex" | "spin", "size": n},
///     "state": {"coords": [...]} | {"matrix": [[...]]} | {"random": true},
///     "normalize": false,
///     "quantity":
///         {"type": "hermitian", "matrix": [[...]]}
///       | {"type": "rotation", "axisplane": [[...]], "u": [...],
///          "c0": c0, "c1": c1}
///       | {"type": "classical", "values": [...]}
///       | {"type": "raw", "generator": [[...]], "outcome": [...],
///          "declared_skew": false}
///       | {"type": "random"},
///     "route": "spectral" | "numeric" | "both",
///     "epsilons": [1, 0.1, 0.01],
///     "nodes": 64,
///     "tolerances": {"membership": 1e-9, "outcome": 1e-8},
///     "seed": 0
///   }
///
/// Random states and quantities are drawn from `seed`. When "nodes" is
/// absent the numeric route picks the smallest rule (at least 64 nodes)
/// that resolves the flow at each epsilon.
struct Scenario {
  ConeModel cone;
  StateVector state;
  PhysicalQuantity quantity;
  // Canonical form of the quantity, used for the report echo.
  nlohmann::ordered_json quantity_spec;
  RouteChoice route = RouteChoice::kSpectral;
  std::vector<double> epsilons;
  std::optional<int> nodes;
  double membership_tol = 1e-9;
  std::optional<double> outcome_tol;
  std::uint64_t seed = 0;
};

/// Command-line overrides applied on top of the scenario file.
struct ScenarioOverrides {
  std::optional<RouteChoice> route;
  std::optional<std::vector<double>> epsilons;
  std::optional<int> nodes;
  std::optional<std::uint64_t> seed;
};

/// Builds a scenario from parsed JSON. Schema problems throw kParse with the
/// offending field path ("$.quantity.matrix[1][0]: expected a number");
/// semantic problems keep the kind raised by the core library, prefixed
/// with the field path.
Scenario ParseScenario(const nlohmann::json& doc,
                       const ScenarioOverrides& overrides = {});

/// Parses scenario text; JSON syntax errors report line and column.
Scenario ParseScenarioText(const std::string& text,
                           const ScenarioOverrides& overrides = {});

/// Reads and parses a scenario file.
Scenario LoadScenario(const std::string& path,
                      const ScenarioOverrides& overrides = {});

/// Resolved inputs as scenario JSON. Parsing the result yields an equivalent
/// scenario (same cone, state coordinates, quantity and settings).
nlohmann::ordered_json ScenarioEcho(const Scenario& scenario);

}  // namespace conic_qm
