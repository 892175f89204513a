#include "conic_qm/scenario.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "conic_qm/errors.h"
#include "conic_qm/measurement.h"
#include "conic_qm/sampling.h"

namespace conic_qm {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

[[noreturn]] void ParseFail(const std::string& path, const std::string& why) {
  Throw(ErrorKind::kParse, path + ": " + why);
}

// Re-raises core-library errors with the field path attached.
template <typename F>
auto WithPath(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

const Json& Require(const Json& obj, const std::string& path,
                    const std::string& key) {
  if (!obj.is_object()) ParseFail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) ParseFail(path + "." + key, "missing field");
  return *it;
}

const Json* Find(const Json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double ReadNumber(const Json& v, const std::string& path) {
  if (!v.is_number()) ParseFail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) ParseFail(path, "value is not finite");
  return x;
}

std::string ReadString(const Json& v, const std::string& path) {
  if (!v.is_string()) ParseFail(path, "expected a string");
  return v.get<std::string>();
}

bool ReadBool(const Json& v, const std::string& path) {
  if (!v.is_boolean()) ParseFail(path, "expected true or false");
  return v.get<bool>();
}

std::uint64_t ReadUnsigned(const Json& v, const std::string& path) {
  if (!v.is_number_unsigned()) ParseFail(path, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

Vector ReadVector(const Json& v, const std::string& path) {
  if (!v.is_array()) ParseFail(path, "expected an array of numbers");
  Vector out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(ReadNumber(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// Rows of a square matrix; `read` parses one entry.
template <typename Entry, typename F>
std::vector<std::vector<Entry>> ReadSquare(const Json& v,
                                           const std::string& path,
                                           std::size_t n, F read) {
  if (!v.is_array() || v.size() != n) {
    ParseFail(path, "expected " + std::to_string(n) + " rows");
  }
  std::vector<std::vector<Entry>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != n) {
      ParseFail(row_path, "expected " + std::to_string(n) + " entries");
    }
    for (std::size_t j = 0; j < n; ++j) {
      rows[i].push_back(read(v[i][j], row_path + "[" + std::to_string(j) + "]"));
    }
  }
  return rows;
}

RealMatrix ReadRealMatrix(const Json& v, const std::string& path,
                          std::size_t n) {
  const auto rows = ReadSquare<double>(v, path, n, ReadNumber);
  RealMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Complex ReadComplex(const Json& v, const std::string& path) {
  if (v.is_number()) return Complex(ReadNumber(v, path), 0.0);
  if (v.is_array() && v.size() == 2) {
    return Complex(ReadNumber(v[0], path + "[0]"),
                   ReadNumber(v[1], path + "[1]"));
  }
  ParseFail(path, "expected a number or a [re, im] pair");
}

ComplexMatrix ReadComplexMatrix(const Json& v, const std::string& path,
                                std::size_t n) {
  const auto rows = ReadSquare<Complex>(v, path, n, ReadComplex);
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

OrderedJson RealMatrixJson(const RealMatrix& m) {
  OrderedJson rows = OrderedJson::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    OrderedJson row = OrderedJson::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

OrderedJson ComplexMatrixJson(const ComplexMatrix& m) {
  OrderedJson rows = OrderedJson::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    OrderedJson row = OrderedJson::array();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const Complex z = m(i, j);
      if (z.imag() == 0.0) {
        row.push_back(z.real());
      } else {
        row.push_back(OrderedJson::array({z.real(), z.imag()}));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ConeModel ParseCone(const Json& v) {
  const std::string path = "$.cone";
  const std::string kind = ReadString(Require(v, path, "kind"), path + ".kind");
  const Json& size_json = Require(v, path, "size");
  const std::uint64_t size = ReadUnsigned(size_json, path + ".size");
  if (size < 1 || size > 64) ParseFail(path + ".size", "must lie in [1, 64]");
  const auto n = static_cast<std::size_t>(size);
  if (kind == "simplex") return ConeModel::Simplex(n);
  if (kind == "psd" || kind == "psd-hermitian") {
    return ConeModel::PsdHermitian(n);
  }
  if (kind == "spin" || kind == "spin-factor") return ConeModel::SpinFactor(n);
  ParseFail(path + ".kind", "unknown cone kind \"" + kind +
                                "\" (expected psd, simplex or spin)");
}

std::string ConeKindName(ConeKind kind) {
  switch (kind) {
    case ConeKind::kSimplex:
      return "simplex";
    case ConeKind::kPsdHermitian:
      return "psd";
    case ConeKind::kSpinFactor:
      return "spin";
  }
  return "";
}

StateVector ParseState(const Json& doc, const ConeModel& cone,
                       std::uint64_t seed, double membership_tol) {
  const std::string path = "$.state";
  const Json& v = Require(doc, "$", "state");
  if (!v.is_object()) ParseFail(path, "expected an object");
  bool normalize = false;
  if (const Json* n = Find(doc, "normalize")) {
    normalize = ReadBool(*n, "$.normalize");
  }

  StateVector x;
  if (const Json* coords = Find(v, "coords")) {
    Vector c = ReadVector(*coords, path + ".coords");
    if (c.size() != cone.dimension()) {
      ParseFail(path + ".coords",
                "expected " + std::to_string(cone.dimension()) +
                    " coordinates for " + cone.Name());
    }
    x = StateVector(std::move(c));
  } else if (const Json* matrix = Find(v, "matrix")) {
    if (cone.kind() != ConeKind::kPsdHermitian) {
      ParseFail(path + ".matrix", "matrix states need a psd cone");
    }
    const ComplexMatrix m =
        ReadComplexMatrix(*matrix, path + ".matrix", cone.size());
    if (m.HermitianDefect() > 1e-12) {
      Throw(ErrorKind::kValidation, path + ".matrix: matrix is not Hermitian");
    }
    x = StateVector(CoordsFromHermitian(m));
  } else if (const Json* random = Find(v, "random")) {
    if (!ReadBool(*random, path + ".random")) {
      ParseFail(path + ".random", "must be true when present");
    }
    x = RandomNormalizedState(cone, seed);
  } else {
    ParseFail(path, "expected one of \"coords\", \"matrix\", \"random\"");
  }

  if (normalize) {
    x = WithPath(path, [&] { return Normalize(cone, x); });
  }
  const double ex = EValue(cone, x);
  if (std::abs(ex - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << path << ": state not normalized (e = " << ex
        << "); set \"normalize\": true to rescale";
    Throw(ErrorKind::kNormalization, msg.str());
  }
  if (!Contains(cone, x, membership_tol)) {
    std::ostringstream msg;
    msg << path << ": state lies outside " << cone.Name() << " (margin "
        << ConeMargin(cone, x) << ")";
    Throw(ErrorKind::kValidation, msg.str());
  }
  return x;
}

struct ParsedQuantity {
  PhysicalQuantity quantity;
  OrderedJson canonical;
};

ParsedQuantity ParseQuantity(const Json& doc, const ConeModel& cone,
                             std::uint64_t seed) {
  const std::string path = "$.quantity";
  const Json& v = Require(doc, "$", "quantity");
  const std::string type =
      ReadString(Require(v, path, "type"), path + ".type");
  const std::size_t n = cone.size();
  const std::size_t d = cone.dimension();

  if (type == "hermitian") {
    if (cone.kind() != ConeKind::kPsdHermitian) {
      ParseFail(path + ".type", "hermitian quantities need a psd cone");
    }
    const ComplexMatrix m =
        ReadComplexMatrix(Require(v, path, "matrix"), path + ".matrix", n);
    PhysicalQuantity q =
        WithPath(path + ".matrix", [&] { return MakeHermitianQuantity(m); });
    return {std::move(q), OrderedJson{{"type", "hermitian"},
                                      {"matrix", ComplexMatrixJson(m)}}};
  }
  if (type == "rotation") {
    if (cone.kind() != ConeKind::kSpinFactor) {
      ParseFail(path + ".type", "rotation quantities need a spin cone");
    }
    const RealMatrix omega =
        ReadRealMatrix(Require(v, path, "axisplane"), path + ".axisplane", n);
    const Vector u = ReadVector(Require(v, path, "u"), path + ".u");
    if (u.size() != n) {
      ParseFail(path + ".u", "expected " + std::to_string(n) + " entries");
    }
    const double c0 = ReadNumber(Require(v, path, "c0"), path + ".c0");
    const double c1 = ReadNumber(Require(v, path, "c1"), path + ".c1");
    PhysicalQuantity q = WithPath(
        path, [&] { return MakeRotationQuantity(n, omega, c0, c1, u); });
    return {std::move(q), OrderedJson{{"type", "rotation"},
                                      {"axisplane", RealMatrixJson(omega)},
                                      {"u", u},
                                      {"c0", c0},
                                      {"c1", c1}}};
  }
  if (type == "classical") {
    if (cone.kind() != ConeKind::kSimplex) {
      ParseFail(path + ".type", "classical quantities need a simplex cone");
    }
    Vector values = ReadVector(Require(v, path, "values"), path + ".values");
    if (values.size() != d) {
      ParseFail(path + ".values", "expected " + std::to_string(d) + " entries");
    }
    OrderedJson canonical{{"type", "classical"}, {"values", values}};
    PhysicalQuantity q = WithPath(path, [&] {
      return MakeRawQuantity(cone, RealMatrix(d, d), std::move(values), true);
    });
    return {std::move(q), std::move(canonical)};
  }
  if (type == "raw") {
    RealMatrix g =
        ReadRealMatrix(Require(v, path, "generator"), path + ".generator", d);
    Vector outcome =
        ReadVector(Require(v, path, "outcome"), path + ".outcome");
    if (outcome.size() != d) {
      ParseFail(path + ".outcome", "expected " + std::to_string(d) + " entries");
    }
    bool declared_skew = false;
    if (const Json* s = Find(v, "declared_skew")) {
      declared_skew = ReadBool(*s, path + ".declared_skew");
    }
    OrderedJson canonical{{"type", "raw"},
                     {"generator", RealMatrixJson(g)},
                     {"outcome", outcome},
                     {"declared_skew", declared_skew}};
    PhysicalQuantity q = WithPath(path, [&] {
      return MakeRawQuantity(cone, std::move(g), std::move(outcome),
                             declared_skew, seed);
    });
    return {std::move(q), std::move(canonical)};
  }
  if (type == "random") {
    // Offset so the quantity and a random state draw different streams.
    PhysicalQuantity q = RandomQuantity(cone, seed + 0x9e3779b97f4a7c15ULL);
    OrderedJson canonical;
    if (q.observable()) {
      canonical = {{"type", "hermitian"},
              {"matrix", ComplexMatrixJson(*q.observable())}};
    } else if (cone.kind() == ConeKind::kSimplex) {
      canonical = {{"type", "classical"}, {"values", q.outcome()}};
    } else {
      canonical = {{"type", "raw"},
              {"generator", RealMatrixJson(q.g())},
              {"outcome", q.outcome()},
              {"declared_skew", q.generator().declared_skew}};
    }
    return {std::move(q), std::move(canonical)};
  }
  ParseFail(path + ".type",
            "unknown quantity type \"" + type +
                "\" (expected hermitian, rotation, classical, raw or random)");
}

}  // namespace

RouteChoice ParseRouteChoice(const std::string& name) {
  if (name == "spectral") return RouteChoice::kSpectral;
  if (name == "numeric") return RouteChoice::kNumeric;
  if (name == "both") return RouteChoice::kBoth;
  Throw(ErrorKind::kParse, "route must be spectral, numeric or both, not \"" +
                               name + "\"");
}

std::string RouteChoiceName(RouteChoice route) {
  switch (route) {
    case RouteChoice::kSpectral:
      return "spectral";
    case RouteChoice::kNumeric:
      return "numeric";
    case RouteChoice::kBoth:
      return "both";
  }
  return "";
}

Scenario ParseScenario(const Json& doc, const ScenarioOverrides& overrides) {
  if (!doc.is_object()) ParseFail("$", "expected a JSON object");
  static const char* const kKnown[] = {
      "cone",     "state", "normalize",  "quantity", "route",
      "epsilons", "nodes", "tolerances", "seed"};
  for (const auto& item : doc.items()) {
    bool known = false;
    for (const char* k : kKnown) known = known || item.key() == k;
    if (!known) ParseFail("$." + item.key(), "unknown field");
  }

  std::uint64_t seed = 0;
  if (const Json* s = Find(doc, "seed")) seed = ReadUnsigned(*s, "$.seed");
  if (overrides.seed) seed = *overrides.seed;

  double membership_tol = 1e-9;
  std::optional<double> outcome_tol;
  if (const Json* t = Find(doc, "tolerances")) {
    if (!t->is_object()) ParseFail("$.tolerances", "expected an object");
    for (const auto& item : t->items()) {
      const std::string p = "$.tolerances." + item.key();
      if (item.key() == "membership") {
        membership_tol = ReadNumber(item.value(), p);
        if (membership_tol < 0.0) ParseFail(p, "must be nonnegative");
      } else if (item.key() == "outcome") {
        outcome_tol = ReadNumber(item.value(), p);
        if (*outcome_tol < 0.0) ParseFail(p, "must be nonnegative");
      } else {
        ParseFail(p, "unknown tolerance");
      }
    }
  }

  RouteChoice route = RouteChoice::kSpectral;
  if (const Json* r = Find(doc, "route")) {
    const std::string name = ReadString(*r, "$.route");
    try {
      route = ParseRouteChoice(name);
    } catch (const Error& e) {
      ParseFail("$.route", e.what());
    }
  }
  if (overrides.route) route = *overrides.route;

  std::vector<double> epsilons(std::begin(kDefaultEpsilons),
                               std::end(kDefaultEpsilons));
  if (const Json* e = Find(doc, "epsilons")) {
    epsilons = ReadVector(*e, "$.epsilons");
  }
  if (overrides.epsilons) epsilons = *overrides.epsilons;
  if (epsilons.empty()) ParseFail("$.epsilons", "needs at least one value");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) {
      ParseFail("$.epsilons[" + std::to_string(i) + "]", "must be positive");
    }
  }

  std::optional<int> nodes;
  if (const Json* n = Find(doc, "nodes")) {
    const std::uint64_t v = ReadUnsigned(*n, "$.nodes");
    if (v < 1 || v > static_cast<std::uint64_t>(kMaxHermiteNodes)) {
      ParseFail("$.nodes", "must lie in [1, " +
                               std::to_string(kMaxHermiteNodes) + "]");
    }
    nodes = static_cast<int>(v);
  }
  if (overrides.nodes) {
    if (*overrides.nodes < 1 || *overrides.nodes > kMaxHermiteNodes) {
      Throw(ErrorKind::kParse, "--nodes must lie in [1, " +
                                   std::to_string(kMaxHermiteNodes) + "]");
    }
    nodes = overrides.nodes;
  }

  ConeModel cone = ParseCone(Require(doc, "$", "cone"));
  StateVector state = ParseState(doc, cone, seed, membership_tol);
  ParsedQuantity parsed = ParseQuantity(doc, cone, seed);

  return Scenario{.cone = std::move(cone),
                  .state = std::move(state),
                  .quantity = std::move(parsed.quantity),
                  .quantity_spec = std::move(parsed.canonical),
                  .route = route,
                  .epsilons = std::move(epsilons),
                  .nodes = nodes,
                  .membership_tol = membership_tol,
                  .outcome_tol = outcome_tol,
                  .seed = seed};
}

Scenario ParseScenarioText(const std::string& text,
                           const ScenarioOverrides& overrides) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte, text.size() + 1);
    for (std::size_t i = 0; i + 1 < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    if (pos != std::string::npos) what = what.substr(pos);
    Throw(ErrorKind::kParse, "line " + std::to_string(line) + ", column " +
                                 std::to_string(column) + ": " + what);
  }
  return ParseScenario(doc, overrides);
}

Scenario LoadScenario(const std::string& path,
                      const ScenarioOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Throw(ErrorKind::kParse, "cannot read scenario file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseScenarioText(buffer.str(), overrides);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

OrderedJson ScenarioEcho(const Scenario& s) {
  OrderedJson echo;
  echo["cone"] = {{"kind", ConeKindName(s.cone.kind())},
                  {"size", s.cone.size()}};
  echo["state"] = {{"coords", s.state.coords()}};
  echo["normalize"] = false;
  echo["quantity"] = s.quantity_spec;
  echo["route"] = RouteChoiceName(s.route);
  echo["epsilons"] = s.epsilons;
  if (s.nodes) echo["nodes"] = *s.nodes;
  OrderedJson tol{{"membership", s.membership_tol}};
  if (s.outcome_tol) tol["outcome"] = *s.outcome_tol;
  echo["tolerances"] = std::move(tol);
  echo["seed"] = s.seed;
  return echo;
}

}  // namespace conic_qm
