#include "conic_qm/selfcheck.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "conic_qm/errors.h"
#include "conic_qm/jordan.h"
#include "conic_qm/measurement.h"
#include "conic_qm/report.h"
#include "conic_qm/sampling.h"
#include "conic_qm/scenario.h"

namespace conic_qm {
namespace {

// Collects the cases of one property.
class Property {
 public:
  Property(std::string name, double scale) : scale_(scale) {
    result_.name = std::move(name);
  }

  // Records value <= limit * scale for one case.
  void Check(double value, double limit, std::uint64_t id) {
    ++result_.total;
    const double allowed = limit * scale_;
    if (value <= allowed) ++result_.passed;
    const double ratio = allowed > 0.0 ? value / allowed
                                       : (value > 0.0 ? INFINITY : 0.0);
    if (!(ratio <= worst_ratio_)) {
      worst_ratio_ = ratio;
      result_.worst_value = value;
      result_.worst_limit = allowed;
      result_.worst_case = id;
    }
  }

  // Runs `body(id)` for each id, counting an exception as a failed case.
  void ForEach(std::uint64_t count,
               const std::function<void(std::uint64_t)>& body) {
    for (std::uint64_t id = 0; id < count; ++id) {
      try {
        body(id);
      } catch (const std::exception& e) {
        Fail(id, e.what());
      }
    }
  }

  // Counts a case that could not be evaluated.
  void Fail(std::uint64_t id, const std::string& what) {
    ++result_.total;
    if (result_.error.empty()) {
      result_.error = "case " + std::to_string(id) + ": " + what;
    }
  }

  PropertyResult Finish() { return std::move(result_); }

 private:
  double scale_;
  double worst_ratio_ = -1.0;
  PropertyResult result_;
};

std::vector<ConeModel> SampleCones() {
  return {ConeModel::Simplex(3), ConeModel::Simplex(6),
          ConeModel::PsdHermitian(2), ConeModel::PsdHermitian(3),
          ConeModel::PsdHermitian(4), ConeModel::SpinFactor(3),
          ConeModel::SpinFactor(5)};
}

// Case `id` cycles through the sample cones.
const ConeModel& ConeFor(const std::vector<ConeModel>& cones,
                         std::uint64_t id) {
  return cones[id % cones.size()];
}

double HermiteMoment(int k) {
  if (k % 2 == 1) return 0.0;
  return std::tgamma((k + 1) / 2.0);
}

void LinalgSuite(double scale, std::vector<PropertyResult>& out) {
  Property sym("linalg.sym_eigen_residual", scale);
  sym.ForEach(20, [&](std::uint64_t id) {
    std::mt19937_64 rng(id);
    std::normal_distribution<double> normal(0.0, 1.0);
    RealMatrix a(8, 8);
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t j = i; j < 8; ++j) a(i, j) = a(j, i) = normal(rng);
    }
    const EigenResult r = SymEigen(a);
    RealMatrix lambda(8, 8);
    for (std::size_t i = 0; i < 8; ++i) lambda(i, i) = r.eigenvalues[i];
    const RealMatrix v = r.eigenvectors;
    sym.Check((a * v - v * lambda).MaxAbs(), 1e-10, id);
    sym.Check((v.Transpose() * v - RealMatrix::Identity(8)).MaxAbs(), 1e-10,
              id);
  });
  out.push_back(sym.Finish());

  Property herm("linalg.herm_eigen_residual", scale);
  herm.ForEach(20, [&](std::uint64_t id) {
    const ComplexMatrix a = RandomHermitianMatrix(8, id);
    const HermitianEigenResult r = HermEigen(a);
    const ComplexMatrix& v = r.eigenvectors;
    const ComplexMatrix rebuilt =
        v * ComplexMatrix::Diagonal(r.eigenvalues) * v.Adjoint();
    herm.Check((rebuilt - a).MaxAbs(), 1e-10, id);
    herm.Check((v.Adjoint() * v - ComplexMatrix::Identity(8)).MaxAbs(), 1e-10,
               id);
  });
  out.push_back(herm.Finish());

  Property group("linalg.matexp_group_law", scale);
  group.ForEach(20, [&](std::uint64_t id) {
    std::mt19937_64 rng(id);
    std::normal_distribution<double> normal(0.0, 1.0);
    RealMatrix g(6, 6);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) g(i, j) = 0.5 * normal(rng);
    }
    const double s = normal(rng);
    const double t = normal(rng);
    const RealMatrix lhs = MatExp(g, s + t);
    const RealMatrix rhs = MatExp(g, s) * MatExp(g, t);
    group.Check((lhs - rhs).MaxAbs() / std::max(1.0, lhs.MaxAbs()), 1e-9, id);
  });
  out.push_back(group.Finish());

  Property gh("linalg.gauss_hermite_exactness", scale);
  const int sizes[] = {1, 2, 3, 5, 8, 13, 21, 34, 64};
  gh.ForEach(std::size(sizes), [&](std::uint64_t id) {
    const int n = sizes[id];
    const QuadratureRule r = GaussHermite(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double sum = 0.0;
      double mag = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        const double term = r.weights[i] * std::pow(r.nodes[i], k);
        sum += term;
        mag += std::abs(term);
      }
      // Relative to the moment magnitude; odd moments vanish.
      gh.Check(std::abs(sum - HermiteMoment(k)),
               1e-10 * std::max(mag, 1e-300), id);
    }
  });
  out.push_back(gh.Finish());
}

void ConeSuite(double scale, std::vector<PropertyResult>& out) {
  const std::vector<ConeModel> cones = SampleCones();
  const double times[] = {-5.0, -1.3, 0.4, 2.0, 5.0};
  Property e_pres("cone.flow_preserves_e", scale);
  Property cone_pres("cone.flow_preserves_cone", scale);
  Property inv("cone.outcome_invariance", scale);
  Property group("cone.flow_group_law", scale);
  const auto body = [&](std::uint64_t id) {
    const ConeModel& cone = ConeFor(cones, id);
    const PhysicalQuantity q = RandomQuantity(cone, id);
    const StateVector x = RandomNormalizedState(cone, id + 1000);
    const double a_x = q.OutcomeValue(x);
    for (double t : times) {
      const StateVector y = Evolve(q, t, x);
      e_pres.Check(std::abs(EValue(cone, y) - 1.0), 1e-10, id);
      cone_pres.Check(std::max(0.0, -ConeMargin(cone, y)), 1e-8, id);
      inv.Check(std::abs(q.OutcomeValue(y) - a_x), 1e-9 * (1 + std::abs(a_x)),
                id);
    }
    const StateVector two = Evolve(q, 0.7, Evolve(q, 0.5, x));
    group.Check(MaxAbs(Subtract(two.coords(), Evolve(q, 1.2, x).coords())),
                1e-9, id);
  };
  for (std::uint64_t id = 0; id < 70; ++id) {
    try {
      body(id);
    } catch (const std::exception& e) {
      e_pres.Fail(id, e.what());
    }
  }
  out.push_back(e_pres.Finish());
  out.push_back(cone_pres.Finish());
  out.push_back(inv.Finish());
  out.push_back(group.Finish());
}

std::vector<JordanAlgebra> SampleAlgebras() {
  return {JordanAlgebra::Classical(4), JordanAlgebra::Hermitian(2),
          JordanAlgebra::Hermitian(3), JordanAlgebra::Spin(3),
          JordanAlgebra::Spin(5)};
}

Vector RandomElement(const JordanAlgebra& alg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector x(alg.dimension());
  for (double& v : x) v = normal(rng);
  return x;
}

void JordanSuite(double scale, std::vector<PropertyResult>& out) {
  const std::vector<JordanAlgebra> algebras = SampleAlgebras();

  Property identity("jordan.jordan_identity", scale);
  identity.ForEach(100, [&](std::uint64_t id) {
    const JordanAlgebra& alg = algebras[id % algebras.size()];
    const Vector x = RandomElement(alg, id);
    const Vector y = RandomElement(alg, id + 5000);
    const Vector x2 = JordanProduct(alg, x, x);
    const Vector lhs = JordanProduct(alg, x2, JordanProduct(alg, x, y));
    const Vector rhs = JordanProduct(alg, x, JordanProduct(alg, x2, y));
    identity.Check(MaxAbs(Subtract(lhs, rhs)), 1e-9 * (1 + MaxAbs(lhs)), id);
    identity.Check(
        MaxAbs(Subtract(JordanProduct(alg, x, y), JordanProduct(alg, y, x))),
        0.0, id);
  });
  out.push_back(identity.Finish());

  Property spectral("jordan.spectral_reconstruction", scale);
  spectral.ForEach(100, [&](std::uint64_t id) {
    const JordanAlgebra& alg = algebras[id % algebras.size()];
    const Vector x = RandomElement(alg, id + 9000);
    const SpectralDecomposition sd = SpectralDecompose(alg, x);
    Vector rec(x.size(), 0.0);
    for (std::size_t i = 0; i < sd.idempotents.size(); ++i) {
      const Vector& c = sd.idempotents[i];
      spectral.Check(MaxAbs(Subtract(JordanProduct(alg, c, c), c)), 1e-9, id);
      for (std::size_t k = 0; k < x.size(); ++k) {
        rec[k] += sd.eigenvalues[i] * c[k];
      }
    }
    spectral.Check(MaxAbs(Subtract(rec, x)), 1e-9 * (1 + Norm2(x)), id);
  });
  out.push_back(spectral.Finish());

  Property morphism("jordan.spin_herm2_morphism", scale);
  const JordanAlgebra spin = JordanAlgebra::Spin(3);
  const JordanAlgebra herm = JordanAlgebra::Hermitian(2);
  morphism.ForEach(100, [&](std::uint64_t id) {
    const Vector x = RandomElement(spin, id);
    const Vector y = RandomElement(spin, id + 500);
    const Vector lhs = SpinToHerm2(JordanProduct(spin, x, y));
    const Vector rhs = JordanProduct(herm, SpinToHerm2(x), SpinToHerm2(y));
    morphism.Check(MaxAbs(Subtract(lhs, rhs)), 1e-10 * (1 + MaxAbs(lhs)), id);
    morphism.Check(MaxAbs(Subtract(Herm2ToSpin(SpinToHerm2(x)), x)),
                   1e-10 * (1 + MaxAbs(x)), id);
  });
  out.push_back(morphism.Finish());
}

double MaxDelta(const OutcomeDistribution& a, const OutcomeDistribution& b) {
  if (a.entries.size() != b.entries.size()) return INFINITY;
  double d = 0.0;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    d = std::max(d, std::abs(a.entries[i].value - b.entries[i].value));
    d = std::max(d,
                 std::abs(a.entries[i].probability - b.entries[i].probability));
  }
  return d;
}

void MeasurementSuite(double scale, std::vector<PropertyResult>& out) {
  const std::vector<ConeModel> cones = SampleCones();

  Property idem("measurement.projector_idempotence", scale);
  Property e_pres("measurement.projector_preserves_e", scale);
  Property cone_pres("measurement.projector_preserves_cone", scale);
  Property fixed("measurement.stationary_fixed_point", scale);
  Property commute("measurement.projector_commutes_with_flow", scale);
  for (std::uint64_t id = 0; id < 210; ++id) {
    const ConeModel& cone = ConeFor(cones, id);
    try {
      const PhysicalQuantity q = RandomQuantity(cone, id + 77);
      const StateVector x = RandomNormalizedState(cone, id + 3000);
      const DecoherenceProjector proj(q);
      const StateVector qx = proj.Apply(x);
      idem.Check(MaxAbs(Subtract(proj.Apply(qx).coords(), qx.coords())), 1e-10,
                 id);
      e_pres.Check(std::abs(EValue(cone, qx) - EValue(cone, x)), 1e-10, id);
      cone_pres.Check(std::max(0.0, -ConeMargin(cone, qx)), 1e-8, id);
      fixed.Check(MaxAbs(Subtract(QSpectral(q, qx).coords(), qx.coords())),
                  1e-10, id);
      const double t = 10.0 / std::max(1.0, q.g().FrobeniusNorm());
      commute.Check(
          MaxAbs(Subtract(proj.Apply(Evolve(q, t, x)).coords(), qx.coords())),
          1e-9, id);
    } catch (const std::exception& e) {
      idem.Fail(id, e.what());
    }
  }
  out.push_back(idem.Finish());
  out.push_back(e_pres.Finish());
  out.push_back(cone_pres.Finish());
  out.push_back(fixed.Finish());
  out.push_back(commute.Finish());

  Property conv("measurement.numeric_converges_to_spectral", scale);
  const std::vector<ConeModel> gapped = {
      ConeModel::PsdHermitian(2), ConeModel::PsdHermitian(3),
      ConeModel::SpinFactor(3), ConeModel::SpinFactor(4)};
  const double eps[] = {1.0, 0.3, 0.1, 0.03, 0.01};
  conv.ForEach(52, [&](std::uint64_t id) {
    const ConeModel& cone = gapped[id % gapped.size()];
    const PhysicalQuantity q = RandomGappedQuantity(cone, id, 1.0, 1.4);
    const StateVector x = RandomNormalizedState(cone, id + 11);
    const StateVector exact = QSpectral(q, x);
    double previous = INFINITY;
    double increase = 0.0;
    for (double e : eps) {
      const double err =
          Norm2(Subtract(QNumeric(q, x, e).coords(), exact.coords()));
      if (!(err < previous)) increase = 1.0;
      previous = err;
    }
    conv.Check(increase, 0.0, id);
    conv.Check(previous, 1e-6, id);
  });
  out.push_back(conv.Finish());

  Property born("measurement.born_equivalence", scale);
  born.ForEach(500, [&](std::uint64_t id) {
    const std::size_t n = 2 + id % 5;
    const ComplexMatrix a_hat = RandomHermitianMatrix(n, id + 40000);
    const StateVector rho =
        RandomNormalizedState(ConeModel::PsdHermitian(n), id + 50000);
    born.Check(MaxDelta(ComputeOutcomeDistribution(
                            MakeHermitianQuantity(a_hat), rho),
                        BornOracle(a_hat, HermitianFromCoords(rho.coords(), n))),
               1e-8, id);
  });
  out.push_back(born.Finish());

  Property prob("measurement.probability_structure", scale);
  prob.ForEach(140, [&](std::uint64_t id) {
    const ConeModel& cone = ConeFor(cones, id);
    const PhysicalQuantity q = RandomQuantity(cone, id + 900);
    const StateVector x = RandomNormalizedState(cone, id + 901);
    const OutcomeDistribution d = ComputeOutcomeDistribution(q, x);
    double total = 0.0;
    double mean = 0.0;
    double negative = 0.0;
    for (const Outcome& o : d.entries) {
      total += o.probability;
      mean += o.probability * o.value;
      negative = std::max(negative, -o.probability);
    }
    prob.Check(negative, 0.0, id);
    prob.Check(std::abs(total - 1.0), 1e-9, id);
    prob.Check(std::abs(mean - q.OutcomeValue(x)), 1e-9, id);
  });
  out.push_back(prob.Finish());

  Property transport("measurement.isomorphism_transport", scale);
  transport.ForEach(100, [&](std::uint64_t id) {
    std::mt19937_64 rng(id + 70000);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Vector u = RandomUnitVector(3, rng());
    const double c0 = normal(rng);
    const double c1 = normal(rng);
    const RealMatrix omega = RealMatrix::FromRows(
        {{0, -c1 * u[2], c1 * u[1]},
         {c1 * u[2], 0, -c1 * u[0]},
         {-c1 * u[1], c1 * u[0], 0}});
    const PhysicalQuantity spin_q = MakeRotationQuantity(3, omega, c0, c1, u);
    ComplexMatrix a_hat = HermitianFromCoords(
        SpinToHerm2(Vector{c0, c1 * u[0], c1 * u[1], c1 * u[2]}), 2);
    a_hat *= 0.5;
    const PhysicalQuantity herm_q = MakeHermitianQuantity(a_hat);
    const StateVector x =
        RandomNormalizedState(ConeModel::SpinFactor(3), rng());
    const StateVector rho(SpinToHerm2(x.coords()));
    transport.Check(MaxDelta(ComputeOutcomeDistribution(spin_q, x),
                             ComputeOutcomeDistribution(herm_q, rho)),
                    1e-10, id);
  });
  out.push_back(transport.Finish());

  Property classical("measurement.classical_limit", scale);
  classical.ForEach(100, [&](std::uint64_t id) {
    const std::size_t d = 1 + id % 10;
    const ConeModel cone = ConeModel::Simplex(d);
    Vector values(d);
    for (std::size_t i = 0; i < d; ++i) values[i] = static_cast<double>(d - i);
    const PhysicalQuantity q =
        MakeRawQuantity(cone, RealMatrix(d, d), values, true);
    const StateVector x = RandomNormalizedState(cone, id);
    const OutcomeDistribution dist = ComputeOutcomeDistribution(q, x);
    double err = dist.entries.size() == d ? 0.0 : INFINITY;
    for (std::size_t i = 0; i < std::min(d, dist.entries.size()); ++i) {
      err = std::max(err, std::abs(dist.entries[i].probability - x[i]));
      err = std::max(err, std::abs(dist.entries[i].value - values[i]));
    }
    classical.Check(err, 1e-12, id);
  });
  out.push_back(classical.Finish());
}

constexpr char kDephasingScenario[] = R"({
  "cone": {"kind": "psd", "size": 2},
  "state": {"matrix": [[0.5, 0.5], [0.5, 0.5]]},
  "quantity": {"type": "hermitian", "matrix": [[1, 0], [0, -1]]},
  "route": "both"
})";

void CliSuite(double scale, std::vector<PropertyResult>& out) {
  Property round_trip("cli.scenario_round_trip", scale);
  const char* const kinds[] = {"psd", "spin", "simplex"};
  round_trip.ForEach(30, [&](std::uint64_t id) {
    const std::string kind = kinds[id % 3];
    nlohmann::json doc = {{"cone", {{"kind", kind}, {"size", 2 + id % 3}}},
                          {"state", {{"random", true}}},
                          {"quantity", {{"type", "random"}}},
                          {"route", "spectral"},
                          {"seed", id}};
    const Scenario s = ParseScenario(doc);
    const Scenario back = ParseScenario(nlohmann::json::parse(
        ScenarioEcho(s).dump()));
    double diff = back.cone == s.cone ? 0.0 : INFINITY;
    diff = std::max(diff, MaxAbs(Subtract(back.state.coords(),
                                          s.state.coords())));
    diff = std::max(diff, (back.quantity.g() - s.quantity.g()).MaxAbs());
    diff = std::max(diff, MaxAbs(Subtract(back.quantity.outcome(),
                                          s.quantity.outcome())));
    round_trip.Check(diff, 0.0, id);
  });
  out.push_back(round_trip.Finish());

  Property determinism("cli.report_determinism", scale);
  determinism.ForEach(1, [&](std::uint64_t id) {
    const Scenario s = ParseScenarioText(kDephasingScenario);
    const std::string first = DumpReport(RunScenario(s).report);
    const std::string second = DumpReport(RunScenario(s).report);
    determinism.Check(first == second ? 0.0 : 1.0, 0.0, id);
  });
  out.push_back(determinism.Finish());
}

}  // namespace

std::vector<PropertyResult> RunSelfCheck(double tolerance_scale) {
  std::vector<PropertyResult> results;
  LinalgSuite(tolerance_scale, results);
  ConeSuite(tolerance_scale, results);
  JordanSuite(tolerance_scale, results);
  MeasurementSuite(tolerance_scale, results);
  CliSuite(tolerance_scale, results);
  return results;
}

std::string FormatSelfCheck(const std::vector<PropertyResult>& results) {
  std::ostringstream out;
  int passed = 0;
  for (const PropertyResult& r : results) {
    out << (r.ok() ? "PASS " : "FAIL ") << r.name << " " << r.passed << "/"
        << r.total;
    if (!r.ok()) {
      if (!r.error.empty()) {
        out << " (" << r.error << ")";
      } else {
        out << " (worst case " << r.worst_case << ": "
            << FormatDouble(r.worst_value) << " > "
            << FormatDouble(r.worst_limit) << ")";
      }
    }
    out << "\n";
    passed += r.ok();
  }
  out << "selfcheck: " << passed << "/" << results.size()
      << " properties passed\n";
  return out.str();
}

}  // namespace conic_qm
