#include "conic_qm/measurement.h"

#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include "conic_qm/errors.h"
#include "conic_qm/jordan.h"
#include "conic_qm/sampling.h"
#include "test_util.h"

namespace conic_qm {
namespace {

using testing::MaxDiff;

ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kInvariantFailure;
}

ComplexMatrix SigmaZ() { return ComplexMatrix::Diagonal(Vector{1, -1}); }
ComplexMatrix SigmaX() { return ComplexMatrix::FromRows({{0, 1}, {1, 0}}); }
ComplexMatrix Plus() {
  return ComplexMatrix::FromRows({{0.5, 0.5}, {0.5, 0.5}});
}

StateVector Coords(const ComplexMatrix& m) {
  return StateVector(CoordsFromHermitian(m));
}

RealMatrix RotationAboutE1() {
  return RealMatrix::FromRows({{0, 0, 0}, {0, 0, -1}, {0, 1, 0}});
}

// a(x) = x0 + x . e1, flow rotates about e1.
PhysicalQuantity SpinExampleQuantity() {
  return MakeRotationQuantity(3, RotationAboutE1(), 1, 1, Vector{1, 0, 0});
}

std::vector<ConeModel> Cones() {
  return {ConeModel::Simplex(4), ConeModel::PsdHermitian(2),
          ConeModel::PsdHermitian(3), ConeModel::SpinFactor(3),
          ConeModel::SpinFactor(5)};
}

void ExpectDistribution(const OutcomeDistribution& d,
                        const std::vector<std::pair<double, double>>& want,
                        double tol) {
  ASSERT_EQ(d.entries.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_NEAR(d.entries[i].value, want[i].first, tol) << i;
    EXPECT_NEAR(d.entries[i].probability, want[i].second, tol) << i;
  }
}

void ExpectSameDistribution(const OutcomeDistribution& a,
                            const OutcomeDistribution& b, double tol) {
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    EXPECT_NEAR(a.entries[i].value, b.entries[i].value, tol) << i;
    EXPECT_NEAR(a.entries[i].probability, b.entries[i].probability, tol) << i;
  }
}

TEST(QSpectralTest, Examples) {
  const PhysicalQuantity identity =
      MakeHermitianQuantity(ComplexMatrix::Identity(2));
  const StateVector rho = Coords(Plus());
  EXPECT_EQ(QSpectral(identity, rho), rho);

  const PhysicalQuantity dephasing = MakeHermitianQuantity(SigmaZ());
  EXPECT_LE(MaxDiff(QSpectral(dephasing, rho).coords(),
                    Coords(ComplexMatrix::Diagonal(Vector{0.5, 0.5})).coords()),
            1e-15);

  EXPECT_LE(MaxDiff(QSpectral(SpinExampleQuantity(),
                              StateVector({0.5, 0.1, 0.2, 0.3}))
                        .coords(),
                    Vector{0.5, 0.1, 0, 0}),
            1e-15);
}

TEST(QSpectralTest, RequiresSkewGenerator) {
  const ConeModel simplex = ConeModel::Simplex(2);
  const PhysicalQuantity q =
      MakeRawQuantity(simplex, RealMatrix(2, 2), Vector{1, 2}, false);
  EXPECT_EQ(KindOf([&] { QSpectral(q, StateVector({0.5, 0.5})); }),
            ErrorKind::kUnsupported);
  EXPECT_EQ(QNumeric(q, StateVector({0.5, 0.5}), 0.1).coords(),
            (Vector{0.5, 0.5}));
}

TEST(QSpectralTest, BlockDiagonalForHermitianQuantities) {
  // Eigenbasis of A_hat with spectrum {2, 2, -1}: Q keeps the 2x2 block and
  // the 1x1 block and zeroes the coupling.
  const ComplexMatrix u = testing::RandomUnitary(3, 17);
  const ComplexMatrix a_hat =
      u * ComplexMatrix::Diagonal(Vector{2, 2, -1}) * u.Adjoint();
  const PhysicalQuantity q = MakeHermitianQuantity(a_hat);
  const StateVector rho = RandomNormalizedState(ConeModel::PsdHermitian(3), 3);
  const ComplexMatrix projected =
      HermitianFromCoords(QSpectral(q, rho).coords(), 3);
  ComplexMatrix expected =
      u.Adjoint() * HermitianFromCoords(rho.coords(), 3) * u;
  for (int i : {0, 1}) {
    expected(i, 2) = 0.0;
    expected(2, i) = 0.0;
  }
  expected = u * expected * u.Adjoint();
  EXPECT_LE((projected - expected).MaxAbs(), 1e-12);
}

TEST(QNumericTest, Examples) {
  const PhysicalQuantity identity =
      MakeHermitianQuantity(ComplexMatrix::Identity(2));
  const StateVector rho = Coords(Plus());
  for (double eps : {1.0, 0.01}) EXPECT_EQ(QNumeric(identity, rho, eps), rho);

  const PhysicalQuantity dephasing = MakeHermitianQuantity(SigmaZ());
  for (int nodes : {32, 64, 128}) {
    const ComplexMatrix m =
        HermitianFromCoords(QNumeric(dephasing, rho, 0.5, nodes).coords(), 2);
    EXPECT_NEAR(std::abs(m(0, 1)), 0.5 * std::exp(-2.0), 1e-12) << nodes;
    EXPECT_NEAR(m(0, 0).real(), 0.5, 1e-14);
  }
  const ComplexMatrix sharp =
      HermitianFromCoords(QNumeric(dephasing, rho, 0.05).coords(), 2);
  EXPECT_LE(std::abs(sharp(0, 1)), 1.1e-9);
}

TEST(QNumericTest, ClosedFormDamping) {
  // Off-diagonal factor e^{-omega^2 / (4 eps)} with omega = 2.
  const PhysicalQuantity dephasing = MakeHermitianQuantity(SigmaZ());
  for (double eps : {0.5, 0.1}) {
    const ComplexMatrix m = HermitianFromCoords(
        QNumeric(dephasing, Coords(Plus()), eps).coords(), 2);
    EXPECT_NEAR(2.0 * std::abs(m(0, 1)), std::exp(-1.0 / eps), 1e-8) << eps;
  }
}

TEST(QNumericTest, Errors) {
  const PhysicalQuantity dephasing = MakeHermitianQuantity(SigmaZ());
  const StateVector rho = Coords(Plus());
  EXPECT_EQ(KindOf([&] { QNumeric(dephasing, rho, 0.0); }),
            ErrorKind::kValidation);
  EXPECT_EQ(KindOf([&] { QNumeric(dephasing, rho, 0.1, 0); }),
            ErrorKind::kValidation);
  EXPECT_EQ(KindOf([&] { QNumeric(dephasing, rho, 1e-30, 64, 4); }),
            ErrorKind::kRange);
}

TEST(ResolvingNodeCountTest, Examples) {
  const PhysicalQuantity identity =
      MakeHermitianQuantity(ComplexMatrix::Identity(2));
  EXPECT_EQ(MaxFlowFrequency(identity), 0.0);
  EXPECT_EQ(ResolvingNodeCount(identity, 1e-6), 64);

  const PhysicalQuantity dephasing = MakeHermitianQuantity(SigmaZ());
  EXPECT_NEAR(MaxFlowFrequency(dephasing), 2.0, 1e-14);
  EXPECT_EQ(ResolvingNodeCount(dephasing, 0.5), 64);
  EXPECT_EQ(ResolvingNodeCount(dephasing, 0.01), 157);
  EXPECT_EQ(KindOf([&] { ResolvingNodeCount(dephasing, 1e-3); }),
            ErrorKind::kRange);

  // The chosen rule reproduces the closed-form damping.
  for (double eps : {0.1, 0.02, 0.01}) {
    const int nodes = ResolvingNodeCount(dephasing, eps);
    const ComplexMatrix m = HermitianFromCoords(
        QNumeric(dephasing, Coords(Plus()), eps, nodes).coords(), 2);
    EXPECT_NEAR(2.0 * std::abs(m(0, 1)), std::exp(-1.0 / eps), 1e-12) << eps;
  }
}

TEST(ExtremeDecomposeTest, Examples) {
  const PhysicalQuantity dephasing = MakeHermitianQuantity(SigmaZ());
  const ExtremeDecomposition psd = ExtremeDecompose(
      dephasing, Coords(ComplexMatrix::Diagonal(Vector{0.3, 0.7})));
  ASSERT_EQ(psd.components.size(), 2u);
  // Observable eigenvalue order: +1 (E00) first, then -1 (E11).
  EXPECT_NEAR(psd.components[0].weight, 0.3, 1e-15);
  EXPECT_LE(MaxDiff(psd.components[0].state.coords(), Vector{1, 0, 0, 0}),
            1e-15);
  EXPECT_NEAR(psd.components[1].weight, 0.7, 1e-15);
  EXPECT_LE(MaxDiff(psd.components[1].state.coords(), Vector{0, 1, 0, 0}),
            1e-15);

  const ExtremeDecomposition spin =
      ExtremeDecompose(SpinExampleQuantity(), StateVector({0.5, 0.3, 0, 0}));
  ASSERT_EQ(spin.components.size(), 2u);
  EXPECT_NEAR(spin.components[0].weight, 0.8, 1e-15);
  EXPECT_EQ(spin.components[0].state.coords(), (Vector{0.5, 0.5, 0, 0}));
  EXPECT_NEAR(spin.components[1].weight, 0.2, 1e-15);
  EXPECT_EQ(spin.components[1].state.coords(), (Vector{0.5, -0.5, 0, 0}));

  const ConeModel simplex = ConeModel::Simplex(4);
  const PhysicalQuantity classical =
      MakeRawQuantity(simplex, RealMatrix(4, 4), Vector{1, 2, 3, 4}, true);
  const ExtremeDecomposition cl =
      ExtremeDecompose(classical, StateVector({0.1, 0.2, 0.3, 0.4}));
  ASSERT_EQ(cl.components.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(cl.components[i].weight, 0.1 * static_cast<double>(i + 1),
                1e-15);
    EXPECT_EQ(cl.components[i].state[i], 1.0);
  }
}

TEST(ExtremeDecomposeTest, Errors) {
  const PhysicalQuantity dephasing = MakeHermitianQuantity(SigmaZ());
  EXPECT_EQ(KindOf([&] { ExtremeDecompose(dephasing, Coords(Plus())); }),
            ErrorKind::kPrecondition);
  EXPECT_EQ(KindOf([&] {
              ExtremeDecompose(dephasing, Coords(ComplexMatrix::Diagonal(
                                              Vector{1.2, -0.2})));
            }),
            ErrorKind::kValidation);
  EXPECT_EQ(KindOf([&] {
              ExtremeDecompose(dephasing, Coords(ComplexMatrix::Diagonal(
                                              Vector{0.3, 0.6})));
            }),
            ErrorKind::kNormalization);
}

TEST(ExtremeDecomposeTest, ReconstructsAndFixes) {
  for (const ConeModel& cone : Cones()) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const PhysicalQuantity q = RandomQuantity(cone, seed);
      const StateVector y = QSpectral(q, RandomNormalizedState(cone, seed));
      const ExtremeDecomposition d = ExtremeDecompose(q, y);
      Vector rec(y.size(), 0.0);
      for (const auto& c : d.components) {
        EXPECT_GE(c.weight, 0.0);
        EXPECT_NEAR(EValue(cone, c.state), 1.0, 1e-12);
        EXPECT_TRUE(Contains(cone, c.state, 1e-10));
        EXPECT_LE(Norm2(q.g() * std::span(c.state.coords())), 1e-8);
        for (std::size_t k = 0; k < rec.size(); ++k) {
          rec[k] += c.weight * c.state[k];
        }
      }
      EXPECT_LE(MaxDiff(rec, y.coords()), 1e-9) << cone.Name() << " " << seed;
    }
  }
}

TEST(ExtremeDecomposeTest, ComponentsAreExtreme) {
  // psd: rank one (pure). spin: on the boundary x0 = |x|.
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const ConeModel psd = ConeModel::PsdHermitian(3);
    const PhysicalQuantity q = RandomQuantity(psd, seed);
    const StateVector y = QSpectral(q, RandomNormalizedState(psd, seed));
    for (const auto& c : ExtremeDecompose(q, y).components) {
      const ComplexMatrix m = HermitianFromCoords(c.state.coords(), 3);
      EXPECT_LE(((m * m) - m).MaxAbs(), 1e-12);
    }
    const ConeModel spin = ConeModel::SpinFactor(4);
    const PhysicalQuantity r = RandomQuantity(spin, seed);
    const StateVector z = QSpectral(r, RandomNormalizedState(spin, seed));
    for (const auto& c : ExtremeDecompose(r, z).components) {
      EXPECT_NEAR(ConeMargin(spin, c.state), 0.0, 1e-14);
    }
  }
}

TEST(OutcomeDistributionTest, Examples) {
  const PhysicalQuantity dephasing = MakeHermitianQuantity(SigmaZ());
  ExpectDistribution(
      ComputeOutcomeDistribution(
          dephasing, Coords(ComplexMatrix::Diagonal(Vector{0.3, 0.7}))),
      {{1, 0.3}, {-1, 0.7}}, 1e-14);
  ExpectDistribution(ComputeOutcomeDistribution(dephasing, Coords(Plus())),
                     {{1, 0.5}, {-1, 0.5}}, 1e-14);
  ExpectDistribution(ComputeOutcomeDistribution(
                         SpinExampleQuantity(), StateVector({0.5, 0.3, 0, 0})),
                     {{1, 0.8}, {0, 0.2}}, 1e-14);

  const PhysicalQuantity identity =
      MakeHermitianQuantity(ComplexMatrix::Identity(2));
  const OutcomeDistribution trivial = ComputeOutcomeDistribution(
      identity, RandomNormalizedState(ConeModel::PsdHermitian(2), 5));
  ExpectDistribution(trivial, {{1, 1}}, 1e-14);
}

TEST(OutcomeDistributionTest, NumericRouteAgrees) {
  const PhysicalQuantity dephasing = MakeHermitianQuantity(SigmaZ());
  DistributionOptions numeric;
  numeric.route = Route::kNumeric;
  // omega = 2 at epsilon = 0.01 is beyond the default 64-node rule.
  numeric.nodes = ResolvingNodeCount(dephasing, numeric.epsilon);
  EXPECT_GT(numeric.nodes, 128);
  ExpectDistribution(
      ComputeOutcomeDistribution(dephasing, Coords(Plus()), numeric),
      {{1, 0.5}, {-1, 0.5}}, 1e-12);
  ExpectDistribution(ComputeOutcomeDistribution(SpinExampleQuantity(),
                                                StateVector({0.5, 0.3, 0, 0}),
                                                numeric),
                     {{1, 0.8}, {0, 0.2}}, 1e-12);
}

TEST(OutcomeDistributionTest, RejectsBadStates) {
  const PhysicalQuantity dephasing = MakeHermitianQuantity(SigmaZ());
  EXPECT_EQ(KindOf([&] {
              ComputeOutcomeDistribution(
                  dephasing, Coords(ComplexMatrix::Diagonal(Vector{0.4, 0.5})));
            }),
            ErrorKind::kNormalization);
  EXPECT_EQ(KindOf([&] {
              ComputeOutcomeDistribution(
                  dephasing, Coords(ComplexMatrix::FromRows({{0.5, 0.9},
                                                             {0.9, 0.5}})));
            }),
            ErrorKind::kValidation);
}

TEST(OutcomeDistributionTest, ProbabilityStructure) {
  for (const ConeModel& cone : Cones()) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const PhysicalQuantity q = RandomQuantity(cone, seed);
      const StateVector x = RandomNormalizedState(cone, seed + 7);
      const OutcomeDistribution d = ComputeOutcomeDistribution(q, x);
      double total = 0.0;
      double mean = 0.0;
      for (std::size_t i = 0; i < d.entries.size(); ++i) {
        EXPECT_GE(d.entries[i].probability, 0.0);
        if (i > 0) {
          EXPECT_GT(d.entries[i - 1].value, d.entries[i].value);
        }
        total += d.entries[i].probability;
        mean += d.entries[i].probability * d.entries[i].value;
      }
      EXPECT_NEAR(total, 1.0, 1e-9);
      EXPECT_NEAR(mean, q.OutcomeValue(x), 1e-9) << cone.Name() << seed;
    }
  }
}

TEST(AggregateOutcomesTest, MergesNeighbours) {
  std::vector<Outcome> raw = {{1.0, 0.2, {}},
                              {-1.0, 0.3, {}},
                              {1.0 + 1e-10, 0.2, {}},
                              {0.5, 0.3, {}}};
  const std::vector<Outcome> merged = AggregateOutcomes(raw, 1e-8);
  ASSERT_EQ(merged.size(), 3u);
  EXPECT_NEAR(merged[0].value, 1.0 + 0.5e-10, 1e-15);
  EXPECT_NEAR(merged[0].probability, 0.4, 1e-15);
  EXPECT_EQ(merged[1].value, 0.5);
  EXPECT_EQ(merged[2].value, -1.0);
}

TEST(BornOracleTest, Examples) {
  ExpectDistribution(
      BornOracle(SigmaZ(), ComplexMatrix::Diagonal(Vector{0.3, 0.7})),
      {{1, 0.3}, {-1, 0.7}}, 1e-15);
  ComplexMatrix half = ComplexMatrix::Identity(2);
  half *= 0.5;
  ExpectDistribution(BornOracle(SigmaX(), half), {{1, 0.5}, {-1, 0.5}},
                     1e-14);
}

TEST(BornOracleTest, RejectsInvalidDensity) {
  EXPECT_EQ(KindOf([] {
              BornOracle(SigmaZ(), ComplexMatrix::Diagonal(Vector{0.5, 0.4}));
            }),
            ErrorKind::kValidation);
  EXPECT_EQ(KindOf([] {
              BornOracle(SigmaZ(), ComplexMatrix::Diagonal(Vector{1.5, -0.5}));
            }),
            ErrorKind::kValidation);
  EXPECT_EQ(KindOf([] {
              BornOracle(SigmaZ(), ComplexMatrix::FromRows({{0.5, 0.1},
                                                            {0.2, 0.5}}));
            }),
            ErrorKind::kValidation);
}

TEST(BornOracleTest, Seed7FourByFour) {
  const ComplexMatrix a_hat = RandomHermitianMatrix(4, 7);
  const ConeModel cone = ConeModel::PsdHermitian(4);
  const StateVector rho = RandomNormalizedState(cone, 7);
  ExpectSameDistribution(
      ComputeOutcomeDistribution(MakeHermitianQuantity(a_hat), rho),
      BornOracle(a_hat, HermitianFromCoords(rho.coords(), 4)), 1e-8);
}

TEST(BornEquivalenceTest, RandomPairs) {
  for (std::size_t n = 2; n <= 6; ++n) {
    const ConeModel cone = ConeModel::PsdHermitian(n);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const ComplexMatrix a_hat = RandomHermitianMatrix(n, 1000 * n + seed);
      const StateVector rho = RandomNormalizedState(cone, 5000 * n + seed);
      ExpectSameDistribution(
          ComputeOutcomeDistribution(MakeHermitianQuantity(a_hat), rho),
          BornOracle(a_hat, HermitianFromCoords(rho.coords(), n)), 1e-8);
    }
  }
}

TEST(BornEquivalenceTest, DegenerateObservables) {
  // Sigma_x with the maximally mixed state: decomposition is conventional
  // but the distribution is not.
  ComplexMatrix half = ComplexMatrix::Identity(2);
  half *= 0.5;
  ExpectDistribution(
      ComputeOutcomeDistribution(MakeHermitianQuantity(SigmaX()),
                                 Coords(half)),
      {{1, 0.5}, {-1, 0.5}}, 1e-12);

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const ComplexMatrix a_hat =
        HermitianWithSpectrum(Vector{3, 3, 0.5, -1, -1}, seed);
    const StateVector rho =
        RandomNormalizedState(ConeModel::PsdHermitian(5), seed + 99);
    const OutcomeDistribution d =
        ComputeOutcomeDistribution(MakeHermitianQuantity(a_hat), rho);
    ASSERT_EQ(d.entries.size(), 3u);
    ExpectSameDistribution(d, BornOracle(a_hat, HermitianFromCoords(
                                                    rho.coords(), 5)),
                           1e-8);
  }
}

TEST(ProjectorLawsTest, AllCones) {
  for (const ConeModel& cone : Cones()) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const PhysicalQuantity q = RandomQuantity(cone, seed);
      const StateVector x = RandomNormalizedState(cone, seed + 31);
      const DecoherenceProjector proj(q);
      const StateVector qx = proj.Apply(x);
      EXPECT_LE(MaxDiff(proj.Apply(qx).coords(), qx.coords()), 1e-10);
      EXPECT_NEAR(EValue(cone, qx), 1.0, 1e-10);
      EXPECT_GE(ConeMargin(cone, qx), -1e-8);
      EXPECT_LE(Norm2(q.g() * std::span(qx.coords())),
                1e-10 * std::max(1.0, q.g().FrobeniusNorm()));
      // Flow-commuting for |t| |G| <= 10.
      const double t = 10.0 / std::max(1.0, q.g().FrobeniusNorm());
      for (double s : {-t, 0.3 * t, t}) {
        EXPECT_LE(MaxDiff(proj.Apply(Evolve(q, s, x)).coords(), qx.coords()),
                  1e-9);
      }
      // Stationary states are fixed.
      EXPECT_LE(MaxDiff(QSpectral(q, qx).coords(), qx.coords()), 1e-10);
    }
  }
}

TEST(ConvergenceTest, GappedGeneratorsConverge) {
  const std::vector<double> eps = {1, 0.3, 0.1, 0.03, 0.01};
  int scenarios = 0;
  for (const ConeModel& cone :
       {ConeModel::PsdHermitian(2), ConeModel::PsdHermitian(3),
        ConeModel::SpinFactor(3), ConeModel::SpinFactor(4)}) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      const PhysicalQuantity q = RandomGappedQuantity(cone, seed, 1.0, 1.4);
      const StateVector x = RandomNormalizedState(cone, seed + 3);
      const StateVector exact = QSpectral(q, x);
      double previous = INFINITY;
      for (double e : eps) {
        const double err =
            Norm2(Subtract(QNumeric(q, x, e).coords(), exact.coords()));
        EXPECT_LT(err, previous) << cone.Name() << " " << seed << " " << e;
        previous = err;
      }
      EXPECT_LE(previous, 1e-6) << cone.Name() << " " << seed;
      ++scenarios;
    }
  }
  EXPECT_GE(scenarios, 50);
}

TEST(IsomorphismTransportTest, SpinMatchesHermitian) {
  // Rotation rate kappa about u with a(x) = c0 x0 + c1 u.x corresponds to
  // A_hat = (c0 I + c1 u.sigma) / 2, whose commutator flow rotates at c1.
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Vector u = RandomUnitVector(3, rng());
    const double c0 = normal(rng);
    const double c1 = normal(rng);
    const RealMatrix omega = RealMatrix::FromRows(
        {{0, -c1 * u[2], c1 * u[1]},
         {c1 * u[2], 0, -c1 * u[0]},
         {-c1 * u[1], c1 * u[0], 0}});
    const PhysicalQuantity spin_q = MakeRotationQuantity(3, omega, c0, c1, u);

    const Vector a_spin{c0, c1 * u[0], c1 * u[1], c1 * u[2]};
    const ComplexMatrix a_hat = HermitianFromCoords(SpinToHerm2(a_spin), 2);
    ComplexMatrix a_half = a_hat;
    a_half *= 0.5;
    const PhysicalQuantity herm_q = MakeHermitianQuantity(a_half);

    const StateVector x =
        RandomNormalizedState(ConeModel::SpinFactor(3), rng());
    const StateVector rho(SpinToHerm2(x.coords()));
    EXPECT_NEAR(spin_q.OutcomeValue(x), herm_q.OutcomeValue(rho), 1e-12);

    // The flows are conjugate through the isomorphism.
    const StateVector moved = Evolve(spin_q, 0.7, x);
    EXPECT_LE(MaxDiff(SpinToHerm2(moved.coords()),
                      Evolve(herm_q, 0.7, rho).coords()),
              1e-10);

    ExpectSameDistribution(ComputeOutcomeDistribution(spin_q, x),
                           ComputeOutcomeDistribution(herm_q, rho), 1e-10);
  }
}

TEST(ClassicalLimitTest, ProbabilitiesAreCoordinates) {
  for (std::size_t d = 1; d <= 10; ++d) {
    const ConeModel cone = ConeModel::Simplex(d);
    Vector values(d);
    for (std::size_t i = 0; i < d; ++i) values[i] = static_cast<double>(d - i);
    const PhysicalQuantity q =
        MakeRawQuantity(cone, RealMatrix(d, d), values, true);
    const StateVector x = RandomNormalizedState(cone, d);
    const OutcomeDistribution dist = ComputeOutcomeDistribution(q, x);
    ASSERT_EQ(dist.entries.size(), d);
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_EQ(dist.entries[i].value, values[i]);
      EXPECT_NEAR(dist.entries[i].probability, x[i], 1e-12);
    }
  }
}

}  // namespace
}  // namespace conic_qm
