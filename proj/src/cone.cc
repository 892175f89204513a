#include "conic_qm/cone.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "conic_qm/errors.h"

namespace conic_qm {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void CheckDimension(const ConeModel& cone, std::size_t size,
                    const char* what) {
  if (size != cone.dimension()) {
    Throw(ErrorKind::kValidation,
          std::string(what) + ": dimension " + std::to_string(size) +
              " does not match " + cone.Name() + " (dimension " +
              std::to_string(cone.dimension()) + ")");
  }
}

// Index of the symmetric coordinate for the pair j < k; the antisymmetric
// one follows it.
std::size_t PairIndex(std::size_t n, std::size_t j, std::size_t k) {
  // Pairs before row j: sum_{r<j} (n - 1 - r).
  const std::size_t before = j * (2 * n - j - 1) / 2;
  return n + 2 * (before + (k - j - 1));
}


ComplexMatrix BasisElement(std::size_t n, std::size_t index) {
  Vector coords(n * n, 0.0);
  coords[index] = 1.0;
  return HermitianFromCoords(coords, n);
}

void CheckQuantityInvariants(const ConeModel& cone, const RealMatrix& g,
                             const Vector& outcome, bool declared_skew) {
  const double g_norm = g.FrobeniusNorm();
  const RealMatrix gt = g.Transpose();
  const Vector ge = gt * std::span<const double>(cone.e());
  if (Norm2(ge) > 1e-10 * g_norm * Norm2(cone.e())) {
    Throw(ErrorKind::kValidation,
          "generator does not preserve the normalizing functional (|G^T e| = " +
              std::to_string(Norm2(ge)) + ")");
  }
  const Vector ga = gt * std::span<const double>(outcome);
  if (Norm2(ga) > 1e-10 * g_norm * Norm2(outcome)) {
    Throw(ErrorKind::kInvariance,
          "outcome functional is not invariant under the flow (|G^T a| = " +
              std::to_string(Norm2(ga)) + ")");
  }
  if (declared_skew && (g + gt).FrobeniusNorm() > 1e-10 * g_norm) {
    Throw(ErrorKind::kValidation,
          "generator declared skew-adjoint but |G + G^T| = " +
              std::to_string((g + gt).FrobeniusNorm()));
  }
}

}  // namespace

StateVector::StateVector(Vector coords) : coords_(std::move(coords)) {
  for (double v : coords_) {
    if (!std::isfinite(v)) {
      Throw(ErrorKind::kValidation, "state coordinate is not finite");
    }
  }
}

ConeModel::ConeModel(ConeKind kind, std::size_t size)
    : kind_(kind), size_(size) {
  if (size == 0) {
    Throw(ErrorKind::kValidation, "cone size must be positive");
  }
  switch (kind) {
    case ConeKind::kSimplex:
      ambient_.dimension = size;
      for (std::size_t i = 0; i < size; ++i) {
        ambient_.labels.push_back("p" + std::to_string(i));
      }
      e_.assign(size, 1.0);
      break;
    case ConeKind::kPsdHermitian:
      ambient_.dimension = size * size;
      for (std::size_t i = 0; i < size; ++i) {
        ambient_.labels.push_back("E" + std::to_string(i) +
                                  std::to_string(i));
      }
      for (std::size_t j = 0; j < size; ++j) {
        for (std::size_t k = j + 1; k < size; ++k) {
          const std::string jk = std::to_string(j) + std::to_string(k);
          ambient_.labels.push_back("S" + jk);
          ambient_.labels.push_back("A" + jk);
        }
      }
      e_.assign(size * size, 0.0);
      std::fill(e_.begin(), e_.begin() + static_cast<long>(size), 1.0);
      break;
    case ConeKind::kSpinFactor:
      ambient_.dimension = size + 1;
      for (std::size_t i = 0; i <= size; ++i) {
        ambient_.labels.push_back("x" + std::to_string(i));
      }
      e_.assign(size + 1, 0.0);
      e_[0] = 2.0;
      break;
  }
}

ConeModel ConeModel::Simplex(std::size_t d) {
  return ConeModel(ConeKind::kSimplex, d);
}
ConeModel ConeModel::PsdHermitian(std::size_t n) {
  return ConeModel(ConeKind::kPsdHermitian, n);
}
ConeModel ConeModel::SpinFactor(std::size_t n) {
  return ConeModel(ConeKind::kSpinFactor, n);
}

std::string ConeModel::Name() const {
  switch (kind_) {
    case ConeKind::kSimplex:
      return "simplex(" + std::to_string(size_) + ")";
    case ConeKind::kPsdHermitian:
      return "psd(" + std::to_string(size_) + ")";
    case ConeKind::kSpinFactor:
      return "spin(" + std::to_string(size_) + ")";
  }
  return "?";
}

ComplexMatrix HermitianFromCoords(std::span<const double> coords,
                                  std::size_t n) {
  if (coords.size() != n * n) {
    Throw(ErrorKind::kValidation, "Hermitian coordinate count mismatch");
  }
  ComplexMatrix m(n, n);
  for (std::size_t j = 0; j < n; ++j) m(j, j) = coords[j];
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      const std::size_t p = PairIndex(n, j, k);
      const Complex v(coords[p] * kInvSqrt2, coords[p + 1] * kInvSqrt2);
      m(j, k) = v;
      m(k, j) = std::conj(v);
    }
  }
  return m;
}

Vector CoordsFromHermitian(const ComplexMatrix& m) {
  if (!m.is_square()) {
    Throw(ErrorKind::kValidation, "Hermitian matrix is not square");
  }
  if (m.HermitianDefect() > 1e-12) {
    Throw(ErrorKind::kValidation, "matrix is not Hermitian");
  }
  const std::size_t n = m.rows();
  Vector coords(n * n);
  for (std::size_t j = 0; j < n; ++j) coords[j] = m(j, j).real();
  const double sqrt2 = std::sqrt(2.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      const std::size_t p = PairIndex(n, j, k);
      const Complex v = 0.5 * (m(j, k) + std::conj(m(k, j)));
      coords[p] = sqrt2 * v.real();
      coords[p + 1] = sqrt2 * v.imag();
    }
  }
  return coords;
}

double ConeMargin(const ConeModel& cone, const StateVector& x) {
  CheckDimension(cone, x.size(), "ConeMargin");
  const Vector& c = x.coords();
  switch (cone.kind()) {
    case ConeKind::kSimplex:
      return *std::min_element(c.begin(), c.end());
    case ConeKind::kPsdHermitian:
      return HermEigen(HermitianFromCoords(c, cone.size())).eigenvalues.back();
    case ConeKind::kSpinFactor:
      return c[0] - Norm2(std::span<const double>(c).subspan(1));
  }
  return 0.0;
}

bool Contains(const ConeModel& cone, const StateVector& x, double tol) {
  if (tol < 0) Throw(ErrorKind::kValidation, "negative membership tolerance");
  return ConeMargin(cone, x) >= -tol;
}

double EValue(const ConeModel& cone, const StateVector& x) {
  CheckDimension(cone, x.size(), "EValue");
  return Dot(cone.e(), x.coords());
}

StateVector Normalize(const ConeModel& cone, const StateVector& x) {
  const double ev = EValue(cone, x);
  if (!(ev > 0.0)) {
    Throw(ErrorKind::kNormalization,
          "cannot normalize: e(x) = " + std::to_string(ev) + " <= 0");
  }
  Vector out = x.coords();
  for (double& v : out) v /= ev;
  return StateVector(std::move(out));
}

StateVector RandomNormalizedState(const ConeModel& cone, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  switch (cone.kind()) {
    case ConeKind::kSimplex: {
      // Normalized exponentials are uniform on the simplex.
      std::exponential_distribution<double> expo(1.0);
      Vector c(cone.dimension());
      for (double& v : c) v = expo(rng);
      return Normalize(cone, StateVector(std::move(c)));
    }
    case ConeKind::kPsdHermitian: {
      const std::size_t n = cone.size();
      ComplexMatrix z(n, n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double re = normal(rng);
          const double im = normal(rng);
          z(i, j) = Complex(re, im);
        }
      }
      ComplexMatrix rho = z * z.Adjoint();
      rho *= 1.0 / rho.Trace().real();
      return StateVector(CoordsFromHermitian(rho));
    }
    case ConeKind::kSpinFactor: {
      const std::size_t n = cone.size();
      Vector dir(n);
      for (double& v : dir) v = normal(rng);
      const double nrm = Norm2(dir);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double radius = 0.5 * unit(rng);
      Vector c(n + 1);
      c[0] = 0.5;
      for (std::size_t i = 0; i < n; ++i) c[i + 1] = radius * dir[i] / nrm;
      return StateVector(std::move(c));
    }
  }
  return StateVector();
}

PhysicalQuantity::PhysicalQuantity(ConeModel cone, FlowGenerator generator,
                                   Vector outcome,
                                   std::optional<ComplexMatrix> observable)
    : cone_(std::move(cone)),
      generator_(std::move(generator)),
      outcome_(std::move(outcome)),
      observable_(std::move(observable)) {}

double PhysicalQuantity::OutcomeValue(const StateVector& x) const {
  CheckDimension(cone_, x.size(), "OutcomeValue");
  return Dot(outcome_, x.coords());
}

PhysicalQuantity MakeHermitianQuantity(const ComplexMatrix& a_hat) {
  if (!a_hat.is_square() || a_hat.rows() == 0) {
    Throw(ErrorKind::kValidation, "observable must be a nonempty square matrix");
  }
  if (a_hat.HermitianDefect() > 1e-12) {
    Throw(ErrorKind::kValidation, "observable is not Hermitian");
  }
  const std::size_t n = a_hat.rows();
  const std::size_t d = n * n;
  ConeModel cone = ConeModel::PsdHermitian(n);
  RealMatrix g(d, d);
  Vector outcome(d);
  const Complex minus_i(0.0, -1.0);
  for (std::size_t k = 0; k < d; ++k) {
    const ComplexMatrix b = BasisElement(n, k);
    const ComplexMatrix comm = (a_hat * b - b * a_hat) * minus_i;
    const Vector col = CoordsFromHermitian(comm);
    for (std::size_t i = 0; i < d; ++i) g(i, k) = col[i];
    outcome[k] = (a_hat * b).Trace().real();
  }
  CheckQuantityInvariants(cone, g, outcome, /*declared_skew=*/true);
  return PhysicalQuantity(std::move(cone), FlowGenerator{std::move(g), true},
                          std::move(outcome), a_hat);
}

PhysicalQuantity MakeRotationQuantity(std::size_t n, const RealMatrix& omega,
                                      double c0, double c1,
                                      std::span<const double> u) {
  if (omega.rows() != n || omega.cols() != n || u.size() != n) {
    Throw(ErrorKind::kValidation, "rotation quantity: shape mismatch for n = " +
                                      std::to_string(n));
  }
  const double scale = std::max(1.0, omega.MaxAbs());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (std::abs(omega(i, j) + omega(j, i)) > 1e-12 * scale) {
        Throw(ErrorKind::kValidation, "rotation axis-plane is not skew");
      }
    }
  }
  if (std::abs(Norm2(u) - 1.0) > 1e-10) {
    Throw(ErrorKind::kValidation, "rotation direction u is not a unit vector");
  }
  const Vector omega_u = omega * u;
  if (Norm2(omega_u) > 1e-10 * scale) {
    Throw(ErrorKind::kInvariance,
          "outcome direction u is moved by the rotation (|omega u| = " +
              std::to_string(Norm2(omega_u)) + ")");
  }
  ConeModel cone = ConeModel::SpinFactor(n);
  RealMatrix g(n + 1, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) g(i + 1, j + 1) = omega(i, j);
  }
  Vector outcome(n + 1);
  outcome[0] = c0;
  for (std::size_t i = 0; i < n; ++i) outcome[i + 1] = c1 * u[i];
  CheckQuantityInvariants(cone, g, outcome, /*declared_skew=*/true);
  return PhysicalQuantity(std::move(cone), FlowGenerator{std::move(g), true},
                          std::move(outcome), std::nullopt);
}

PhysicalQuantity MakeRawQuantity(const ConeModel& cone, RealMatrix g,
                                 Vector outcome, bool declared_skew,
                                 std::uint64_t seed) {
  if (g.rows() != cone.dimension() || g.cols() != cone.dimension()) {
    Throw(ErrorKind::kValidation, "generator shape does not match " +
                                      cone.Name());
  }
  CheckDimension(cone, outcome.size(), "outcome covector");
  CheckQuantityInvariants(cone, g, outcome, declared_skew);

  if (!g.IsZero()) {
    constexpr int kSamples = 200;
    const double t_max = std::min(2.0, MatExpTimeLimit(g));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> time(-t_max, t_max);
    for (int s = 0; s < kSamples; ++s) {
      const StateVector x = RandomNormalizedState(cone, rng());
      const double t = time(rng);
      const StateVector moved(MatExp(g, t) * std::span(x.coords()));
      if (!Contains(cone, moved, 1e-8)) {
        Throw(ErrorKind::kValidation,
              "generator does not preserve " + cone.Name() +
                  " (sampled at t = " + std::to_string(t) + ")");
      }
    }
  }

  std::optional<ComplexMatrix> observable;
  return PhysicalQuantity(cone, FlowGenerator{std::move(g), declared_skew},
                          std::move(outcome), std::move(observable));
}

StateVector Evolve(const PhysicalQuantity& q, double t, const StateVector& x,
                   int max_squarings) {
  CheckDimension(q.cone(), x.size(), "Evolve");
  if (t == 0.0 || q.g().IsZero()) return x;
  return StateVector(MatExp(q.g(), t, max_squarings) * std::span(x.coords()));
}

}  // namespace conic_qm
