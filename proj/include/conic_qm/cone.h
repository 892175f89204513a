#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conic_qm/linalg.h"

namespace conic_qm {

enum class ConeKind { kSimplex, kPsdHermitian, kSpinFactor };

struct AmbientSpace {
  std::size_t dimension = 0;
  std::vector<std::string> labels;
};

/// Coordinates of a cone element in the model's fixed real basis.
class StateVector {
 public:
  StateVector() = default;
  /// Throws a validation error on non-finite coordinates.
  explicit StateVector(Vector coords);

  const Vector& coords() const { return coords_; }
  std::size_t size() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  Vector coords_;
};

/// One of the three finite-dimensional state cones.
///
///   simplex(d)        nonnegative orthant in R^d, e = coordinate sum
///   psd-hermitian(n)  n x n PSD Hermitian matrices, d = n^2, e = trace
///   spin-factor(n)    Lorentz cone x0 >= |x|, d = n + 1, e = 2 x0
///
/// For psd-hermitian the coordinates are taken in the trace-orthonormal
/// basis: E_jj for j = 0..n-1, then for each j < k (lexicographic) the pair
/// (E_jk + E_kj)/sqrt2 and i(E_jk - E_kj)/sqrt2. All three models use the
/// Euclidean inner product on these coordinates.
class ConeModel {
 public:
  static ConeModel Simplex(std::size_t d);
  static ConeModel PsdHermitian(std::size_t n);
  static ConeModel SpinFactor(std::size_t n);

  ConeKind kind() const { return kind_; }
  // d for simplex, n for psd-hermitian and spin-factor.
  std::size_t size() const { return size_; }
  std::size_t dimension() const { return ambient_.dimension; }
  const AmbientSpace& ambient() const { return ambient_; }
  /// Normalizing functional as a covector.
  const Vector& e() const { return e_; }
  double InnerProduct(std::span<const double> x,
                      std::span<const double> y) const {
    return Dot(x, y);
  }

  /// "simplex(3)", "psd(2)", "spin(3)".
  std::string Name() const;

  friend bool operator==(const ConeModel& a, const ConeModel& b) {
    return a.kind_ == b.kind_ && a.size_ == b.size_;
  }

 private:
  ConeModel(ConeKind kind, std::size_t size);

  ConeKind kind_;
  std::size_t size_;
  AmbientSpace ambient_;
  Vector e_;
};

// Hermitian <-> trace-orthonormal coordinates for psd-hermitian(n).
ComplexMatrix HermitianFromCoords(std::span<const double> coords,
                                  std::size_t n);
/// Throws a validation error if `m` is not Hermitian within 1e-12 relative.
Vector CoordsFromHermitian(const ComplexMatrix& m);

/// Signed distance-like margin to the cone boundary: the smallest coordinate
/// (simplex), the smallest eigenvalue (psd-hermitian), or x0 - |x| (spin).
double ConeMargin(const ConeModel& cone, const StateVector& x);

/// Membership with slack `tol`: ConeMargin(cone, x) >= -tol.
bool Contains(const ConeModel& cone, const StateVector& x, double tol);

double EValue(const ConeModel& cone, const StateVector& x);

/// x / e(x). Throws a normalization error when e(x) <= 0.
StateVector Normalize(const ConeModel& cone, const StateVector& x);

/// Deterministic for a fixed seed; the result lies in the normalized slice.
StateVector RandomNormalizedState(const ConeModel& cone, std::uint64_t seed);

/// Real representation G of an infinitesimal automorphism; the flow is
/// exp(t G).
struct FlowGenerator {
  RealMatrix g;
  bool declared_skew = false;
};

/// A physical quantity: a flow generator paired with an outcome covector
/// that the flow leaves invariant.
///
/// Only constructible through the validated factories below, which enforce
/// e o G = 0 and a o G = 0 (relative tolerance 1e-10) and, for declared-skew
/// generators, G + G^T = 0 to 1e-10 relative.
class PhysicalQuantity {
 public:
  const ConeModel& cone() const { return cone_; }
  const FlowGenerator& generator() const { return generator_; }
  const RealMatrix& g() const { return generator_.g; }
  const Vector& outcome() const { return outcome_; }
  /// The observable matrix when built from a Hermitian operator.
  const std::optional<ComplexMatrix>& observable() const {
    return observable_;
  }

  double OutcomeValue(const StateVector& x) const;

  friend PhysicalQuantity MakeHermitianQuantity(const ComplexMatrix& a_hat);
  friend PhysicalQuantity MakeRotationQuantity(std::size_t n,
                                               const RealMatrix& omega,
                                               double c0, double c1,
                                               std::span<const double> u);
  friend PhysicalQuantity MakeRawQuantity(const ConeModel& cone,
                                          RealMatrix g, Vector outcome,
                                          bool declared_skew,
                                          std::uint64_t seed);

 private:
  PhysicalQuantity(ConeModel cone, FlowGenerator generator, Vector outcome,
                   std::optional<ComplexMatrix> observable);

  ConeModel cone_;
  FlowGenerator generator_;
  Vector outcome_;
  std::optional<ComplexMatrix> observable_;
};

/// Commutator quantity on psd-hermitian(n): G represents
/// K -> -i(A K - K A) and the outcome covector represents K -> Tr(A K).
PhysicalQuantity MakeHermitianQuantity(const ComplexMatrix& a_hat);

/// Rotation quantity on spin-factor(n): G acts as (x0, x) -> (0, omega x)
/// and a(x) = c0 x0 + c1 (u . x). Requires omega skew and omega u = 0
/// (invariance error otherwise).
PhysicalQuantity MakeRotationQuantity(std::size_t n, const RealMatrix& omega,
                                      double c0, double c1,
                                      std::span<const double> u);

/// Arbitrary generator. Besides the algebraic checks, cone preservation is
/// sampled on 200 (state, time) pairs drawn from `seed` at tolerance 1e-8.
PhysicalQuantity MakeRawQuantity(const ConeModel& cone, RealMatrix g,
                                 Vector outcome, bool declared_skew,
                                 std::uint64_t seed = 0);

/// exp(t G) x.
StateVector Evolve(const PhysicalQuantity& q, double t, const StateVector& x,
                   int max_squarings = kDefaultMaxSquarings);

}  // namespace conic_qm
