#pragma once

// Seeded generators for random observables, flows and states. Shared by the
// self-check suites and the test binaries.

#include <cstdint>

#include "conic_qm/cone.h"
#include "conic_qm/linalg.h"

namespace conic_qm {

/// Gaussian Hermitian matrix (GUE up to scaling).
ComplexMatrix RandomHermitianMatrix(std::size_t n, std::uint64_t seed);

/// Unitary from Gram-Schmidt on a complex Gaussian matrix.
ComplexMatrix RandomUnitaryMatrix(std::size_t n, std::uint64_t seed);

/// U diag(values) U^H with U = RandomUnitaryMatrix(values.size(), seed).
ComplexMatrix HermitianWithSpectrum(std::span<const double> values,
                                    std::uint64_t seed);

/// Skew matrix on R^n that annihilates the unit vector `u` and rotates the
/// 2-planes of a seeded orthonormal frame of u^perp at the given rates (one
/// rate per plane; unused trailing directions stay in the kernel).
RealMatrix RotationGenerator(std::span<const double> u,
                             std::span<const double> rates,
                             std::uint64_t seed);

/// Uniformly random unit vector in R^n.
Vector RandomUnitVector(std::size_t n, std::uint64_t seed);

/// A physical quantity on `cone`:
///   psd-hermitian(n): Gaussian Hermitian observable;
///   spin-factor(n): rotation about a random axis with rates in [0.2, 3];
///   simplex(d): trivial flow with Gaussian outcome values.
PhysicalQuantity RandomQuantity(const ConeModel& cone, std::uint64_t seed);

/// Like RandomQuantity, but every nonzero flow frequency has magnitude in
/// [min_rate, max_rate]: psd observables have a two-point spectrum with gap
/// in that range, spin rotations use rates in that range.
PhysicalQuantity RandomGappedQuantity(const ConeModel& cone,
                                      std::uint64_t seed, double min_rate,
                                      double max_rate);

}  // namespace conic_qm
