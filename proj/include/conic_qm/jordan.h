#pragma once

// Euclidean Jordan algebras matching the three cone models. Elements use the
// same real coordinates as the corresponding ConeModel, so the cone of
// squares of each algebra is exactly that model's cone.

#include <span>
#include <vector>

#include "conic_qm/cone.h"
#include "conic_qm/linalg.h"

namespace conic_qm {

enum class JordanKind { kClassical, kHermitian, kSpin };

class JordanAlgebra {
 public:
  /// R^d with the componentwise product.
  static JordanAlgebra Classical(std::size_t d);
  /// n x n Hermitian matrices with X o Y = (XY + YX) / 2.
  static JordanAlgebra Hermitian(std::size_t n);
  /// Spin factor R + R^n with (x0, x) o (y0, y) = (x0 y0 + x.y, x0 y + y0 x).
  static JordanAlgebra Spin(std::size_t n);

  JordanKind kind() const { return kind_; }
  std::size_t size() const { return size_; }
  std::size_t dimension() const;
  std::size_t rank() const;
  Vector Unit() const;
  /// The model whose cone is this algebra's cone of squares.
  ConeModel MatchingCone() const;

 private:
  JordanAlgebra(JordanKind kind, std::size_t size);

  JordanKind kind_;
  std::size_t size_;
};

Vector JordanProduct(const JordanAlgebra& alg, std::span<const double> x,
                     std::span<const double> y);

/// Sum of eigenvalues: coordinate sum, matrix trace, or 2 x0.
double JordanTrace(const JordanAlgebra& alg, std::span<const double> x);

struct SpectralDecomposition {
  Vector eigenvalues;              // descending, one per rank
  std::vector<Vector> idempotents;  // primitive, trace 1
  // Set when eigenvalues coincide and the idempotent split is a convention.
  bool degenerate = false;
};

/// Spectral decomposition x = sum_i eigenvalues[i] * idempotents[i].
///
/// Hermitian clusters are detected at 1e-9 |x|; a spin element with
/// |x_vec| <= 1e-14 uses the fixed axis e_1.
SpectralDecomposition SpectralDecompose(const JordanAlgebra& alg,
                                        std::span<const double> x);

/// True iff every spectral eigenvalue is >= -1e-10.
bool SquareInCone(const JordanAlgebra& alg, std::span<const double> x);

/// (x0, x1, x2, x3) -> x0 I + x1 sx + x2 sy + x3 sz, in psd(2) coordinates.
Vector SpinToHerm2(std::span<const double> x);
Vector Herm2ToSpin(std::span<const double> h);

}  // namespace conic_qm
