#pragma once

// Dense kernels sized for the desk-scale models in this library: ambient
// dimensions up to 64 and density matrices up to 8x8.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace conic_qm {

using Complex = std::complex<double>;
using Vector = std::vector<double>;

/// Row-major dense real matrix with finite entries.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols);
  /// Throws a validation error if `entries.size() != rows * cols` or any
  /// entry is not finite.
  RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  /// Nested-rows constructor; all rows must have equal length.
  static RealMatrix FromRows(const std::vector<std::vector<double>>& rows);

  static RealMatrix Identity(std::size_t n);
  static RealMatrix Zero(std::size_t rows, std::size_t cols) {
    return RealMatrix(rows, cols);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  std::span<const double> data() const { return data_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  Vector column(std::size_t j) const;

  RealMatrix Transpose() const;
  double FrobeniusNorm() const;
  double MaxAbs() const;
  // Maximum absolute column sum.
  double OneNorm() const;
  bool IsZero() const;

  RealMatrix& operator+=(const RealMatrix& other);
  RealMatrix& operator-=(const RealMatrix& other);
  RealMatrix& operator*=(double s);

  friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

RealMatrix operator+(RealMatrix a, const RealMatrix& b);
RealMatrix operator-(RealMatrix a, const RealMatrix& b);
RealMatrix operator*(RealMatrix a, double s);
RealMatrix operator*(const RealMatrix& a, const RealMatrix& b);
Vector operator*(const RealMatrix& a, std::span<const double> x);

/// Row-major dense complex matrix with finite entries.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols,
                std::vector<Complex> entries);
  static ComplexMatrix FromRows(const std::vector<std::vector<Complex>>& rows);
  static ComplexMatrix Identity(std::size_t n);
  static ComplexMatrix FromReal(const RealMatrix& m);
  static ComplexMatrix Diagonal(std::span<const double> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  Complex operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  std::span<const Complex> data() const { return data_; }
  std::vector<Complex> column(std::size_t j) const;

  ComplexMatrix Adjoint() const;
  Complex Trace() const;
  double FrobeniusNorm() const;
  double MaxAbs() const;
  // max |M - M^H| over entries, relative to max(1, max |M|).
  double HermitianDefect() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(ComplexMatrix a, Complex s);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

double Dot(std::span<const double> x, std::span<const double> y);
double Norm2(std::span<const double> x);
double MaxAbs(std::span<const double> x);
Vector Subtract(std::span<const double> x, std::span<const double> y);

/// Eigenvalues sorted descending; eigenvectors are the matching columns.
struct EigenResult {
  Vector eigenvalues;
  RealMatrix eigenvectors;
};

struct HermitianEigenResult {
  Vector eigenvalues;
  ComplexMatrix eigenvectors;
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Eigenvalues come out in descending order (stable with respect to the
/// rotation order for exact ties) and each eigenvector is signed so that its
/// first coordinate with magnitude above 1e-12 is positive. Throws a
/// validation error for non-square input or asymmetry above 1e-12 relative.
EigenResult SymEigen(const RealMatrix& m);

/// Hermitian eigendecomposition through the 2n x 2n real embedding
/// [[Re M, -Im M], [Im M, Re M]]. Every eigenvalue of M appears twice in the
/// embedding; each doubled cluster is reduced back to an orthonormal complex
/// basis by pivoted Gram-Schmidt. Eigenvectors are phased so their first
/// non-negligible coordinate is real and positive.
HermitianEigenResult HermEigen(const ComplexMatrix& m);

inline constexpr int kDefaultMaxSquarings = 32;

/// exp(t * g) by Taylor series with scaling and squaring, the scaling chosen
/// so that ||t g / 2^s||_1 <= 0.5. Throws a range error when s would exceed
/// `max_squarings`.
RealMatrix MatExp(const RealMatrix& g, double t,
                  int max_squarings = kDefaultMaxSquarings);

/// Largest |t| for which MatExp(g, t) stays inside the squaring budget.
double MatExpTimeLimit(const RealMatrix& g,
                       int max_squarings = kDefaultMaxSquarings);

/// Gauss-Hermite rule for the weight exp(-x^2); nodes ascending.
struct QuadratureRule {
  Vector nodes;
  Vector weights;
};

inline constexpr int kMaxHermiteNodes = 256;

QuadratureRule GaussHermite(int n);

}  // namespace conic_qm
