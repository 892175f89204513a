#include "conic_qm/linalg.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "conic_qm/errors.h"

namespace conic_qm {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

template <typename T>
void CheckFinite(const std::vector<T>& entries) {
  for (const auto& v : entries) {
    if constexpr (std::is_same_v<T, Complex>) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        Throw(ErrorKind::kValidation, "matrix entry is not finite");
      }
    } else {
      if (!std::isfinite(v)) {
        Throw(ErrorKind::kValidation, "matrix entry is not finite");
      }
    }
  }
}

// Sign convention for eigenvectors: first coordinate with |v_i| > 1e-12 is
// made positive.
void FixSign(RealMatrix& v, std::size_t col) {
  for (std::size_t i = 0; i < v.rows(); ++i) {
    if (std::abs(v(i, col)) > 1e-12) {
      if (v(i, col) < 0) {
        for (std::size_t k = 0; k < v.rows(); ++k) v(k, col) = -v(k, col);
      }
      return;
    }
  }
}

// In-place cyclic Jacobi on a symmetric matrix. On return `a` is diagonal to
// working precision and `v` holds the accumulated rotations.
void JacobiSweeps(RealMatrix& a, RealMatrix& v) {
  const std::size_t n = a.rows();
  v = RealMatrix::Identity(n);
  if (n < 2) return;
  const double scale = a.FrobeniusNorm();
  if (scale == 0.0) return;
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (std::sqrt(off) <= kEps * 1e-2 * scale) return;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Negligible against both diagonal entries after a few sweeps.
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t =
            (theta >= 0 ? 1.0 : -1.0) /
            (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
}

Complex CDot(std::span<const Complex> x, std::span<const Complex> y) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

double CNorm(std::span<const Complex> x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return std::sqrt(s);
}

void Orthogonalize(std::vector<Complex>& z,
                   const std::vector<std::vector<Complex>>& basis) {
  // Two passes of classical Gram-Schmidt.
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) {
      const Complex c = CDot(b, z);
      for (std::size_t i = 0; i < z.size(); ++i) z[i] -= c * b[i];
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// RealMatrix

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols,
                       std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    Throw(ErrorKind::kValidation,
          "matrix entry count " + std::to_string(data_.size()) +
              " does not match " + std::to_string(rows) + "x" +
              std::to_string(cols));
  }
  CheckFinite(data_);
}

RealMatrix RealMatrix::FromRows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  std::vector<double> entries;
  entries.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) {
      Throw(ErrorKind::kValidation, "ragged matrix rows");
    }
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return RealMatrix(r, c, std::move(entries));
}

RealMatrix RealMatrix::Identity(std::size_t n) {
  RealMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector RealMatrix::column(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

RealMatrix RealMatrix::Transpose() const {
  RealMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

double RealMatrix::FrobeniusNorm() const { return Norm2(data_); }

double RealMatrix::MaxAbs() const { return conic_qm::MaxAbs(data_); }

double RealMatrix::OneNorm() const {
  double best = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

bool RealMatrix::IsZero() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return v == 0.0; });
}

RealMatrix& RealMatrix::operator+=(const RealMatrix& other) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

RealMatrix& RealMatrix::operator-=(const RealMatrix& other) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

RealMatrix& RealMatrix::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

RealMatrix operator+(RealMatrix a, const RealMatrix& b) { return a += b; }
RealMatrix operator-(RealMatrix a, const RealMatrix& b) { return a -= b; }
RealMatrix operator*(RealMatrix a, double s) { return a *= s; }

RealMatrix operator*(const RealMatrix& a, const RealMatrix& b) {
  if (a.cols() != b.rows()) {
    Throw(ErrorKind::kValidation, "matrix product shape mismatch");
  }
  RealMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Vector operator*(const RealMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    Throw(ErrorKind::kValidation, "matrix-vector shape mismatch");
  }
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = Dot(a.row(i), x);
  return y;
}

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex(0.0, 0.0)) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols,
                             std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    Throw(ErrorKind::kValidation, "complex matrix entry count mismatch");
  }
  CheckFinite(data_);
}

ComplexMatrix ComplexMatrix::FromRows(
    const std::vector<std::vector<Complex>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  std::vector<Complex> entries;
  entries.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) {
      Throw(ErrorKind::kValidation, "ragged matrix rows");
    }
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return ComplexMatrix(r, c, std::move(entries));
}

ComplexMatrix ComplexMatrix::Identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::FromReal(const RealMatrix& m) {
  ComplexMatrix c(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) c(i, j) = m(i, j);
  }
  return c;
}

ComplexMatrix ComplexMatrix::Diagonal(std::span<const double> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

std::vector<Complex> ComplexMatrix::column(std::size_t j) const {
  std::vector<Complex> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

ComplexMatrix ComplexMatrix::Adjoint() const {
  ComplexMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      t(j, i) = std::conj((*this)(i, j));
    }
  }
  return t;
}

Complex ComplexMatrix::Trace() const {
  Complex s = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
  return s;
}

double ComplexMatrix::FrobeniusNorm() const { return CNorm(data_); }

double ComplexMatrix::MaxAbs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

double ComplexMatrix::HermitianDefect() const {
  if (!is_square()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = i; j < cols_; ++j) {
      worst = std::max(worst,
                       std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    }
  }
  return worst / std::max(1.0, MaxAbs());
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (auto& v : data_) v *= s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
  return a += b;
}
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
  return a -= b;
}
ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    Throw(ErrorKind::kValidation, "matrix product shape mismatch");
  }
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Vector helpers

double Dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double Norm2(std::span<const double> x) { return std::sqrt(Dot(x, x)); }

double MaxAbs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

Vector Subtract(std::span<const double> x, std::span<const double> y) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return out;
}

// ---------------------------------------------------------------------------
// Eigensolvers

EigenResult SymEigen(const RealMatrix& m) {
  if (!m.is_square()) {
    Throw(ErrorKind::kValidation, "SymEigen: matrix is not square");
  }
  const std::size_t n = m.rows();
  const double scale = std::max(1.0, m.MaxAbs());
  RealMatrix a = m;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-12 * scale) {
        Throw(ErrorKind::kValidation, "SymEigen: matrix is not symmetric");
      }
      a(i, j) = a(j, i) = 0.5 * (m(i, j) + m(j, i));
    }
  }
  RealMatrix v;
  JacobiSweeps(a, v);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x,
                                                   std::size_t y) {
    return a(x, x) > a(y, y);
  });
  EigenResult out{Vector(n), RealMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) {
      out.eigenvectors(i, k) = v(i, order[k]);
    }
    FixSign(out.eigenvectors, k);
  }
  return out;
}

HermitianEigenResult HermEigen(const ComplexMatrix& m) {
  if (!m.is_square()) {
    Throw(ErrorKind::kValidation, "HermEigen: matrix is not square");
  }
  if (m.HermitianDefect() > 1e-12) {
    Throw(ErrorKind::kValidation, "HermEigen: matrix is not Hermitian");
  }
  const std::size_t n = m.rows();
  RealMatrix embed(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // Hermitian part only, so the embedding is exactly symmetric.
      const Complex h = 0.5 * (m(i, j) + std::conj(m(j, i)));
      embed(i, j) = h.real();
      embed(i + n, j + n) = h.real();
      embed(i, j + n) = -h.imag();
      embed(i + n, j) = h.imag();
    }
  }
  const EigenResult real = SymEigen(embed);

  // The embedded spectrum is each eigenvalue of m twice. Walk the doubled
  // clusters and extract half as many orthonormal complex vectors.
  const double tol = 1e-12 * (1.0 + m.FrobeniusNorm());
  std::vector<std::vector<Complex>> basis;
  basis.reserve(n);
  std::size_t start = 0;
  while (start < 2 * n) {
    std::size_t end = start + 1;
    while (end < 2 * n &&
           real.eigenvalues[end - 1] - real.eigenvalues[end] <= tol) {
      ++end;
    }
    std::vector<std::vector<Complex>> candidates;
    for (std::size_t k = start; k < end; ++k) {
      std::vector<Complex> z(n);
      for (std::size_t i = 0; i < n; ++i) {
        z[i] = Complex(real.eigenvectors(i, k), real.eigenvectors(i + n, k));
      }
      candidates.push_back(std::move(z));
    }
    const std::size_t want = (end - start + 1) / 2;
    for (std::size_t picked = 0; picked < want && basis.size() < n;
         ++picked) {
      std::size_t best = 0;
      double best_norm = -1.0;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        Orthogonalize(candidates[c], basis);
        const double nrm = CNorm(candidates[c]);
        if (nrm > best_norm) {
          best_norm = nrm;
          best = c;
        }
      }
      std::vector<Complex> z = candidates[best];
      for (auto& v : z) v /= best_norm;
      Orthogonalize(z, basis);
      const double renorm = CNorm(z);
      for (auto& v : z) v /= renorm;
      basis.push_back(std::move(z));
      candidates.erase(candidates.begin() + static_cast<long>(best));
    }
    start = end;
  }

  std::vector<double> rayleigh(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& z = basis[k];
    Complex s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex mz = 0.0;
      for (std::size_t j = 0; j < n; ++j) mz += m(i, j) * z[j];
      s += std::conj(z[i]) * mz;
    }
    rayleigh[k] = s.real();
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) {
                     return rayleigh[x] > rayleigh[y];
                   });

  HermitianEigenResult out{Vector(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Complex> z = basis[order[k]];
    for (const auto& v : z) {
      if (std::abs(v) > 1e-12) {
        const Complex phase = std::conj(v) / std::abs(v);
        for (auto& w : z) w *= phase;
        break;
      }
    }
    out.eigenvalues[k] = rayleigh[order[k]];
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = z[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Matrix exponential

namespace {

int SquaringsFor(double norm) {
  if (norm <= 0.5) return 0;
  return static_cast<int>(std::ceil(std::log2(norm / 0.5)));
}

}  // namespace

double MatExpTimeLimit(const RealMatrix& g, int max_squarings) {
  const double norm = g.OneNorm();
  if (norm == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * std::ldexp(1.0, max_squarings) / norm;
}

RealMatrix MatExp(const RealMatrix& g, double t, int max_squarings) {
  if (!g.is_square()) {
    Throw(ErrorKind::kValidation, "MatExp: generator is not square");
  }
  if (!std::isfinite(t)) {
    Throw(ErrorKind::kValidation, "MatExp: time is not finite");
  }
  const std::size_t n = g.rows();
  if (t == 0.0 || g.IsZero()) return RealMatrix::Identity(n);

  const RealMatrix tg = g * t;
  const int s = SquaringsFor(tg.OneNorm());
  if (s > max_squarings) {
    Throw(ErrorKind::kRange,
          "MatExp: ||t G|| = " + std::to_string(tg.OneNorm()) +
              " needs " + std::to_string(s) + " squarings, budget is " +
              std::to_string(max_squarings));
  }
  const RealMatrix a = tg * std::ldexp(1.0, -s);

  RealMatrix result = RealMatrix::Identity(n);
  RealMatrix term = RealMatrix::Identity(n);
  for (int k = 1; k <= 60; ++k) {
    term = term * a;
    term *= 1.0 / k;
    result += term;
    if (term.OneNorm() <= kEps * 0.5 * result.OneNorm()) break;
  }
  for (int i = 0; i < s; ++i) result = result * result;
  return result;
}

// ---------------------------------------------------------------------------
// Gauss-Hermite

namespace {

// Orthonormal Hermite recurrence
//   h_{j+1}(x) = sqrt(2/(j+1)) x h_j(x) - sqrt(j/(j+1)) h_{j-1}(x),
// h_0 = pi^{-1/4}. Returns h_n(z) and h_n'(z) = sqrt(2n) h_{n-1}(z).
std::pair<double, double> HermiteValue(int n, double z) {
  double p1 = std::pow(M_PI, -0.25);
  double p2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double p3 = p2;
    p2 = p1;
    p1 = z * std::sqrt(2.0 / (j + 1)) * p2 -
         std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
  }
  return {p1, std::sqrt(2.0 * n) * p2};
}

}  // namespace

QuadratureRule GaussHermite(int n) {
  if (n < 1 || n > kMaxHermiteNodes) {
    Throw(ErrorKind::kValidation,
          "GaussHermite: node count " + std::to_string(n) +
              " outside [1, " + std::to_string(kMaxHermiteNodes) + "]");
  }
  // Positive roots, largest first. All zeros lie below sqrt(2n+1), so Newton
  // started above the largest remaining root converges to it monotonically;
  // already-found roots are deflated out (Maehly).
  const int positive = n / 2;
  std::vector<double> roots;
  roots.reserve(static_cast<std::size_t>(positive));
  double z = std::sqrt(2.0 * n + 1);
  for (int i = 0; i < positive; ++i) {
    if (i > 0) z = roots.back() * (1.0 - 1e-7);
    for (int iter = 0; iter < 200; ++iter) {
      const auto [p, dp] = HermiteValue(n, z);
      double deflate = 0.0;
      for (double r : roots) deflate += 1.0 / (z - r) + 1.0 / (z + r);
      const double step = 1.0 / (dp / p - deflate);
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    for (int polish = 0; polish < 2; ++polish) {
      const auto [p, dp] = HermiteValue(n, z);
      z -= p / dp;
    }
    roots.push_back(z);
  }

  const auto count = static_cast<std::size_t>(n);
  Vector x(count), w(count);
  auto weight = [n](double node) {
    const double dp = HermiteValue(n, node).second;
    return 2.0 / (dp * dp);
  };
  for (std::size_t i = 0; i < roots.size(); ++i) {
    x[i] = -roots[i];
    x[count - 1 - i] = roots[i];
    w[i] = w[count - 1 - i] = weight(roots[i]);
  }
  if (n % 2 == 1) {
    x[count / 2] = 0.0;
    w[count / 2] = weight(0.0);
  }
  return QuadratureRule{std::move(x), std::move(w)};
}

}  // namespace conic_qm
