#include "conic_qm/jordan.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "conic_qm/errors.h"

namespace conic_qm {
namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

void CheckElement(const JordanAlgebra& alg, std::span<const double> x) {
  if (x.size() != alg.dimension()) {
    Throw(ErrorKind::kValidation,
          "Jordan element has dimension " + std::to_string(x.size()) +
              ", algebra expects " + std::to_string(alg.dimension()));
  }
}

}  // namespace

JordanAlgebra::JordanAlgebra(JordanKind kind, std::size_t size)
    : kind_(kind), size_(size) {
  if (size == 0) Throw(ErrorKind::kValidation, "algebra size must be positive");
}

JordanAlgebra JordanAlgebra::Classical(std::size_t d) {
  return JordanAlgebra(JordanKind::kClassical, d);
}
JordanAlgebra JordanAlgebra::Hermitian(std::size_t n) {
  return JordanAlgebra(JordanKind::kHermitian, n);
}
JordanAlgebra JordanAlgebra::Spin(std::size_t n) {
  return JordanAlgebra(JordanKind::kSpin, n);
}

std::size_t JordanAlgebra::dimension() const {
  switch (kind_) {
    case JordanKind::kClassical:
      return size_;
    case JordanKind::kHermitian:
      return size_ * size_;
    case JordanKind::kSpin:
      return size_ + 1;
  }
  return 0;
}

std::size_t JordanAlgebra::rank() const {
  return kind_ == JordanKind::kSpin ? 2 : size_;
}

Vector JordanAlgebra::Unit() const {
  Vector u(dimension(), 0.0);
  switch (kind_) {
    case JordanKind::kClassical:
      std::fill(u.begin(), u.end(), 1.0);
      break;
    case JordanKind::kHermitian:
      std::fill(u.begin(), u.begin() + static_cast<long>(size_), 1.0);
      break;
    case JordanKind::kSpin:
      u[0] = 1.0;
      break;
  }
  return u;
}

ConeModel JordanAlgebra::MatchingCone() const {
  switch (kind_) {
    case JordanKind::kClassical:
      return ConeModel::Simplex(size_);
    case JordanKind::kHermitian:
      return ConeModel::PsdHermitian(size_);
    case JordanKind::kSpin:
      break;
  }
  return ConeModel::SpinFactor(size_);
}

Vector JordanProduct(const JordanAlgebra& alg, std::span<const double> x,
                     std::span<const double> y) {
  CheckElement(alg, x);
  CheckElement(alg, y);
  switch (alg.kind()) {
    case JordanKind::kClassical: {
      Vector out(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
      return out;
    }
    case JordanKind::kHermitian: {
      const ComplexMatrix a = HermitianFromCoords(x, alg.size());
      const ComplexMatrix b = HermitianFromCoords(y, alg.size());
      ComplexMatrix sym = a * b + b * a;
      sym *= 0.5;
      return CoordsFromHermitian(sym);
    }
    case JordanKind::kSpin: {
      Vector out(x.size());
      out[0] = x[0] * y[0] + Dot(x.subspan(1), y.subspan(1));
      for (std::size_t i = 1; i < x.size(); ++i) {
        out[i] = x[0] * y[i] + y[0] * x[i];
      }
      return out;
    }
  }
  return {};
}

double JordanTrace(const JordanAlgebra& alg, std::span<const double> x) {
  CheckElement(alg, x);
  switch (alg.kind()) {
    case JordanKind::kClassical:
      return std::accumulate(x.begin(), x.end(), 0.0);
    case JordanKind::kHermitian:
      return std::accumulate(x.begin(), x.begin() + static_cast<long>(alg.size()),
                             0.0);
    case JordanKind::kSpin:
      return 2.0 * x[0];
  }
  return 0.0;
}

SpectralDecomposition SpectralDecompose(const JordanAlgebra& alg,
                                        std::span<const double> x) {
  CheckElement(alg, x);
  SpectralDecomposition out;
  switch (alg.kind()) {
    case JordanKind::kClassical: {
      std::vector<std::size_t> order(x.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
      for (std::size_t k = 0; k < order.size(); ++k) {
        out.eigenvalues.push_back(x[order[k]]);
        Vector c(x.size(), 0.0);
        c[order[k]] = 1.0;
        out.idempotents.push_back(std::move(c));
        if (k > 0 && out.eigenvalues[k - 1] == out.eigenvalues[k]) {
          out.degenerate = true;
        }
      }
      return out;
    }
    case JordanKind::kHermitian: {
      const std::size_t n = alg.size();
      const HermitianEigenResult eig = HermEigen(HermitianFromCoords(x, n));
      const double tol = 1e-9 * Norm2(x);
      for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues.push_back(eig.eigenvalues[k]);
        ComplexMatrix p(n, n);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            p(i, j) = eig.eigenvectors(i, k) * std::conj(eig.eigenvectors(j, k));
          }
        }
        out.idempotents.push_back(CoordsFromHermitian(p));
        if (k > 0 && eig.eigenvalues[k - 1] - eig.eigenvalues[k] <= tol) {
          out.degenerate = true;
        }
      }
      return out;
    }
    case JordanKind::kSpin: {
      const std::size_t n = alg.size();
      const double r = Norm2(x.subspan(1));
      Vector axis(n, 0.0);
      if (r <= 1e-14) {
        axis[0] = 1.0;
        out.degenerate = true;
      } else {
        for (std::size_t i = 0; i < n; ++i) axis[i] = x[i + 1] / r;
      }
      out.eigenvalues = {x[0] + r, x[0] - r};
      for (double sign : {1.0, -1.0}) {
        Vector c(n + 1);
        c[0] = 0.5;
        for (std::size_t i = 0; i < n; ++i) c[i + 1] = 0.5 * sign * axis[i];
        out.idempotents.push_back(std::move(c));
      }
      return out;
    }
  }
  return out;
}

bool SquareInCone(const JordanAlgebra& alg, std::span<const double> x) {
  const SpectralDecomposition sd = SpectralDecompose(alg, x);
  return sd.eigenvalues.back() >= -1e-10;
}

Vector SpinToHerm2(std::span<const double> x) {
  if (x.size() != 4) {
    Throw(ErrorKind::kValidation, "spin(3) element must have 4 coordinates");
  }
  // Off-diagonal entry (0,1) is x1 - i x2.
  return {x[0] + x[3], x[0] - x[3], kSqrt2 * x[1], -kSqrt2 * x[2]};
}

Vector Herm2ToSpin(std::span<const double> h) {
  if (h.size() != 4) {
    Throw(ErrorKind::kValidation, "psd(2) element must have 4 coordinates");
  }
  return {0.5 * (h[0] + h[1]), h[2] / kSqrt2, -h[3] / kSqrt2,
          0.5 * (h[0] - h[1])};
}

}  // namespace conic_qm
