#include "conic_qm/sampling.h"

#include <cmath>
#include <random>

#include "conic_qm/errors.h"

namespace conic_qm {
namespace {

// Orthonormalizes `v` against the first `count` columns of `frame`.
void Orthogonalize(const RealMatrix& frame, std::size_t count, Vector& v) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t k = 0; k < count; ++k) {
      double c = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) c += frame(i, k) * v[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * frame(i, k);
    }
  }
}

}  // namespace

ComplexMatrix RandomHermitianMatrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = normal(rng);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = Complex(re, im);
      m(j, i) = Complex(re, -im);
    }
  }
  return m;
}

ComplexMatrix RandomUnitaryMatrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix u(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Complex> v(n);
    for (auto& z : v) {
      const double re = normal(rng);
      const double im = normal(rng);
      z = Complex(re, im);
    }
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        Complex c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += std::conj(u(i, k)) * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= c * u(i, k);
      }
    }
    double nrm = 0.0;
    for (const auto& z : v) nrm += std::norm(z);
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) u(i, j) = v[i] / nrm;
  }
  return u;
}

ComplexMatrix HermitianWithSpectrum(std::span<const double> values,
                                    std::uint64_t seed) {
  const ComplexMatrix u = RandomUnitaryMatrix(values.size(), seed);
  return u * ComplexMatrix::Diagonal(values) * u.Adjoint();
}

Vector RandomUnitVector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  double nrm = 0.0;
  while (nrm < 1e-3) {
    for (double& x : v) x = normal(rng);
    nrm = Norm2(v);
  }
  for (double& x : v) x /= nrm;
  return v;
}

RealMatrix RotationGenerator(std::span<const double> u,
                             std::span<const double> rates,
                             std::uint64_t seed) {
  const std::size_t n = u.size();
  if (2 * rates.size() + 1 > n) {
    Throw(ErrorKind::kValidation, "too many rotation planes for dimension " +
                                      std::to_string(n));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RealMatrix frame(n, n);
  for (std::size_t i = 0; i < n; ++i) frame(i, 0) = u[i];
  for (std::size_t k = 1; k < n; ++k) {
    Vector v(n);
    double nrm = 0.0;
    while (nrm < 1e-3) {
      for (double& x : v) x = normal(rng);
      Orthogonalize(frame, k, v);
      nrm = Norm2(v);
    }
    for (std::size_t i = 0; i < n; ++i) frame(i, k) = v[i] / nrm;
  }
  RealMatrix omega(n, n);
  for (std::size_t p = 0; p < rates.size(); ++p) {
    const std::size_t a = 1 + 2 * p;
    const std::size_t b = a + 1;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        omega(i, j) += rates[p] * (frame(i, b) * frame(j, a) -
                                   frame(i, a) * frame(j, b));
      }
    }
  }
  return omega;
}

PhysicalQuantity RandomQuantity(const ConeModel& cone, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  switch (cone.kind()) {
    case ConeKind::kPsdHermitian:
      return MakeHermitianQuantity(RandomHermitianMatrix(cone.size(), rng()));
    case ConeKind::kSpinFactor: {
      std::uniform_real_distribution<double> rate(0.2, 3.0);
      Vector rates((cone.size() - 1) / 2);
      for (double& r : rates) r = rate(rng);
      const Vector u = RandomUnitVector(cone.size(), rng());
      const RealMatrix omega = RotationGenerator(u, rates, rng());
      const double c0 = normal(rng);
      const double c1 = normal(rng);
      return MakeRotationQuantity(cone.size(), omega, c0, c1, u);
    }
    case ConeKind::kSimplex: {
      Vector values(cone.dimension());
      for (double& v : values) v = normal(rng);
      return MakeRawQuantity(cone, RealMatrix(cone.dimension(), cone.dimension()),
                             std::move(values), true);
    }
  }
  Throw(ErrorKind::kValidation, "unknown cone kind");
}

PhysicalQuantity RandomGappedQuantity(const ConeModel& cone,
                                      std::uint64_t seed, double min_rate,
                                      double max_rate) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> rate(min_rate, max_rate);
  switch (cone.kind()) {
    case ConeKind::kPsdHermitian: {
      const std::size_t n = cone.size();
      const double low = normal(rng);
      const double gap = rate(rng);
      Vector spectrum(n, low);
      spectrum[0] = low + gap;
      for (std::size_t i = 1; i + 1 < n; ++i) {
        if (rng() % 2 == 0) spectrum[i] = low + gap;
      }
      return MakeHermitianQuantity(HermitianWithSpectrum(spectrum, rng()));
    }
    case ConeKind::kSpinFactor: {
      Vector rates((cone.size() - 1) / 2);
      for (double& r : rates) r = rate(rng);
      const Vector u = RandomUnitVector(cone.size(), rng());
      const RealMatrix omega = RotationGenerator(u, rates, rng());
      const double c0 = normal(rng);
      const double c1 = normal(rng);
      return MakeRotationQuantity(cone.size(), omega, c0, c1, u);
    }
    case ConeKind::kSimplex:
      return RandomQuantity(cone, seed);
  }
  Throw(ErrorKind::kValidation, "unknown cone kind");
}

}  // namespace conic_qm
