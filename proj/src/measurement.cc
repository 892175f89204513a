#include "conic_qm/measurement.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "conic_qm/errors.h"

namespace conic_qm {
namespace {

// Eigenspaces of a Hermitian matrix, neighbouring eigenvalues chained
// together when closer than `tol`.
struct Cluster {
  double value = 0.0;
  ComplexMatrix basis;  // n x m orthonormal columns
};

std::vector<Cluster> ClusterEigenspaces(const HermitianEigenResult& eig,
                                        double tol) {
  const std::size_t n = eig.eigenvalues.size();
  std::vector<Cluster> clusters;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && eig.eigenvalues[end - 1] - eig.eigenvalues[end] <= tol) {
      ++end;
    }
    Cluster c;
    c.basis = ComplexMatrix(n, end - start);
    double sum = 0.0;
    for (std::size_t k = start; k < end; ++k) {
      sum += eig.eigenvalues[k];
      for (std::size_t i = 0; i < n; ++i) {
        c.basis(i, k - start) = eig.eigenvectors(i, k);
      }
    }
    c.value = sum / static_cast<double>(end - start);
    clusters.push_back(std::move(c));
    start = end;
  }
  return clusters;
}

double SpectralNorm(const Vector& eigenvalues) {
  return eigenvalues.empty() ? 0.0 : MaxAbs(eigenvalues);
}

Vector RankOneCoords(std::span<const Complex> v) {
  const std::size_t n = v.size();
  ComplexMatrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) p(i, j) = v[i] * std::conj(v[j]);
  }
  return CoordsFromHermitian(p);
}

double FixedTolerance(const PhysicalQuantity& q) {
  return 1e-8 * std::max(1.0, q.g().FrobeniusNorm());
}

std::vector<ExtremeComponent> DecomposePsd(const PhysicalQuantity& q,
                                           const StateVector& y,
                                           bool& conventional) {
  const std::size_t n = q.cone().size();
  const ComplexMatrix observable = HermitianFromCoords(q.outcome(), n);
  const ComplexMatrix state = HermitianFromCoords(y.coords(), n);
  const HermitianEigenResult obs = HermEigen(observable);
  const double tol = 1e-9 * SpectralNorm(obs.eigenvalues);

  std::vector<ExtremeComponent> out;
  for (const Cluster& c : ClusterEigenspaces(obs, tol)) {
    // Restrict the state to the eigenspace and diagonalize there.
    ComplexMatrix block = c.basis.Adjoint() * state * c.basis;
    block = (block + block.Adjoint()) * Complex(0.5);
    const HermitianEigenResult local = HermEigen(block);
    const std::size_t m = c.basis.cols();
    for (std::size_t k = 0; k < m; ++k) {
      if (k > 0 && local.eigenvalues[k - 1] - local.eigenvalues[k] <= 1e-9) {
        conventional = true;
      }
      std::vector<Complex> v(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          v[i] += c.basis(i, j) * local.eigenvectors(j, k);
        }
      }
      out.push_back({local.eigenvalues[k], StateVector(RankOneCoords(v))});
    }
  }
  return out;
}

std::vector<ExtremeComponent> DecomposeSpin(const PhysicalQuantity& q,
                                            const StateVector& y,
                                            bool& conventional) {
  const std::size_t n = q.cone().size();
  const Vector& c = y.coords();
  Vector vec(c.begin() + 1, c.end());

  std::optional<DecoherenceProjector> projector;
  if (q.generator().declared_skew && !q.g().IsZero()) projector.emplace(q);

  auto kernel_part = [&](std::span<const double> v) {
    Vector full(n + 1, 0.0);
    std::copy(v.begin(), v.end(), full.begin() + 1);
    if (projector) full = projector->matrix() * std::span(full);
    return Vector(full.begin() + 1, full.end());
  };

  // Numeric-route residuals outside the kernel are dropped before choosing
  // the axis.
  vec = kernel_part(vec);
  const double r = Norm2(vec);

  Vector axis(n, 0.0);
  if (r > 1e-10) {
    for (std::size_t i = 0; i < n; ++i) axis[i] = vec[i] / r;
  } else {
    conventional = true;
    const Vector a_vec =
        kernel_part(std::span(q.outcome()).subspan(1));
    if (Norm2(a_vec) > 1e-12) {
      const double an = Norm2(a_vec);
      for (std::size_t i = 0; i < n; ++i) axis[i] = a_vec[i] / an;
    } else {
      // Pick the coordinate axis with the largest kernel component.
      double best = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        Vector ej(n, 0.0);
        ej[j] = 1.0;
        const Vector kj = kernel_part(ej);
        const double nj = Norm2(kj);
        if (nj > best + 1e-12) {
          best = nj;
          for (std::size_t i = 0; i < n; ++i) axis[i] = kj[i] / nj;
        }
      }
      if (best <= 1e-6) {
        // Ker G has no vector part: the fixed slice is the single point
        // unit/2.
        Vector center(n + 1, 0.0);
        center[0] = 0.5;
        return {{2.0 * c[0], StateVector(std::move(center))}};
      }
    }
  }
  const double along = Dot(vec, axis);
  std::vector<ExtremeComponent> out;
  for (double sign : {1.0, -1.0}) {
    Vector s(n + 1);
    s[0] = 0.5;
    for (std::size_t i = 0; i < n; ++i) s[i + 1] = 0.5 * sign * axis[i];
    out.push_back({c[0] + sign * along, StateVector(std::move(s))});
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

DecoherenceProjector::DecoherenceProjector(const PhysicalQuantity& q) {
  if (!q.generator().declared_skew) {
    Throw(ErrorKind::kUnsupported,
          "spectral projector needs a skew-adjoint generator; use the "
          "numeric route");
  }
  const RealMatrix& g = q.g();
  const std::size_t d = g.rows();
  if (g.IsZero()) {
    projector_ = RealMatrix::Identity(d);
    kernel_dimension_ = d;
    identity_ = true;
    return;
  }
  // i * skew(G) is Hermitian.
  ComplexMatrix ig(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      ig(i, j) = Complex(0.0, 0.5 * (g(i, j) - g(j, i)));
    }
  }
  const HermitianEigenResult eig = HermEigen(ig);
  const double threshold = 1e-9 * SpectralNorm(eig.eigenvalues);
  projector_ = RealMatrix(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    const double w = eig.eigenvalues[k];
    if (std::abs(w) > threshold) {
      frequencies_.push_back(w);
      continue;
    }
    ++kernel_dimension_;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        projector_(i, j) +=
            (eig.eigenvectors(i, k) * std::conj(eig.eigenvectors(j, k)))
                .real();
      }
    }
  }
}

StateVector DecoherenceProjector::Apply(const StateVector& x) const {
  if (x.size() != projector_.cols()) {
    Throw(ErrorKind::kValidation, "projector: state dimension mismatch");
  }
  if (identity_) return x;
  return StateVector(projector_ * std::span(x.coords()));
}

StateVector QSpectral(const PhysicalQuantity& q, const StateVector& x) {
  return DecoherenceProjector(q).Apply(x);
}

StateVector QNumeric(const PhysicalQuantity& q, const StateVector& x,
                     double epsilon, int nodes, int max_squarings) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    Throw(ErrorKind::kValidation, "epsilon must be a positive real");
  }
  const QuadratureRule rule = GaussHermite(nodes);
  if (x.size() != q.cone().dimension()) {
    Throw(ErrorKind::kValidation, "QNumeric: state dimension mismatch");
  }
  if (q.g().IsZero()) return x;

  const double scale = 1.0 / std::sqrt(epsilon);
  const double t_max = MaxAbs(rule.nodes) * scale;
  if (t_max > MatExpTimeLimit(q.g(), max_squarings)) {
    Throw(ErrorKind::kRange,
          "quadrature reaches |t| = " + std::to_string(t_max) +
              " beyond the matrix-exponential budget; use a larger epsilon "
              "or a generator with smaller norm");
  }
  const double total = std::accumulate(rule.weights.begin(),
                                       rule.weights.end(), 0.0);
  Vector acc(x.size(), 0.0);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Vector moved =
        MatExp(q.g(), rule.nodes[i] * scale, max_squarings) *
        std::span(x.coords());
    const double w = rule.weights[i] / total;
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += w * moved[k];
  }
  return StateVector(std::move(acc));
}

double MaxFlowFrequency(const PhysicalQuantity& q) {
  const RealMatrix& g = q.g();
  if (g.IsZero()) return 0.0;
  if (q.generator().declared_skew) {
    const Vector w = DecoherenceProjector(q).frequencies();
    return w.empty() ? 0.0 : MaxAbs(w);
  }
  const Vector w = SymEigen(g.Transpose() * g).eigenvalues;
  return std::sqrt(std::max(0.0, w.front()));
}

int ResolvingNodeCount(const PhysicalQuantity& q, double epsilon,
                       int min_nodes) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    Throw(ErrorKind::kValidation, "epsilon must be a positive real");
  }
  const double k = MaxFlowFrequency(q) / std::sqrt(epsilon);
  const double needed = std::ceil((k / 1.6) * (k / 1.6));
  if (needed > kMaxHermiteNodes) {
    Throw(ErrorKind::kRange,
          "epsilon = " + std::to_string(epsilon) + " needs about " +
              std::to_string(static_cast<long long>(needed)) +
              " quadrature nodes; use a larger epsilon");
  }
  return std::max(min_nodes, static_cast<int>(needed));
}

ExtremeDecomposition ExtremeDecompose(const PhysicalQuantity& q,
                                      const StateVector& y) {
  const ConeModel& cone = q.cone();
  if (y.size() != cone.dimension()) {
    Throw(ErrorKind::kValidation, "ExtremeDecompose: dimension mismatch");
  }
  const double ey = EValue(cone, y);
  if (std::abs(ey - 1.0) > 1e-9) {
    Throw(ErrorKind::kNormalization,
          "state not normalized: e(y) = " + std::to_string(ey));
  }
  if (!Contains(cone, y, 1e-8)) {
    Throw(ErrorKind::kValidation, "state lies outside " + cone.Name());
  }
  const double fixed_tol = FixedTolerance(q);
  const double drift = Norm2(q.g() * std::span(y.coords()));
  if (drift > fixed_tol) {
    Throw(ErrorKind::kPrecondition,
          "state is not fixed by the flow (|G y| = " + std::to_string(drift) +
              "); project it first or use a smaller epsilon");
  }

  ExtremeDecomposition out;
  switch (cone.kind()) {
    case ConeKind::kSimplex:
      for (std::size_t i = 0; i < y.size(); ++i) {
        Vector unit(y.size(), 0.0);
        unit[i] = 1.0;
        out.components.push_back({y[i], StateVector(std::move(unit))});
      }
      break;
    case ConeKind::kPsdHermitian:
      out.components = DecomposePsd(q, y, out.conventional);
      break;
    case ConeKind::kSpinFactor:
      out.components = DecomposeSpin(q, y, out.conventional);
      break;
  }

  double total = 0.0;
  for (auto& c : out.components) {
    if (c.weight < -1e-9) {
      Throw(ErrorKind::kValidation,
            "negative extreme weight " + std::to_string(c.weight) +
                ": state is outside the cone");
    }
    if (c.weight < 0.0) c.weight = 0.0;
    total += c.weight;
  }
  for (auto& c : out.components) c.weight /= total;

  for (const auto& c : out.components) {
    const double moved = Norm2(q.g() * std::span(c.state.coords()));
    if (moved > fixed_tol) {
      Throw(ErrorKind::kPrecondition,
            "extreme state is not fixed by the flow (|G s| = " +
                std::to_string(moved) + ")");
    }
  }
  return out;
}

double DefaultOutcomeTolerance(std::span<const double> outcome) {
  return 1e-8 * (1.0 + Norm2(outcome));
}

std::vector<Outcome> AggregateOutcomes(std::vector<Outcome> outcomes,
                                       double tol) {
  std::stable_sort(outcomes.begin(), outcomes.end(),
                   [](const Outcome& a, const Outcome& b) {
                     return a.value > b.value;
                   });
  std::vector<Outcome> merged;
  std::size_t start = 0;
  while (start < outcomes.size()) {
    std::size_t end = start + 1;
    while (end < outcomes.size() &&
           outcomes[end - 1].value - outcomes[end].value <= tol) {
      ++end;
    }
    double prob = 0.0;
    double weighted = 0.0;
    double plain = 0.0;
    std::size_t best = start;
    for (std::size_t k = start; k < end; ++k) {
      const double p = std::max(0.0, outcomes[k].probability);
      prob += p;
      weighted += p * outcomes[k].value;
      plain += outcomes[k].value;
      if (p > std::max(0.0, outcomes[best].probability)) best = k;
    }
    Outcome m;
    m.value = end - start == 1 ? outcomes[start].value
              : prob > 0.0 ? weighted / prob
                         : plain / static_cast<double>(end - start);
    m.probability = prob;
    m.representative = outcomes[best].representative;
    merged.push_back(std::move(m));
    start = end;
  }
  return merged;
}

OutcomeDistribution ComputeOutcomeDistribution(
    const PhysicalQuantity& q, const StateVector& x,
    const DistributionOptions& options) {
  const ConeModel& cone = q.cone();
  if (x.size() != cone.dimension()) {
    Throw(ErrorKind::kValidation, "state dimension does not match " +
                                      cone.Name());
  }
  const double ex = EValue(cone, x);
  if (std::abs(ex - 1.0) > 1e-9) {
    Throw(ErrorKind::kNormalization,
          "state not normalized: e(x) = " + std::to_string(ex));
  }
  if (!Contains(cone, x, options.membership_tol)) {
    Throw(ErrorKind::kValidation, "state lies outside " + cone.Name());
  }

  const StateVector y =
      options.route == Route::kSpectral
          ? QSpectral(q, x)
          : QNumeric(q, x, options.epsilon, options.nodes);
  const ExtremeDecomposition parts = ExtremeDecompose(q, y);

  std::vector<Outcome> raw;
  raw.reserve(parts.components.size());
  for (const auto& c : parts.components) {
    raw.push_back({q.OutcomeValue(c.state), c.weight, c.state});
  }
  OutcomeDistribution out;
  out.outcome_tol =
      options.outcome_tol.value_or(DefaultOutcomeTolerance(q.outcome()));
  out.entries = AggregateOutcomes(std::move(raw), out.outcome_tol);
  out.conventional_representatives = parts.conventional;
  return out;
}

OutcomeDistribution BornOracle(const ComplexMatrix& a_hat,
                               const ComplexMatrix& rho,
                               std::optional<double> outcome_tol) {
  if (!a_hat.is_square() || a_hat.HermitianDefect() > 1e-12) {
    Throw(ErrorKind::kValidation, "observable is not Hermitian");
  }
  const std::size_t n = a_hat.rows();
  if (rho.rows() != n || rho.cols() != n) {
    Throw(ErrorKind::kValidation, "density matrix shape mismatch");
  }
  if (rho.HermitianDefect() > 1e-10) {
    Throw(ErrorKind::kValidation, "density matrix is not Hermitian");
  }
  const double tr = rho.Trace().real();
  if (std::abs(tr - 1.0) > 1e-9) {
    Throw(ErrorKind::kValidation,
          "density matrix trace is " + std::to_string(tr));
  }
  if (HermEigen(rho).eigenvalues.back() < -1e-9) {
    Throw(ErrorKind::kValidation, "density matrix is not positive");
  }

  const HermitianEigenResult eig = HermEigen(a_hat);
  const double tol = 1e-9 * SpectralNorm(eig.eigenvalues);
  std::vector<Outcome> raw;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && eig.eigenvalues[end - 1] - eig.eigenvalues[end] <= tol) {
      ++end;
    }
    // P_b = sum_k v_k v_k^H over the cluster; Tr(P_b rho) = sum v^H rho v.
    ComplexMatrix proj(n, n);
    double value = 0.0;
    for (std::size_t k = start; k < end; ++k) {
      value += eig.eigenvalues[k];
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          proj(i, j) += eig.eigenvectors(i, k) * std::conj(eig.eigenvectors(j, k));
        }
      }
    }
    value /= static_cast<double>(end - start);
    const ComplexMatrix post = proj * rho * proj;
    const double p = post.Trace().real();
    // Representative: the post-measurement state, or the first eigenvector
    // when the outcome has zero probability.
    StateVector rep;
    if (p > 1e-12) {
      ComplexMatrix r = post * Complex(1.0 / p);
      rep = StateVector(CoordsFromHermitian((r + r.Adjoint()) * Complex(0.5)));
    } else {
      rep = StateVector(RankOneCoords(eig.eigenvectors.column(start)));
    }
    raw.push_back({value, p < 0.0 && p >= -1e-9 ? 0.0 : p, std::move(rep)});
    start = end;
  }
  OutcomeDistribution out;
  out.outcome_tol =
      outcome_tol.value_or(DefaultOutcomeTolerance(CoordsFromHermitian(a_hat)));
  out.entries = AggregateOutcomes(std::move(raw), out.outcome_tol);
  return out;
}

}  // namespace conic_qm
