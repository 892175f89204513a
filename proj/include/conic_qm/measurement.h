#pragma once

#include <optional>
#include <span>
#include <vector>

#include "conic_qm/cone.h"
#include "conic_qm/linalg.h"

namespace conic_qm {

inline constexpr int kDefaultQuadratureNodes = 64;
inline constexpr double kDefaultEpsilons[] = {1.0, 0.1, 0.01};

/// Orthogonal projection onto Ker G, the set of states fixed by the flow.
///
/// G is skew-symmetric, so iG is Hermitian; its eigenvectors with
/// |frequency| <= 1e-9 * max |frequency| span the (complexified) kernel and
/// the real projector is Re(sum z z^H). Throws kUnsupported when the
/// generator is not declared skew-adjoint.
class DecoherenceProjector {
 public:
  explicit DecoherenceProjector(const PhysicalQuantity& q);

  StateVector Apply(const StateVector& x) const;
  const RealMatrix& matrix() const { return projector_; }
  std::size_t kernel_dimension() const { return kernel_dimension_; }
  /// Nonzero flow frequencies (eigenvalues of iG), descending.
  const Vector& frequencies() const { return frequencies_; }

 private:
  RealMatrix projector_;
  std::size_t kernel_dimension_ = 0;
  Vector frequencies_;
  bool identity_ = false;
};

StateVector QSpectral(const PhysicalQuantity& q, const StateVector& x);

/// Gaussian time average of the flow,
///   sum_i w_i exp(t_i G) x,   t_i = s_i / sqrt(epsilon),
/// over the Gauss-Hermite rule (s_i, w_i) with weights rescaled to sum to 1.
/// Throws kRange when the largest |t_i| exceeds the exponential's budget.
StateVector QNumeric(const PhysicalQuantity& q, const StateVector& x,
                     double epsilon, int nodes = kDefaultQuadratureNodes,
                     int max_squarings = kDefaultMaxSquarings);

/// Largest flow frequency: max |eigenvalue of iG| for declared-skew
/// generators, the spectral norm of G otherwise.
double MaxFlowFrequency(const PhysicalQuantity& q);

/// Smallest node count >= `min_nodes` whose Gauss-Hermite rule resolves the
/// fastest rotation of the flow at `epsilon`, i.e. reproduces the damping
/// factor e^{-omega^2 / (4 epsilon)} to about 1e-12. An N-node rule does so
/// up to omega / sqrt(epsilon) = 1.6 sqrt(N) for N >= 64. Throws kRange when
/// more than kMaxHermiteNodes would be needed.
int ResolvingNodeCount(const PhysicalQuantity& q, double epsilon,
                       int min_nodes = kDefaultQuadratureNodes);

struct ExtremeComponent {
  double weight = 0.0;
  StateVector state;
};

struct ExtremeDecomposition {
  std::vector<ExtremeComponent> components;
  // The split inside a degenerate block is one of many valid choices.
  bool conventional = false;
};

/// Splits a flow-fixed normalized state into extreme states of the fixed
/// slice.
///
/// simplex: unit vectors weighted by the coordinates. psd: eigenvectors of
/// y taken inside each eigenspace of the observable matrix (the outcome
/// covector read as a Hermitian matrix), so every rank-one piece commutes
/// with the flow. spin: the Jordan spectral pair of y; when y has no vector
/// part the axis is taken from the outcome direction inside Ker G.
///
/// Weights in [-1e-9, 0) are clamped to zero and the weights renormalized to
/// sum to one; anything more negative is a validation error.
ExtremeDecomposition ExtremeDecompose(const PhysicalQuantity& q,
                                      const StateVector& y);

struct Outcome {
  double value = 0.0;
  double probability = 0.0;
  StateVector representative;
};

struct OutcomeDistribution {
  std::vector<Outcome> entries;  // values strictly descending
  double outcome_tol = 0.0;
  bool conventional_representatives = false;
};

enum class Route { kSpectral, kNumeric };

struct DistributionOptions {
  Route route = Route::kSpectral;
  // Defaults to DefaultOutcomeTolerance(a).
  std::optional<double> outcome_tol;
  double epsilon = 0.01;
  int nodes = kDefaultQuadratureNodes;
  double membership_tol = 1e-9;
};

/// 1e-8 * (1 + |a|).
double DefaultOutcomeTolerance(std::span<const double> outcome);

/// Sorts by value (descending) and merges runs whose neighbouring values are
/// within `tol`; a merged entry carries the summed probability and the
/// probability-weighted mean value.
std::vector<Outcome> AggregateOutcomes(std::vector<Outcome> outcomes,
                                       double tol);

/// Measurement statistics of `q` in the normalized state `x`: project with
/// the chosen route, split into extreme states, read off a(s_k).
OutcomeDistribution ComputeOutcomeDistribution(
    const PhysicalQuantity& q, const StateVector& x,
    const DistributionOptions& options = {});

/// Textbook reference: eigenprojectors P_b of `a_hat` (eigenvalues clustered
/// at 1e-9 |a_hat|) with probabilities Tr(P_b rho).
OutcomeDistribution BornOracle(const ComplexMatrix& a_hat,
                               const ComplexMatrix& rho,
                               std::optional<double> outcome_tol = std::nullopt);

}  // namespace conic_qm
