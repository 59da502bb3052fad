#pragma once

#include <cstddef>
#include <vector>

#include "fsmc/error.hpp"
#include "fsmc/matrix.hpp"

namespace fsmc {

/// Absolute tolerance on row sums accepted by validate_stochastic. Inputs
/// further off than this are rejected, never silently renormalized.
inline constexpr double kRowSumTol = 1e-12;

/// Row-stochastic square matrix over the hidden state alphabet.
/// Immutable once constructed; construction validates.
class TransitionMatrix {
 public:
  /// Validates squareness, entry ranges and row sums (tolerance kRowSumTol).
  /// Throws NonSquare, NegativeEntry or RowSumViolation.
  explicit TransitionMatrix(Matrix entries);

  std::size_t num_states() const noexcept { return entries_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  const Matrix& matrix() const noexcept { return entries_; }

  bool operator==(const TransitionMatrix& other) const = default;

 private:
  Matrix entries_;
};

inline TransitionMatrix validate_stochastic(Matrix entries) {
  return TransitionMatrix(std::move(entries));
}

/// Steady-state distribution pi with pi * P = pi.
struct StateDistribution {
  std::vector<double> probs;

  std::size_t num_states() const noexcept { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }
};

struct RegularityResult {
  enum class Failure { none, reducible, periodic };

  bool regular = false;
  /// Smallest m with P^m entrywise positive, when regular.
  std::size_t positive_power = 0;
  Failure failure = Failure::none;
  /// Chain period when failure == periodic (gcd of cycle lengths), else 0.
  std::size_t period = 0;
};

/// Primitivity test: true iff some power P^m is entrywise positive for
/// m <= (num_states - 1)^2 + 1 (the Wielandt bound, sufficient for any
/// primitive matrix). Non-regular chains are classified as reducible or
/// periodic from the support graph.
RegularityResult is_regular(const TransitionMatrix& P);

/// Steady state by power iteration from the uniform distribution.
/// Requires a regular chain; converges to max-norm residual below tol.
/// Throws NotRegular or NoConvergence.
StateDistribution steady_state(const TransitionMatrix& P, double tol = 1e-12,
                               std::size_t max_iter = 100000);

/// d-step deviation diagnostic: the multiplicative gap between P^d and the
/// steady state, delta = max_{i,j} |P^d(i,j) / pi(j) - 1|. For a regular
/// chain delta -> 0 as d grows, i.e. P^d(i, .) sandwiches pi within
/// (1 - delta, 1 + delta) factors.
struct DeviationReport {
  std::size_t d = 0;
  double delta = 0.0;
};

DeviationReport d_step_deviation(const TransitionMatrix& P, std::size_t d);

}  // namespace fsmc
