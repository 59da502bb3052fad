#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fsmc/markov.hpp"

namespace fsmc {

/// Per-state symbol channel family. v1 is binary-in/binary-out BSC only;
/// the emission interface takes (eta, x) -> distribution over outputs so
/// further discrete families can slot in without touching inference.
enum class SymbolFamily : std::uint8_t { bsc = 0 };

const char* family_name(SymbolFamily family);

/// f(y | state parameter eta, x). BSC: eta if y != x, 1 - eta if y == x.
/// Throws ParamOutOfRange for eta outside [0,1] or symbols outside {0,1}.
double emission_prob(SymbolFamily family, double eta, int x, int y);

/// Per-state channel parameters, one per hidden state.
struct NoiseVector {
  std::vector<double> etas;

  std::size_t size() const noexcept { return etas.size(); }
  double operator[](std::size_t i) const { return etas[i]; }
};

/// iid Bernoulli input over {0,1}; q is the probability of symbol 1.
class InputDistribution {
 public:
  explicit InputDistribution(double q);
  double q() const noexcept { return q_; }

 private:
  double q_;
};

/// A finite-state Markov channel: hidden transition matrix plus per-state
/// emission parameters, with the steady state cached at construction.
/// Immutable; safe to share across threads.
class MarkovChannel {
 public:
  /// Standard construction path: requires a regular chain and caches pi.
  /// Throws NotRegular, ParamOutOfRange or LengthMismatch.
  static MarkovChannel create(TransitionMatrix P, NoiseVector n,
                              SymbolFamily family = SymbolFamily::bsc);

  /// Relaxed path for non-regular intermediates (e.g. a block-diagonal mix
  /// with zero jump probability). No steady state is cached; sampling and
  /// estimation refuse such channels.
  static MarkovChannel create_relaxed(TransitionMatrix P, NoiseVector n,
                                      SymbolFamily family = SymbolFamily::bsc);

  std::size_t num_states() const noexcept { return P_.num_states(); }
  const TransitionMatrix& transition() const noexcept { return P_; }
  const NoiseVector& noise() const noexcept { return n_; }
  SymbolFamily family() const noexcept { return family_; }
  bool regular() const noexcept { return pi_.has_value(); }

  /// Cached steady state; throws NotRegular when constructed relaxed.
  const StateDistribution& steady() const;

  /// Content digest of (family, P, n); stable across runs.
  std::uint64_t digest() const noexcept { return digest_; }

  /// Digest of the root channel this one was degraded from, when the
  /// degradation was built by this library (mix / concat_bsc recipes).
  /// A fresh channel is trivially a member of its own degraded family.
  std::optional<std::uint64_t> degraded_base() const noexcept { return degraded_base_; }

  void set_degraded_base(std::optional<std::uint64_t> base) { degraded_base_ = base; }

 private:
  MarkovChannel(TransitionMatrix P, NoiseVector n, SymbolFamily family,
                std::optional<StateDistribution> pi);

  TransitionMatrix P_;
  NoiseVector n_;
  SymbolFamily family_;
  std::optional<StateDistribution> pi_;
  std::uint64_t digest_;
  std::optional<std::uint64_t> degraded_base_;
};

/// One sampled run of the channel: inputs, hidden states and outputs, all of
/// length n (the state at each emission time; the chain's trailing state
/// carries no output and is not stored).
struct Trajectory {
  std::vector<std::uint8_t> x;
  std::vector<std::uint8_t> s;
  std::vector<std::uint8_t> y;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Samples s_1 ~ pi, s_{t+1} ~ P(. | s_t), x_t iid Bernoulli(q) independent
/// of the states, y_t ~ emission(eta_{s_t}, x_t). Deterministic given
/// (seed, stream); disjoint streams give independent trajectories. Draw
/// order per step: x_t, noise for y_t, then the next-state jump.
Trajectory sample_trajectory(const MarkovChannel& c, std::size_t n, InputDistribution input,
                             std::uint64_t seed, std::uint64_t stream = 0);

/// Natural-log joint likelihood ln p(s_1) + sum ln f(y_t|s_t,x_t)
/// + sum ln p(s_{t+1}|s_t) for fully observed sequences. Returns -infinity
/// for any impossible transition or emission. Used as an enumeration oracle
/// for the forward recursion on short sequences.
double joint_log_likelihood(const MarkovChannel& c, std::span<const std::uint8_t> x,
                            std::span<const std::uint8_t> s, std::span<const std::uint8_t> y);

}  // namespace fsmc
