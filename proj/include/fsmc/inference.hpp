#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fsmc/channel.hpp"
#include "fsmc/ordering.hpp"

namespace fsmc {

/// Enumeration guard for exact_block_mi; the joint (x, y) walk grows as 4^k.
inline constexpr int kMaxExactBlock = 12;

double binary_entropy(double p);

/// Mutual information in bits of a single BSC(eta) under Bernoulli(q) input.
double bsc_mutual_information(double eta, double q);

/// ln f(y | x): the state sequence marginalized out by a normalized forward
/// (alpha) recursion started from the steady state, accumulating the log of
/// the per-step normalizers. Exact up to rounding. Returns -infinity when
/// the observation has probability exactly zero.
double forward_log_f_y_given_x(const MarkovChannel& c, std::span<const std::uint8_t> x,
                               std::span<const std::uint8_t> y);

/// ln f(y) under iid inputs: the same recursion with the input symbol
/// marginalized inside each emission, f(y_t|s_t) = sum_x q(x) f(y_t|s_t,x).
double forward_log_f_y(const MarkovChannel& c, InputDistribution input,
                       std::span<const std::uint8_t> y);

/// Exact I(X_1^k; Y_1^k) in bits by full enumeration of input/output blocks
/// (forward recursion per sequence). Throws BlockTooLarge for k beyond
/// kMaxExactBlock.
double exact_block_mi(const MarkovChannel& c, int k, InputDistribution input);

/// Point estimate of the mutual-information rate in bits per channel use.
struct MIEstimate {
  double rate_bits = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

/// Monte Carlo estimate of lim (1/n) I(X;Y): per trial, sample a trajectory
/// on its own RNG stream and average the information density
/// (1/n)[log2 f(y|x) - log2 f(y)]; the reported std_error is the standard
/// error of the mean across trials. Trials are independent work units:
/// results are identical for any worker count.
MIEstimate estimate_mi_rate(const MarkovChannel& c, InputDistribution input, std::size_t n,
                            int trials, std::uint64_t seed, int workers = 1);

/// Genie-aided upper bound: MI with the state sequence revealed,
/// sum_i pi_i * I_BSC(eta_i, q). Estimator sanity rail.
double genie_state_upper_bound(const MarkovChannel& c, InputDistribution input);

/// Average-channel lower bound: MI of the memoryless BSC with crossover
/// pbar = sum_i pi_i eta_i. Estimator sanity rail.
double memoryless_lower_bound(const MarkovChannel& c, InputDistribution input);

/// Shared Monte Carlo configuration for the verification checks.
struct McConfig {
  std::size_t n = 100000;
  int trials = 20;
  std::uint64_t seed = 1;
  int workers = 1;
  /// Margins above +confirm_sigma * SE confirm the ordering; margins below
  /// -violate_sigma * SE flag a violation (an inequality should never lose,
  /// so the thresholds are asymmetric).
  double confirm_sigma = 2.0;
  double violate_sigma = 3.0;
};

/// Truncated-block check: (1/k) I(X_1^k;Y_1^k) must not exceed the
/// asymptotic rate beyond estimator noise.
struct Lemma1Row {
  int k = 0;
  double exact_rate_bits = 0.0;  // (1/k) * exact block MI
  double mc_rate_bits = 0.0;
  double mc_std_error = 0.0;
  double margin = 0.0;  // mc rate - exact rate; negative beyond noise is a violation
  bool violated = false;
};

struct Lemma1Report {
  MIEstimate estimate;
  std::vector<Lemma1Row> rows;
  bool any_violation = false;
};

Lemma1Report check_lemma1(const MarkovChannel& c, int k_max, InputDistribution input,
                          const McConfig& mc);

enum class Verdict { confirmed, inconclusive, violated };

const char* verdict_name(Verdict v);

/// Mixing-degradation check at one grid point.
struct OrderingPoint {
  MixParams mu;
  MIEstimate mixed;
  double margin = 0.0;       // base rate - mixed rate
  double combined_se = 0.0;  // sqrt(se_base^2 + se_mixed^2)
  Verdict verdict = Verdict::inconclusive;
};

struct OrderingReport {
  MIEstimate base;
  std::vector<OrderingPoint> points;
  bool any_violation = false;
  /// True when c_star's construction certifies membership in c's degraded
  /// family. When false the caller may still assert membership; the check
  /// proceeds with a warning.
  bool certified = false;
};

/// Estimates I[c] once and I[mix(c, c_star, mu)] per grid point, with
/// paired (n, trials) budgets and per-channel sub-seeds. Every mu must lie
/// strictly inside (0,1)^2; boundary values throw MuOnBoundary.
OrderingReport check_theorem1(const MarkovChannel& c, const MarkovChannel& c_star,
                              std::span<const MixParams> mu_grid, InputDistribution input,
                              const McConfig& mc);

}  // namespace fsmc
