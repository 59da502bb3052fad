#pragma once

#include <optional>
#include <vector>

#include "fsmc/channel.hpp"

namespace fsmc {

/// Jump probabilities of the mixing operator. Both in [0,1]; the ordering
/// checks additionally require the open interval (0,1).
struct MixParams {
  double mu12 = 0.0;
  double mu21 = 0.0;
};

/// Mixes two channels' state machines with jump probabilities (mu12, mu21).
///
/// The result has the block transition matrix
///   [ (1-mu12) P1      mu12 Pbar2 ]
///   [  mu21 Pbar1   (1-mu21) P2   ]
/// where every row of Pbar_i is c_i's steady state, and the concatenated
/// noise vector [n1 n2]. c1's states keep indices 0..k1-1, c2's are
/// relabeled to k1..k1+k2-1, so the state sets are disjoint by construction.
///
/// Boundary mu (0 or 1) is accepted for experimentation; the result is then
/// typically non-regular and comes back flagged (no cached steady state).
/// Throws FamilyMismatch or MuOutOfRange.
MarkovChannel mix(const MarkovChannel& c1, const MarkovChannel& c2, MixParams params);

/// Cascades every state's BSC with an independent BSC(p):
/// eta*_i = eta_i (1 - p) + p (1 - eta_i), same transition matrix.
/// The result is a broken-chain degraded version of c; the concatenated
/// BSC's noise sequence is the side information that restores c.
MarkovChannel concat_bsc(const MarkovChannel& c, double p);

/// One step of a degradation recipe, applied left to right.
struct RecipeStep {
  enum class Op { mix, concat_bsc };

  Op op = Op::concat_bsc;
  /// concat_bsc: inversion probability of the cascaded BSC.
  double p = 0.0;
  /// mix: jump probabilities; `other` is the channel mixed in front of the
  /// current one (defaults to the recipe's base channel when unset).
  MixParams mu;
  std::optional<MarkovChannel> other;
};

using DegradationRecipe = std::vector<RecipeStep>;

/// Applies the recipe to `base`. Mix steps compute mix(other-or-base, cur);
/// an empty recipe returns `base` unchanged. Every output is in the
/// broken-chain degraded family of `base` by construction.
MarkovChannel apply_recipe(const MarkovChannel& base, const DegradationRecipe& recipe);

/// Iterates c^(k+1) = mix(c, concat_bsc(c^(k), bsc_p), params), starting
/// from c^(0) = c, for `steps` rounds; returns [c^(1), ..., c^(steps)].
/// State counts grow by num_states(c) per step. With `chain_successive`
/// the previous output replaces c as the front mixing operand.
/// Requires both mu strictly inside (0,1) so every link stays regular.
std::vector<MarkovChannel> build_degraded_chain(const MarkovChannel& c, int steps,
                                                MixParams params,
                                                std::optional<double> bsc_p = std::nullopt,
                                                bool chain_successive = false);

}  // namespace fsmc
