#include "fsmc/ordering.hpp"

#include <string>

namespace fsmc {

namespace {

void check_mu(double mu, const char* name) {
  if (!(mu >= 0.0 && mu <= 1.0))
    raise(errc::mu_out_of_range, std::string(name) + " = " + std::to_string(mu) +
                                     " outside [0,1]");
}

std::optional<std::uint64_t> merged_base(const MarkovChannel& a, const MarkovChannel& b) {
  if (a.degraded_base() && b.degraded_base() && *a.degraded_base() == *b.degraded_base())
    return a.degraded_base();
  return std::nullopt;
}

}  // namespace

MarkovChannel mix(const MarkovChannel& c1, const MarkovChannel& c2, MixParams params) {
  if (c1.family() != c2.family())
    raise(errc::family_mismatch, std::string("cannot mix ") + family_name(c1.family()) +
                                     " with " + family_name(c2.family()));
  check_mu(params.mu12, "mu12");
  check_mu(params.mu21, "mu21");

  const StateDistribution& pi1 = c1.steady();  // throws NotRegular if absent
  const StateDistribution& pi2 = c2.steady();
  const std::size_t k1 = c1.num_states();
  const std::size_t k2 = c2.num_states();

  Matrix P(k1 + k2, k1 + k2);
  for (std::size_t i = 0; i < k1; ++i) {
    for (std::size_t j = 0; j < k1; ++j) P(i, j) = (1.0 - params.mu12) * c1.transition()(i, j);
    for (std::size_t j = 0; j < k2; ++j) P(i, k1 + j) = params.mu12 * pi2[j];
  }
  for (std::size_t i = 0; i < k2; ++i) {
    for (std::size_t j = 0; j < k1; ++j) P(k1 + i, j) = params.mu21 * pi1[j];
    for (std::size_t j = 0; j < k2; ++j)
      P(k1 + i, k1 + j) = (1.0 - params.mu21) * c2.transition()(i, j);
  }

  NoiseVector n;
  n.etas.reserve(k1 + k2);
  n.etas.insert(n.etas.end(), c1.noise().etas.begin(), c1.noise().etas.end());
  n.etas.insert(n.etas.end(), c2.noise().etas.begin(), c2.noise().etas.end());

  MarkovChannel mixed =
      MarkovChannel::create_relaxed(TransitionMatrix(std::move(P)), std::move(n), c1.family());
  mixed.set_degraded_base(merged_base(c1, c2));
  return mixed;
}

MarkovChannel concat_bsc(const MarkovChannel& c, double p) {
  if (c.family() != SymbolFamily::bsc)
    raise(errc::family_mismatch, "concat_bsc requires a BSC-family channel");
  if (!(p >= 0.0 && p <= 1.0))
    raise(errc::param_out_of_range, "p = " + std::to_string(p) + " outside [0,1]");

  NoiseVector n = c.noise();
  for (double& eta : n.etas) eta = eta * (1.0 - p) + p * (1.0 - eta);
  MarkovChannel out = MarkovChannel::create_relaxed(c.transition(), std::move(n), c.family());
  out.set_degraded_base(c.degraded_base());
  return out;
}

MarkovChannel apply_recipe(const MarkovChannel& base, const DegradationRecipe& recipe) {
  MarkovChannel cur = base;
  for (const RecipeStep& step : recipe) {
    switch (step.op) {
      case RecipeStep::Op::concat_bsc:
        cur = concat_bsc(cur, step.p);
        break;
      case RecipeStep::Op::mix:
        cur = mix(step.other ? *step.other : base, cur, step.mu);
        break;
    }
  }
  return cur;
}

std::vector<MarkovChannel> build_degraded_chain(const MarkovChannel& c, int steps,
                                                MixParams params, std::optional<double> bsc_p,
                                                bool chain_successive) {
  if (steps < 1) raise(errc::param_out_of_range, "steps must be >= 1");
  if (!(params.mu12 > 0.0 && params.mu12 < 1.0 && params.mu21 > 0.0 && params.mu21 < 1.0))
    raise(errc::mu_on_boundary, "degradation chains require mu12, mu21 strictly inside (0,1)");

  std::vector<MarkovChannel> chain;
  chain.reserve(static_cast<std::size_t>(steps));
  MarkovChannel cur = c;
  for (int k = 0; k < steps; ++k) {
    const MarkovChannel degraded = bsc_p ? concat_bsc(cur, *bsc_p) : cur;
    const MarkovChannel& front = (chain_successive && !chain.empty()) ? chain.back() : c;
    cur = mix(front, degraded, params);
    chain.push_back(cur);
  }
  return chain;
}

}  // namespace fsmc
