#include "fsmc/inference.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "fsmc/rng.hpp"

namespace fsmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLn2 = std::log(2.0);

void check_binary_symbols(std::span<const std::uint8_t> seq, const char* name) {
  for (std::uint8_t v : seq)
    if (v > 1)
      raise(errc::param_out_of_range, std::string(name) + " contains a symbol outside {0,1}");
}

/// Normalized forward pass over a per-step, per-state emission table
/// supplied as a callback: emission(j, t) = f(y_t | s_t = j [, x_t]).
/// Returns the accumulated natural-log likelihood.
template <typename EmissionFn>
double forward_pass(const MarkovChannel& c, std::size_t n, EmissionFn&& emission) {
  const StateDistribution& pi = c.steady();
  const std::size_t S = c.num_states();
  const Matrix& P = c.transition().matrix();

  std::vector<double> alpha(S), next(S);
  double log_l = 0.0;
  for (std::size_t j = 0; j < S; ++j) alpha[j] = pi[j] * emission(j, 0);
  for (std::size_t t = 0;; ++t) {
    double norm = 0.0;
    for (double a : alpha) norm += a;
    if (norm <= 0.0) return kNegInf;
    log_l += std::log(norm);
    if (t + 1 == n) return log_l;
    const double inv = 1.0 / norm;
    for (double& a : alpha) a *= inv;
    for (std::size_t j = 0; j < S; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < S; ++i) acc += alpha[i] * P(i, j);
      next[j] = acc * emission(j, t + 1);
    }
    alpha.swap(next);
  }
}

struct BscEmissions {
  // [state][output symbol] for input-marginalized emissions, or
  // [state][flip] for conditional ones.
  std::vector<std::array<double, 2>> table;

  double operator()(std::size_t state, int idx) const { return table[state][idx]; }
};

BscEmissions conditional_emissions(const MarkovChannel& c) {
  BscEmissions e;
  e.table.resize(c.num_states());
  for (std::size_t j = 0; j < c.num_states(); ++j) {
    const double eta = c.noise()[j];
    e.table[j] = {1.0 - eta, eta};  // indexed by x XOR y
  }
  return e;
}

BscEmissions marginal_emissions(const MarkovChannel& c, double q) {
  BscEmissions e;
  e.table.resize(c.num_states());
  for (std::size_t j = 0; j < c.num_states(); ++j) {
    const double eta = c.noise()[j];
    const double p_y1 = q * (1.0 - eta) + (1.0 - q) * eta;
    e.table[j] = {1.0 - p_y1, p_y1};  // indexed by y
  }
  return e;
}

}  // namespace

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    raise(errc::param_out_of_range, "entropy argument " + std::to_string(p) + " outside [0,1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double bsc_mutual_information(double eta, double q) {
  const double p_y1 = q * (1.0 - eta) + (1.0 - q) * eta;
  return binary_entropy(p_y1) - binary_entropy(eta);
}

double forward_log_f_y_given_x(const MarkovChannel& c, std::span<const std::uint8_t> x,
                               std::span<const std::uint8_t> y) {
  if (x.size() != y.size() || x.empty())
    raise(errc::length_mismatch, "x and y must have equal nonzero lengths");
  check_binary_symbols(x, "x");
  check_binary_symbols(y, "y");
  const BscEmissions e = conditional_emissions(c);
  return forward_pass(c, x.size(),
                      [&](std::size_t j, std::size_t t) { return e(j, x[t] ^ y[t]); });
}

double forward_log_f_y(const MarkovChannel& c, InputDistribution input,
                       std::span<const std::uint8_t> y) {
  if (y.empty()) raise(errc::length_mismatch, "y must be nonempty");
  check_binary_symbols(y, "y");
  const BscEmissions e = marginal_emissions(c, input.q());
  return forward_pass(c, y.size(), [&](std::size_t j, std::size_t t) { return e(j, y[t]); });
}

double exact_block_mi(const MarkovChannel& c, int k, InputDistribution input) {
  if (k < 1 || k > kMaxExactBlock)
    raise(errc::block_too_large,
          "k = " + std::to_string(k) + " outside [1," + std::to_string(kMaxExactBlock) + "]");
  const StateDistribution& pi = c.steady();
  const std::size_t S = c.num_states();
  const Matrix& P = c.transition().matrix();
  const double q = input.q();
  const BscEmissions cond = conditional_emissions(c);
  const BscEmissions marg = marginal_emissions(c, q);

  // One alpha buffer per depth; children recompute theirs from the parent's.
  std::vector<std::vector<double>> alpha(static_cast<std::size_t>(k) + 1,
                                         std::vector<double>(S));
  auto propagate = [&](const std::vector<double>& in, std::vector<double>& out) {
    for (std::size_t j = 0; j < S; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < S; ++i) acc += in[i] * P(i, j);
      out[j] = acc;
    }
  };

  // sum_y f(y) log2 f(y) over all output blocks (depth-first walk).
  double acc_y = 0.0;
  auto walk_y = [&](auto&& self, int t) -> void {
    for (int sym = 0; sym < 2; ++sym) {
      auto& cur = alpha[static_cast<std::size_t>(t) + 1];
      if (t == 0) {
        for (std::size_t j = 0; j < S; ++j) cur[j] = pi[j] * marg(j, sym);
      } else {
        propagate(alpha[static_cast<std::size_t>(t)], cur);
        for (std::size_t j = 0; j < S; ++j) cur[j] *= marg(j, sym);
      }
      const double f = std::accumulate(cur.begin(), cur.end(), 0.0);
      if (f <= 0.0) continue;  // zero-probability subtree: 0 log 0 = 0
      if (t + 1 == k)
        acc_y += f * std::log2(f);
      else
        self(self, t + 1);
    }
  };
  walk_y(walk_y, 0);

  // sum_{x,y} p(x) f(y|x) log2 f(y|x), joint walk over (x_t, y_t) pairs.
  double acc_xy = 0.0;
  auto walk_xy = [&](auto&& self, int t, double px) -> void {
    for (int pair = 0; pair < 4; ++pair) {
      const int x_sym = pair >> 1;
      const int flip = x_sym ^ (pair & 1);
      const double px_here = px * (x_sym == 1 ? q : 1.0 - q);
      if (px_here == 0.0) continue;
      auto& cur = alpha[static_cast<std::size_t>(t) + 1];
      if (t == 0) {
        for (std::size_t j = 0; j < S; ++j) cur[j] = pi[j] * cond(j, flip);
      } else {
        propagate(alpha[static_cast<std::size_t>(t)], cur);
        for (std::size_t j = 0; j < S; ++j) cur[j] *= cond(j, flip);
      }
      const double f = std::accumulate(cur.begin(), cur.end(), 0.0);
      if (f <= 0.0) continue;
      if (t + 1 == k)
        acc_xy += px_here * f * std::log2(f);
      else
        self(self, t + 1, px_here);
    }
  };
  walk_xy(walk_xy, 0, 1.0);

  // I = H(Y) - H(Y|X) = acc_xy - acc_y
  return acc_xy - acc_y;
}

MIEstimate estimate_mi_rate(const MarkovChannel& c, InputDistribution input, std::size_t n,
                            int trials, std::uint64_t seed, int workers) {
  if (n < 1) raise(errc::param_out_of_range, "n must be >= 1");
  if (trials < 2) raise(errc::param_out_of_range, "trials must be >= 2 to estimate a std error");
  c.steady();  // throws NotRegular up front

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> rates(static_cast<std::size_t>(trials));
  const int worker_count = std::clamp(workers, 1, trials);

  auto run_trial = [&](int trial) {
    const Trajectory traj =
        sample_trajectory(c, n, input, seed, static_cast<std::uint64_t>(trial));
    const double log_f_yx = forward_log_f_y_given_x(c, traj.x, traj.y);
    const double log_f_y = forward_log_f_y(c, input, traj.y);
    rates[static_cast<std::size_t>(trial)] =
        (log_f_yx - log_f_y) / (static_cast<double>(n) * kLn2);
  };

  if (worker_count == 1) {
    for (int t = 0; t < trials; ++t) run_trial(t);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(worker_count));
    for (int w = 0; w < worker_count; ++w)
      pool.emplace_back([&, w] {
        for (int t = w; t < trials; t += worker_count) run_trial(t);
      });
    for (auto& th : pool) th.join();
  }

  // index-order reduction keeps the result independent of scheduling
  double mean = 0.0;
  for (double r : rates) mean += r;
  mean /= static_cast<double>(trials);
  double var = 0.0;
  for (double r : rates) var += (r - mean) * (r - mean);
  var /= static_cast<double>(trials - 1);

  const auto t1 = std::chrono::steady_clock::now();
  return MIEstimate{
      .rate_bits = mean,
      .std_error = std::sqrt(var / static_cast<double>(trials)),
      .n = n,
      .trials = trials,
      .seed = seed,
      .wall_seconds = std::chrono::duration<double>(t1 - t0).count(),
  };
}

double genie_state_upper_bound(const MarkovChannel& c, InputDistribution input) {
  if (c.family() != SymbolFamily::bsc)
    raise(errc::family_mismatch, "bound implemented for the BSC family");
  const StateDistribution& pi = c.steady();
  double bound = 0.0;
  for (std::size_t i = 0; i < c.num_states(); ++i)
    bound += pi[i] * bsc_mutual_information(c.noise()[i], input.q());
  return bound;
}

double memoryless_lower_bound(const MarkovChannel& c, InputDistribution input) {
  if (c.family() != SymbolFamily::bsc)
    raise(errc::family_mismatch, "bound implemented for the BSC family");
  const StateDistribution& pi = c.steady();
  double p_bar = 0.0;
  for (std::size_t i = 0; i < c.num_states(); ++i) p_bar += pi[i] * c.noise()[i];
  return bsc_mutual_information(p_bar, input.q());
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::confirmed: return "CONFIRMED";
    case Verdict::inconclusive: return "INCONCLUSIVE";
    case Verdict::violated: return "VIOLATED";
  }
  return "UNKNOWN";
}

Lemma1Report check_lemma1(const MarkovChannel& c, int k_max, InputDistribution input,
                          const McConfig& mc) {
  if (k_max < 1 || k_max > kMaxExactBlock)
    raise(errc::block_too_large, "k_max = " + std::to_string(k_max) + " outside [1," +
                                     std::to_string(kMaxExactBlock) + "]");

  Lemma1Report report;
  report.estimate = estimate_mi_rate(c, input, mc.n, mc.trials, mc.seed, mc.workers);
  for (int k = 1; k <= k_max; ++k) {
    Lemma1Row row;
    row.k = k;
    row.exact_rate_bits = exact_block_mi(c, k, input) / static_cast<double>(k);
    row.mc_rate_bits = report.estimate.rate_bits;
    row.mc_std_error = report.estimate.std_error;
    row.margin = row.mc_rate_bits - row.exact_rate_bits;
    row.violated = row.margin < -mc.violate_sigma * row.mc_std_error;
    report.any_violation = report.any_violation || row.violated;
    report.rows.push_back(row);
  }
  return report;
}

OrderingReport check_theorem1(const MarkovChannel& c, const MarkovChannel& c_star,
                              std::span<const MixParams> mu_grid, InputDistribution input,
                              const McConfig& mc) {
  if (mu_grid.empty()) raise(errc::bad_config, "empty mu grid");
  for (const MixParams& mu : mu_grid)
    if (!(mu.mu12 > 0.0 && mu.mu12 < 1.0 && mu.mu21 > 0.0 && mu.mu21 < 1.0))
      raise(errc::mu_on_boundary, "theorem check requires mu strictly inside (0,1), got (" +
                                      std::to_string(mu.mu12) + "," + std::to_string(mu.mu21) +
                                      ")");

  OrderingReport report;
  report.certified =
      c_star.degraded_base().has_value() && *c_star.degraded_base() == c.digest();
  report.base =
      estimate_mi_rate(c, input, mc.n, mc.trials, derive_seed(mc.seed, 0), mc.workers);

  for (std::size_t g = 0; g < mu_grid.size(); ++g) {
    const MarkovChannel mixed = mix(c, c_star, mu_grid[g]);
    OrderingPoint point;
    point.mu = mu_grid[g];
    point.mixed =
        estimate_mi_rate(mixed, input, mc.n, mc.trials, derive_seed(mc.seed, g + 1), mc.workers);
    point.margin = report.base.rate_bits - point.mixed.rate_bits;
    point.combined_se = std::hypot(report.base.std_error, point.mixed.std_error);
    if (point.margin > mc.confirm_sigma * point.combined_se)
      point.verdict = Verdict::confirmed;
    else if (point.margin < -mc.violate_sigma * point.combined_se)
      point.verdict = Verdict::violated;
    else
      point.verdict = Verdict::inconclusive;
    report.any_violation = report.any_violation || point.verdict == Verdict::violated;
    report.points.push_back(point);
  }
  return report;
}

}  // namespace fsmc
