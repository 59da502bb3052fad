#pragma once

// Test-only oracles, independent of the library code paths they check:
// a direct linear solve for steady states, reachability + period for
// regularity, and explicit path/input enumeration for sequence likelihoods.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "fsmc/channel.hpp"
#include "fsmc/matrix.hpp"
#include "fsmc/rng.hpp"

namespace fsmc::testing {

/// Solves pi * P = pi, sum(pi) = 1 by Gaussian elimination on the transposed
/// system with the last equation replaced by the normalization constraint.
inline std::vector<double> steady_state_linear_solve(const Matrix& P) {
  const std::size_t n = P.rows();
  // rows: (P^T - I) pi = 0 for the first n-1 equations, then sum pi = 1
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = P(j, i) - (i == j ? 1.0 : 0.0);
    a[i][n] = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = 1.0;
  a[n - 1][n] = 1.0;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k <= n; ++k) a[r][k] -= f * a[col][k];
    }
  }
  std::vector<double> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = a[i][n] / a[i][i];
  return pi;
}

/// Brute-force regularity: strongly connected and the gcd of return times to
/// state 0 (from dense matrix powers) equals 1.
inline bool regular_brute(const Matrix& P) {
  const std::size_t n = P.rows();
  // strong connectivity by DFS over the support, forward and reverse
  auto reaches_all = [&](bool reverse) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        const double p = reverse ? P(v, u) : P(u, v);
        if (p > 0.0 && !seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    for (bool s : seen)
      if (!s) return false;
    return true;
  };
  if (!reaches_all(false) || !reaches_all(true)) return false;

  Matrix power = P;
  long g = 0;
  for (std::size_t t = 1; t <= 2 * n * n + 2; ++t) {
    if (power(0, 0) > 0.0) g = std::gcd(g, static_cast<long>(t));
    if (g == 1) return true;
    power = power * P;
  }
  return g == 1;
}

/// f(y | x) by explicit enumeration of all |S|^n state paths.
inline double enum_f_y_given_x(const MarkovChannel& c, std::span<const std::uint8_t> x,
                               std::span<const std::uint8_t> y) {
  const std::size_t n = x.size();
  const std::size_t S = c.num_states();
  std::vector<std::uint8_t> path(n, 0);
  double total = 0.0;
  while (true) {
    const double log_p = joint_log_likelihood(c, x, path, y);
    if (std::isfinite(log_p)) total += std::exp(log_p);
    std::size_t pos = 0;
    while (pos < n && ++path[pos] == S) path[pos++] = 0;
    if (pos == n) break;
  }
  return total;
}

/// f(y) by additionally enumerating all 2^n input words under Bernoulli(q).
inline double enum_f_y(const MarkovChannel& c, double q, std::span<const std::uint8_t> y) {
  const std::size_t n = y.size();
  std::vector<std::uint8_t> x(n, 0);
  double total = 0.0;
  for (std::uint64_t word = 0; word < (std::uint64_t{1} << n); ++word) {
    double px = 1.0;
    for (std::size_t t = 0; t < n; ++t) {
      x[t] = (word >> t) & 1;
      px *= x[t] ? q : 1.0 - q;
    }
    if (px == 0.0) continue;
    total += px * enum_f_y_given_x(c, x, y);
  }
  return total;
}

/// Random row-stochastic matrix with entries bounded away from zero, so the
/// chain is regular and power iteration converges briskly.
inline Matrix random_dense_stochastic(CounterRng& rng, std::size_t n, double floor = 0.05) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) = floor + rng.next_unit();
      sum += m(i, j);
    }
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      m(i, j) /= sum;
      acc += m(i, j);
    }
    m(i, n - 1) = 1.0 - acc;  // exact row sum
  }
  return m;
}

/// Random stochastic matrix with a random support pattern (>= 1 entry per
/// row); may be reducible or periodic. For regularity-oracle comparisons.
inline Matrix random_sparse_stochastic(CounterRng& rng, std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < n; ++j)
      if (rng.next_unit() < 0.45) cols.push_back(j);
    if (cols.empty()) cols.push_back(static_cast<std::size_t>(rng.next_u64() % n));
    double sum = 0.0;
    std::vector<double> w(cols.size());
    for (auto& v : w) {
      v = 0.1 + rng.next_unit();
      sum += v;
    }
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < cols.size(); ++k) {
      m(i, cols[k]) = w[k] / sum;
      acc += m(i, cols[k]);
    }
    m(i, cols.back()) = 1.0 - acc;
  }
  return m;
}

inline MarkovChannel random_regular_channel(CounterRng& rng, std::size_t num_states,
                                            double eta_lo = 0.05, double eta_hi = 0.45) {
  const Matrix m = random_dense_stochastic(rng, num_states);
  NoiseVector noise;
  for (std::size_t i = 0; i < num_states; ++i)
    noise.etas.push_back(eta_lo + (eta_hi - eta_lo) * rng.next_unit());
  return MarkovChannel::create(TransitionMatrix(m), std::move(noise));
}

/// The worked two-state example channel used throughout the tests:
/// symmetric 0.9/0.1 switching with per-state inversion 0.1 and 0.3.
inline MarkovChannel example_channel() {
  Matrix p(2, 2);
  p(0, 0) = 0.9;
  p(0, 1) = 0.1;
  p(1, 0) = 0.1;
  p(1, 1) = 0.9;
  return MarkovChannel::create(TransitionMatrix(p), NoiseVector{{0.1, 0.3}});
}

}  // namespace fsmc::testing
