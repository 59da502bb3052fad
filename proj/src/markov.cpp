#include "fsmc/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fsmc {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

using BoolMatrix = std::vector<std::vector<bool>>;

BoolMatrix support_of(const TransitionMatrix& P) {
  const std::size_t n = P.num_states();
  BoolMatrix s(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s[i][j] = P(i, j) > 0.0;
  return s;
}

BoolMatrix bool_multiply(const BoolMatrix& a, const BoolMatrix& b) {
  const std::size_t n = a.size();
  BoolMatrix out(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (!a[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (b[k][j]) out[i][j] = true;
    }
  return out;
}

bool all_positive(const BoolMatrix& m) {
  for (const auto& row : m)
    for (bool v : row)
      if (!v) return false;
  return true;
}

bool strongly_connected(const BoolMatrix& adj) {
  const std::size_t n = adj.size();
  auto reach_all = [n](auto edge) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v)
        if (edge(u, v) && !seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  };
  return reach_all([&](std::size_t u, std::size_t v) { return adj[u][v]; }) &&
         reach_all([&](std::size_t u, std::size_t v) { return adj[v][u]; });
}

// Period of an irreducible chain: gcd over all edges (u, v) of
// level[u] + 1 - level[v], with levels from a BFS tree rooted at state 0.
std::size_t chain_period(const BoolMatrix& adj) {
  const std::size_t n = adj.size();
  std::vector<long> level(n, -1);
  std::vector<std::size_t> queue{0};
  level[0] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t u = queue[head];
    for (std::size_t v = 0; v < n; ++v)
      if (adj[u][v] && level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      }
  }
  long g = 0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (adj[u][v]) g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
  return static_cast<std::size_t>(g == 0 ? 1 : g);
}

}  // namespace

TransitionMatrix::TransitionMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
    raise(errc::non_square, "expected a square matrix with at least one state, got " +
                                std::to_string(entries_.rows()) + "x" +
                                std::to_string(entries_.cols()));
  const std::size_t n = entries_.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double p = entries_(i, j);
      if (p < 0.0 || p > 1.0)
        raise(errc::negative_entry, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                        ") = " + fmt(p) + " outside [0,1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
      raise(errc::row_sum_violation,
            "row " + std::to_string(i) + " sums to " + fmt(sum) + " (deviation " +
                fmt(sum - 1.0) + ")");
  }
}

RegularityResult is_regular(const TransitionMatrix& P) {
  const std::size_t n = P.num_states();
  const std::size_t bound = (n - 1) * (n - 1) + 1;  // Wielandt
  const BoolMatrix support = support_of(P);

  BoolMatrix power = support;
  for (std::size_t m = 1; m <= bound; ++m) {
    if (all_positive(power))
      return {.regular = true, .positive_power = m, .failure = RegularityResult::Failure::none};
    power = bool_multiply(power, support);
  }

  RegularityResult result;
  result.regular = false;
  if (!strongly_connected(support)) {
    result.failure = RegularityResult::Failure::reducible;
  } else {
    result.failure = RegularityResult::Failure::periodic;
    result.period = chain_period(support);
  }
  return result;
}

StateDistribution steady_state(const TransitionMatrix& P, double tol, std::size_t max_iter) {
  if (tol <= 0.0) raise(errc::param_out_of_range, "tol must be positive");
  const auto reg = is_regular(P);
  if (!reg.regular)
    raise(errc::not_regular,
          std::string("steady_state requires a regular chain (") +
              (reg.failure == RegularityResult::Failure::reducible ? "reducible" : "periodic") +
              ")");

  const std::size_t n = P.num_states();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n, 0.0);
  double residual = 0.0;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double pi_i = pi[i];
      if (pi_i == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) next[j] += pi_i * P(i, j);
    }
    residual = 0.0;
    for (std::size_t j = 0; j < n; ++j) residual = std::max(residual, std::abs(next[j] - pi[j]));
    pi.swap(next);
    if (residual < tol) {
      // guard against drift: renormalize the final iterate
      const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
      for (double& p : pi) p /= total;
      return {std::move(pi)};
    }
  }
  raise(errc::no_convergence, "power iteration did not reach tol " + fmt(tol) + " after " +
                                  std::to_string(max_iter) + " iterations (residual " +
                                  fmt(residual) + ")");
}

DeviationReport d_step_deviation(const TransitionMatrix& P, std::size_t d) {
  if (d == 0) raise(errc::param_out_of_range, "d must be a positive step count");
  const StateDistribution pi = steady_state(P);  // throws NotRegular for irregular chains
  const Matrix power = matrix_power(P.matrix(), d);
  const std::size_t n = P.num_states();
  double delta = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (pi[j] <= 0.0)
      raise(errc::zero_steady_state_prob,
            "pi(" + std::to_string(j) + ") = 0 for a regular chain");
    for (std::size_t i = 0; i < n; ++i)
      delta = std::max(delta, std::abs(power(i, j) / pi[j] - 1.0));
  }
  return {.d = d, .delta = delta};
}

}  // namespace fsmc
