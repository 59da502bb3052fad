#include "fsmc/channel.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "fsmc/rng.hpp"

namespace fsmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint64_t fnv1a(std::uint64_t h, const void* bytes, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

std::uint64_t channel_digest(const TransitionMatrix& P, const NoiseVector& n,
                             SymbolFamily family) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  const std::uint8_t fam = static_cast<std::uint8_t>(family);
  h = fnv1a(h, &fam, 1);
  const std::uint64_t dim = P.num_states();
  h = fnv1a(h, &dim, sizeof(dim));
  const auto data = P.matrix().data();
  h = fnv1a(h, data.data(), data.size() * sizeof(double));
  h = fnv1a(h, n.etas.data(), n.etas.size() * sizeof(double));
  return h;
}

void check_eta_range(const NoiseVector& n) {
  for (std::size_t i = 0; i < n.size(); ++i)
    if (!(n[i] >= 0.0 && n[i] <= 1.0))
      raise(errc::param_out_of_range,
            "eta[" + std::to_string(i) + "] = " + std::to_string(n[i]) + " outside [0,1]");
}

/// Inverse-CDF draw over a probability row; u in [0,1).
std::size_t pick(std::span<const double> probs, double u) {
  double cum = 0.0;
  for (std::size_t j = 0; j + 1 < probs.size(); ++j) {
    cum += probs[j];
    if (u < cum) return j;
  }
  return probs.size() - 1;
}

}  // namespace

const char* family_name(SymbolFamily family) {
  switch (family) {
    case SymbolFamily::bsc: return "bsc";
  }
  return "unknown";
}

double emission_prob(SymbolFamily family, double eta, int x, int y) {
  if (family != SymbolFamily::bsc) raise(errc::family_mismatch, "unsupported symbol family");
  if (!(eta >= 0.0 && eta <= 1.0))
    raise(errc::param_out_of_range, "BSC eta = " + std::to_string(eta) + " outside [0,1]");
  if ((x != 0 && x != 1) || (y != 0 && y != 1))
    raise(errc::param_out_of_range, "BSC symbols must be in {0,1}");
  return x == y ? 1.0 - eta : eta;
}

InputDistribution::InputDistribution(double q) : q_(q) {
  if (!(q >= 0.0 && q <= 1.0))
    raise(errc::param_out_of_range, "input q = " + std::to_string(q) + " outside [0,1]");
}

MarkovChannel::MarkovChannel(TransitionMatrix P, NoiseVector n, SymbolFamily family,
                             std::optional<StateDistribution> pi)
    : P_(std::move(P)), n_(std::move(n)), family_(family), pi_(std::move(pi)) {
  digest_ = channel_digest(P_, n_, family_);
  degraded_base_ = digest_;
}

MarkovChannel MarkovChannel::create(TransitionMatrix P, NoiseVector n, SymbolFamily family) {
  if (n.size() != P.num_states())
    raise(errc::length_mismatch, "noise vector has " + std::to_string(n.size()) +
                                     " entries for " + std::to_string(P.num_states()) +
                                     " states");
  check_eta_range(n);
  StateDistribution pi = steady_state(P);  // throws NotRegular
  return MarkovChannel(std::move(P), std::move(n), family, std::move(pi));
}

MarkovChannel MarkovChannel::create_relaxed(TransitionMatrix P, NoiseVector n,
                                            SymbolFamily family) {
  if (n.size() != P.num_states())
    raise(errc::length_mismatch, "noise vector has " + std::to_string(n.size()) +
                                     " entries for " + std::to_string(P.num_states()) +
                                     " states");
  check_eta_range(n);
  std::optional<StateDistribution> pi;
  if (is_regular(P).regular) pi = steady_state(P);
  return MarkovChannel(std::move(P), std::move(n), family, std::move(pi));
}

const StateDistribution& MarkovChannel::steady() const {
  if (!pi_) raise(errc::not_regular, "channel has no steady state (non-regular chain)");
  return *pi_;
}

Trajectory sample_trajectory(const MarkovChannel& c, std::size_t n, InputDistribution input,
                             std::uint64_t seed, std::uint64_t stream) {
  if (n == 0) raise(errc::param_out_of_range, "trajectory length must be >= 1");
  const StateDistribution& pi = c.steady();  // throws NotRegular

  Trajectory traj;
  traj.seed = seed;
  traj.stream = stream;
  traj.x.resize(n);
  traj.s.resize(n);
  traj.y.resize(n);

  CounterRng rng(seed, stream);
  std::size_t state = pick(pi.probs, rng.next_unit());
  const double q = input.q();
  for (std::size_t t = 0; t < n; ++t) {
    const std::uint8_t x = rng.next_unit() < q ? 1 : 0;
    const bool flip = rng.next_unit() < c.noise()[state];
    traj.x[t] = x;
    traj.s[t] = static_cast<std::uint8_t>(state);
    traj.y[t] = flip ? x ^ 1 : x;
    if (t + 1 < n) state = pick(c.transition().matrix().row(state), rng.next_unit());
  }
  return traj;
}

double joint_log_likelihood(const MarkovChannel& c, std::span<const std::uint8_t> x,
                            std::span<const std::uint8_t> s, std::span<const std::uint8_t> y) {
  if (x.size() != y.size() || x.size() != s.size() || x.empty())
    raise(errc::length_mismatch, "x, s, y must have equal nonzero lengths");
  const StateDistribution& pi = c.steady();

  const double p1 = pi[s[0]];
  if (p1 == 0.0) return kNegInf;
  double log_p = std::log(p1);
  for (std::size_t t = 0; t < x.size(); ++t) {
    const double e = emission_prob(c.family(), c.noise()[s[t]], x[t], y[t]);
    if (e == 0.0) return kNegInf;
    log_p += std::log(e);
    if (t + 1 < x.size()) {
      const double p = c.transition()(s[t], s[t + 1]);
      if (p == 0.0) return kNegInf;
      log_p += std::log(p);
    }
  }
  return log_p;
}

}  // namespace fsmc
