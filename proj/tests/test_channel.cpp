#include <doctest.h>

#include <cmath>
#include <cstring>

#include "fsmc/channel.hpp"
#include "fsmc/rng.hpp"
#include "test_support.hpp"

using namespace fsmc;

TEST_CASE("philox 4x32-10 reproduces the reference vectors") {
  // Random123 known-answer vectors for philox4x32 with 10 rounds
  const auto zero = Philox4x32::block({0u, 0u, 0u, 0u}, {0u, 0u});
  CHECK(zero == Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

  const auto ones = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                      {0xffffffffu, 0xffffffffu});
  CHECK(ones == Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

  const auto pi_digits = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                           {0xa4093822u, 0x299f31d0u});
  CHECK(pi_digits == Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("counter rng streams are deterministic and disjoint") {
  CounterRng a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  bool all_equal_c = true, all_equal_d = true;
  for (int i = 0; i < 256; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    all_equal_c = all_equal_c && va == c.next_u64();
    all_equal_d = all_equal_d && va == d.next_u64();
  }
  CHECK_FALSE(all_equal_c);
  CHECK_FALSE(all_equal_d);

  CounterRng u(7, 7);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.next_unit();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("derive_seed separates salts") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(0, 0) != 0);
}

TEST_CASE("emission probabilities for the BSC family") {
  CHECK(emission_prob(SymbolFamily::bsc, 0.1, 0, 0) == doctest::Approx(0.9));
  CHECK(emission_prob(SymbolFamily::bsc, 0.5, 1, 0) == doctest::Approx(0.5));
  CHECK(emission_prob(SymbolFamily::bsc, 0.0, 1, 1) == doctest::Approx(1.0));

  // normalization over outputs across an eta grid
  for (double eta : {0.0, 0.2, 0.5, 0.8, 1.0})
    for (int x : {0, 1})
      CHECK(emission_prob(SymbolFamily::bsc, eta, x, 0) +
                emission_prob(SymbolFamily::bsc, eta, x, 1) ==
            doctest::Approx(1.0));

  CHECK_THROWS_AS(emission_prob(SymbolFamily::bsc, 1.5, 0, 0), Error);
  CHECK_THROWS_AS(emission_prob(SymbolFamily::bsc, 0.1, 2, 0), Error);
}

TEST_CASE("input distribution validates q") {
  CHECK(InputDistribution(0.25).q() == 0.25);
  CHECK_THROWS_AS(InputDistribution(-0.1), Error);
  CHECK_THROWS_AS(InputDistribution(1.1), Error);
}

TEST_CASE("channel construction enforces the invariants") {
  Matrix p(2, 2);
  p(0, 0) = 0.9;
  p(0, 1) = 0.1;
  p(1, 0) = 0.1;
  p(1, 1) = 0.9;

  CHECK_THROWS_AS(MarkovChannel::create(TransitionMatrix(p), NoiseVector{{0.1}}), Error);
  CHECK_THROWS_AS(MarkovChannel::create(TransitionMatrix(p), NoiseVector{{0.1, 1.3}}), Error);

  Matrix periodic(2, 2);
  periodic(0, 1) = 1.0;
  periodic(1, 0) = 1.0;
  CHECK_THROWS_AS(MarkovChannel::create(TransitionMatrix(periodic), NoiseVector{{0.1, 0.3}}),
                  Error);

  const auto relaxed =
      MarkovChannel::create_relaxed(TransitionMatrix(periodic), NoiseVector{{0.1, 0.3}});
  CHECK_FALSE(relaxed.regular());
  CHECK_THROWS_AS(relaxed.steady(), Error);
  CHECK_THROWS_AS(sample_trajectory(relaxed, 10, InputDistribution(0.5), 1), Error);

  const auto c = testing::example_channel();
  CHECK(c.regular());
  CHECK(c.steady()[0] == doctest::Approx(0.5));
  CHECK(c.degraded_base() == c.digest());
}

TEST_CASE("degenerate channels invert or copy their input exactly") {
  Matrix one(1, 1);
  one(0, 0) = 1.0;
  const auto noiseless =
      MarkovChannel::create(TransitionMatrix(one), NoiseVector{{0.0}});
  const auto inverter = MarkovChannel::create(TransitionMatrix(one), NoiseVector{{1.0}});

  const auto t0 = sample_trajectory(noiseless, 5, InputDistribution(0.5), 99);
  CHECK(t0.x == t0.y);
  const auto t1 = sample_trajectory(inverter, 5, InputDistribution(0.5), 99);
  for (std::size_t i = 0; i < t1.x.size(); ++i) CHECK(t1.y[i] == (t1.x[i] ^ 1));
}

TEST_CASE("trajectories are reproducible bytes and stream-separated") {
  const auto c = testing::example_channel();
  const auto a = sample_trajectory(c, 1000, InputDistribution(0.5), 5, 0);
  const auto b = sample_trajectory(c, 1000, InputDistribution(0.5), 5, 0);
  CHECK(a.x == b.x);
  CHECK(a.s == b.s);
  CHECK(a.y == b.y);

  const auto other = sample_trajectory(c, 1000, InputDistribution(0.5), 5, 1);
  CHECK(a.y != other.y);

  CHECK_THROWS_AS(sample_trajectory(c, 0, InputDistribution(0.5), 5), Error);
}

TEST_CASE("long-run state occupancy and error rate match the steady state") {
  const auto c = testing::example_channel();
  const std::size_t n = 1000000;
  const auto traj = sample_trajectory(c, n, InputDistribution(0.5), 2718);

  std::size_t in_state0 = 0, errors = 0;
  for (std::size_t t = 0; t < n; ++t) {
    in_state0 += traj.s[t] == 0;
    errors += traj.x[t] != traj.y[t];
  }
  // the chain's correlation (second eigenvalue 0.8) shrinks the effective
  // sample size by (1+0.8)/(1-0.8) = 9
  const double n_eff = static_cast<double>(n) / 9.0;
  const double occ = static_cast<double>(in_state0) / static_cast<double>(n);
  CHECK(std::abs(occ - 0.5) < 5.0 * std::sqrt(0.25 / n_eff));

  const double err_rate = static_cast<double>(errors) / static_cast<double>(n);
  CHECK(std::abs(err_rate - 0.2) < 5.0 * std::sqrt(0.16 / n_eff));
}

TEST_CASE("inputs are independent of the hidden state") {
  const auto c = testing::example_channel();
  const std::size_t n = 1000000;
  const auto traj = sample_trajectory(c, n, InputDistribution(0.5), 424242);

  double mean_x = 0.0, mean_s = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    mean_x += traj.x[t];
    mean_s += traj.s[t];
  }
  mean_x /= static_cast<double>(n);
  mean_s /= static_cast<double>(n);
  double cov = 0.0, var_x = 0.0, var_s = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    cov += (traj.x[t] - mean_x) * (traj.s[t] - mean_s);
    var_x += (traj.x[t] - mean_x) * (traj.x[t] - mean_x);
    var_s += (traj.s[t] - mean_s) * (traj.s[t] - mean_s);
  }
  const double corr = cov / std::sqrt(var_x * var_s);
  CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("joint likelihood reduces to emissions for a single state") {
  Matrix one(1, 1);
  one(0, 0) = 1.0;
  const auto c = MarkovChannel::create(TransitionMatrix(one), NoiseVector{{0.1}});
  const std::vector<std::uint8_t> x{0, 1, 0}, s{0, 0, 0}, y{0, 1, 1};
  const double expected = std::log(0.9) + std::log(0.9) + std::log(0.1);
  CHECK(joint_log_likelihood(c, x, s, y) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("joint likelihood flags impossible paths and bad lengths") {
  // regular chain with a structural zero: state 0 can never stay put
  Matrix p(2, 2);
  p(0, 1) = 1.0;
  p(1, 0) = 0.5;
  p(1, 1) = 0.5;
  const auto c = MarkovChannel::create(TransitionMatrix(p), NoiseVector{{0.1, 0.3}});

  const std::vector<std::uint8_t> x{0, 0}, y{0, 0};
  const std::vector<std::uint8_t> impossible{0, 0};
  CHECK(joint_log_likelihood(c, x, impossible, y) ==
        -std::numeric_limits<double>::infinity());
  const std::vector<std::uint8_t> possible{0, 1};
  CHECK(std::isfinite(joint_log_likelihood(c, x, possible, y)));

  const std::vector<std::uint8_t> shorter{0};
  CHECK_THROWS_AS(joint_log_likelihood(c, x, shorter, y), Error);
}
