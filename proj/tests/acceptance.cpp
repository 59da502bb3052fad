// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Criteria cover the worked Gilbert-Elliott example end to end:
// exact operator algebra, steady states, estimator calibration against
// closed forms, the degradation-ordering and truncated-block checks, oracle
// equivalence of the forward recursion, and byte-level reproducibility of
// the CLI outputs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fsmc/cli.hpp"
#include "fsmc/inference.hpp"
#include "fsmc/io.hpp"
#include "test_support.hpp"

using namespace fsmc;
namespace fs = std::filesystem;

namespace {

int failures = 0;

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void report(int id, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%s] criterion %2d: %s — %s (%.2f s)\n", pass ? "PASS" : "FAIL", id,
              name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

void run_criterion(int id, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& body) {
  const double t0 = now_seconds();
  bool pass = false;
  std::string detail;
  try {
    std::tie(pass, detail) = body();
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("exception: ") + e.what();
  }
  report(id, name, pass, detail, now_seconds() - t0);
}

MarkovChannel star_channel() {
  Matrix p(2, 2);
  p(0, 0) = 0.9;
  p(0, 1) = 0.1;
  p(1, 0) = 0.1;
  p(1, 1) = 0.9;
  return MarkovChannel::create(TransitionMatrix(p), NoiseVector{{0.18, 0.34}});
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main() {
  const fs::path data_dir = FSMC_DATA_DIR;
  const auto c = testing::example_channel();
  const InputDistribution half(0.5);

  // reference values from the binary-entropy oracle
  const double rate_bsc01 = 1.0 - binary_entropy(0.1);        // 0.531004...
  const double lower_example = 1.0 - binary_entropy(0.2);     // 0.278072...
  const double upper_example =
      0.5 * (1.0 - binary_entropy(0.1)) + 0.5 * (1.0 - binary_entropy(0.3));  // 0.324857...

  run_criterion(1, "mixing operator reproduces the worked 4-state channel", [&] {
    const auto c_star = star_channel();
    (void)mix(c, c_star, MixParams{0.1, 0.1});  // warm-up
    const auto t0 = std::chrono::steady_clock::now();
    const auto mixed = mix(c, c_star, MixParams{0.1, 0.1});
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();

    const double expected[4][4] = {{0.81, 0.09, 0.05, 0.05},
                                   {0.09, 0.81, 0.05, 0.05},
                                   {0.05, 0.05, 0.81, 0.09},
                                   {0.05, 0.05, 0.09, 0.81}};
    const double expected_noise[4] = {0.1, 0.3, 0.18, 0.34};
    double worst = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      worst = std::max(worst, std::abs(mixed.noise()[i] - expected_noise[i]));
      for (std::size_t j = 0; j < 4; ++j)
        worst = std::max(worst, std::abs(mixed.transition()(i, j) - expected[i][j]));
    }
    const bool pass = mixed.num_states() == 4 && worst <= 1e-12 && ms < 1.0;
    return std::pair{pass, "max entry error " + fmt(worst) + ", " + fmt(ms) + " ms"};
  });

  run_criterion(2, "BSC concatenation reproduces the degraded noise vector", [&] {
    (void)concat_bsc(c, 0.1);
    const auto t0 = std::chrono::steady_clock::now();
    const auto c_star = concat_bsc(c, 0.1);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    const double err = std::max(std::abs(c_star.noise()[0] - 0.18),
                                std::abs(c_star.noise()[1] - 0.34));

    // composing with mix reproduces criterion 1's channel
    const auto mixed = mix(c, c_star, MixParams{0.1, 0.1});
    const auto reference = mix(c, star_channel(), MixParams{0.1, 0.1});
    double compose_err = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      compose_err = std::max(compose_err, std::abs(mixed.noise()[i] - reference.noise()[i]));
      for (std::size_t j = 0; j < 4; ++j)
        compose_err = std::max(
            compose_err, std::abs(mixed.transition()(i, j) - reference.transition()(i, j)));
    }
    const bool pass = err <= 1e-15 && compose_err <= 1e-12 && ms < 1.0;
    return std::pair{pass, "noise error " + fmt(err) + ", composition error " +
                               fmt(compose_err) + ", " + fmt(ms) + " ms"};
  });

  run_criterion(3, "steady states and the mixed composition law", [&] {
    const auto pi = c.steady();
    double err = std::max(std::abs(pi[0] - 0.5), std::abs(pi[1] - 0.5));

    const auto mixed = mix(c, star_channel(), MixParams{0.1, 0.1});
    for (std::size_t i = 0; i < 4; ++i)
      err = std::max(err, std::abs(mixed.steady()[i] - 0.25));

    // residual of pi P = pi on the 4-state chain
    double residual = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < 4; ++i) acc += mixed.steady()[i] * mixed.transition()(i, j);
      residual = std::max(residual, std::abs(acc - mixed.steady()[j]));
    }

    CounterRng rng(1812, 0);
    double law_err = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      const auto c1 = testing::random_regular_channel(rng, 2 + rep % 3);
      const auto c2 = testing::random_regular_channel(rng, 2 + (rep + 1) % 3);
      const double mu12 = 0.05 + 0.9 * rng.next_unit();
      const double mu21 = 0.05 + 0.9 * rng.next_unit();
      const auto m = mix(c1, c2, MixParams{mu12, mu21});
      const double a = mu21 / (mu12 + mu21);
      for (std::size_t i = 0; i < c1.num_states(); ++i)
        law_err = std::max(law_err, std::abs(m.steady()[i] - a * c1.steady()[i]));
      for (std::size_t i = 0; i < c2.num_states(); ++i)
        law_err = std::max(law_err, std::abs(m.steady()[c1.num_states() + i] -
                                             (1.0 - a) * c2.steady()[i]));
    }
    const bool pass = err < 1e-10 && residual < 1e-10 && law_err < 1e-9;
    return std::pair{pass, "pi error " + fmt(err) + ", residual " + fmt(residual) +
                               ", composition-law error " + fmt(law_err) + " over 100 pairs"};
  });

  run_criterion(4, "estimator calibration on the memoryless BSC(0.1)", [&] {
    Matrix one(1, 1);
    one(0, 0) = 1.0;
    const auto bsc = MarkovChannel::create(TransitionMatrix(one), NoiseVector{{0.1}});
    const auto est = estimate_mi_rate(bsc, half, 1000000, 20, 20260101);
    const double target = 0.53101;
    const bool pass = std::abs(est.rate_bits - target) <= 3.0 * est.std_error &&
                      est.std_error < 2e-3 && est.wall_seconds < 60.0;
    return std::pair{pass, "rate " + fmt(est.rate_bits) + " vs " + fmt(target) + " (oracle " +
                               fmt(rate_bsc01) + "), se " + fmt(est.std_error)};
  });

  run_criterion(5, "estimate sits between the sandwich bounds", [&] {
    const auto est = estimate_mi_rate(c, half, 1000000, 20, 20260102);
    const double lo = 0.27807 - 3.0 * est.std_error;
    const double hi = 0.32486 + 3.0 * est.std_error;
    const bool pass = est.rate_bits >= lo && est.rate_bits <= hi;
    return std::pair{pass, "rate " + fmt(est.rate_bits) + " in [" + fmt(lo) + ", " + fmt(hi) +
                               "] (oracle bounds " + fmt(lower_example) + ", " +
                               fmt(upper_example) + "), se " + fmt(est.std_error)};
  });

  run_criterion(6, "degradation ordering over the 3x3 mu grid", [&] {
    const auto c_star = concat_bsc(c, 0.1);
    std::vector<MixParams> grid;
    for (double a : {0.1, 0.3, 0.5})
      for (double b : {0.1, 0.3, 0.5}) grid.push_back(MixParams{a, b});
    McConfig mc;
    mc.n = 100000;
    mc.trials = 20;
    mc.seed = 20260103;
    mc.workers = 2;
    const auto report = check_theorem1(c, c_star, grid, half, mc);
    int confirmed = 0;
    double worst_margin_sigma = 1e9;
    for (const auto& p : report.points) {
      confirmed += p.verdict == Verdict::confirmed;
      worst_margin_sigma = std::min(worst_margin_sigma, p.margin / p.combined_se);
    }
    const bool pass =
        report.certified && !report.any_violation && confirmed >= 7 &&
        static_cast<int>(report.points.size()) == 9;
    return std::pair{pass, std::to_string(confirmed) + "/9 confirmed, no violation, worst "
                               "margin " +
                               fmt(worst_margin_sigma) + " sigma"};
  });

  run_criterion(7, "truncated blocks never beat the asymptotic rate", [&] {
    McConfig mc;
    mc.n = 100000;
    mc.trials = 20;
    mc.seed = 20260104;
    mc.workers = 2;
    const auto report = check_lemma1(c, 8, half, mc);
    const double k1_err = std::abs(report.rows[0].exact_rate_bits - lower_example);
    double worst_margin = 1e9;
    for (const auto& row : report.rows)
      worst_margin = std::min(worst_margin, row.margin / row.mc_std_error);
    const bool pass = !report.any_violation && report.rows.size() == 8 && k1_err <= 1e-6;
    return std::pair{pass, "k=1 exact " + fmt(report.rows[0].exact_rate_bits) +
                               " (oracle gap " + fmt(k1_err) + "), worst margin " +
                               fmt(worst_margin) + " sigma, rate " +
                               fmt(report.estimate.rate_bits)};
  });

  run_criterion(8, "forward recursion equals brute-force enumeration", [&] {
    CounterRng rng(20260105, 0);
    double worst = 0.0;
    for (int rep = 0; rep < 500; ++rep) {
      const std::size_t states = 2 + rng.next_u64() % 3;  // 2..4
      const auto chan = testing::random_regular_channel(rng, states, 0.02, 0.6);
      const std::size_t len = 3 + rng.next_u64() % 6;  // 3..8
      std::vector<std::uint8_t> x(len), y(len);
      for (auto& b : x) b = rng.next_u64() & 1;
      for (auto& b : y) b = rng.next_u64() & 1;
      const double q = 0.2 + 0.6 * rng.next_unit();

      const double rel_x = std::abs(std::expm1(
          forward_log_f_y_given_x(chan, x, y) - std::log(testing::enum_f_y_given_x(chan, x, y))));
      const double rel_y = std::abs(std::expm1(forward_log_f_y(chan, InputDistribution(q), y) -
                                               std::log(testing::enum_f_y(chan, q, y))));
      worst = std::max({worst, rel_x, rel_y});
    }
    return std::pair{worst < 1e-10,
                     "worst relative error " + fmt(worst) + " over 500 cases"};
  });

  run_criterion(9, "rates fall along the recursive degradation chain", [&] {
    const auto chain = build_degraded_chain(c, 2, MixParams{0.1, 0.1}, 0.1);
    McConfig mc;
    const std::size_t n = 100000;
    const int trials = 20;
    const auto base = estimate_mi_rate(c, half, n, trials, derive_seed(20260106, 0), 2);
    const auto four = estimate_mi_rate(chain[0], half, n, trials, derive_seed(20260106, 1), 2);
    const auto six = estimate_mi_rate(chain[1], half, n, trials, derive_seed(20260106, 2), 2);

    const double se_bf = std::hypot(base.std_error, four.std_error);
    const double se_fs = std::hypot(four.std_error, six.std_error);
    const bool pass = chain[0].num_states() == 4 && chain[1].num_states() == 6 &&
                      base.rate_bits >= four.rate_bits - 2.0 * se_bf &&
                      four.rate_bits >= six.rate_bits - 2.0 * se_fs;
    return std::pair{pass, "rates " + fmt(base.rate_bits) + " >= " + fmt(four.rate_bits) +
                               " >= " + fmt(six.rate_bits) + " (2se " + fmt(2 * se_bf) + ", " +
                               fmt(2 * se_fs) + ")"};
  });

  run_criterion(10, "d-step deviation decays as 0.8^d on the worked chain", [&] {
    double worst = 0.0;
    for (std::size_t d = 1; d <= 30; ++d)
      worst = std::max(worst,
                       std::abs(d_step_deviation(c.transition(), d).delta - std::pow(0.8, d)));
    return std::pair{worst <= 1e-9, "max |delta(d) - 0.8^d| = " + fmt(worst) + " for d <= 30"};
  });

  run_criterion(11, "order subcommand is byte-identical across worker counts", [&] {
    const fs::path out1 = fs::temp_directory_path() / "fsmc_acc_order_w1";
    const fs::path out4 = fs::temp_directory_path() / "fsmc_acc_order_w4";
    fs::remove_all(out1);
    fs::remove_all(out4);
    auto args = [&](const fs::path& out, const char* workers) {
      return std::vector<std::string>{"order",
                                      "--channel",
                                      (data_dir / "gilbert_elliott.json").string(),
                                      "--recipe",
                                      (data_dir / "concat_bsc_01.json").string(),
                                      "--mu",
                                      "0.1",
                                      "--mu",
                                      "0.4",
                                      "--n",
                                      "20000",
                                      "--trials",
                                      "8",
                                      "--seed",
                                      "20260107",
                                      "--workers",
                                      workers,
                                      "--out",
                                      out.string()};
    };
    std::ostringstream sink1, sink4, err1, err4;
    const int rc1 = run_cli(args(out1, "1"), sink1, err1);
    const int rc4 = run_cli(args(out4, "4"), sink4, err4);
    const std::string csv1 = read_file(out1 / "order.csv");
    const std::string csv4 = read_file(out4 / "order.csv");
    const bool pass = rc1 == 0 && rc4 == 0 && !csv1.empty() && csv1 == csv4 &&
                      sink1.str() == sink4.str();
    return std::pair{pass, "exit codes " + std::to_string(rc1) + "/" + std::to_string(rc4) +
                               ", csv bytes " + std::to_string(csv1.size()) +
                               (csv1 == csv4 ? " identical" : " DIFFER")};
  });

  std::printf("acceptance: %d/11 criteria passed\n", 11 - failures);
  return failures;
}
