#include "fsmc/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "fsmc/inference.hpp"
#include "fsmc/io.hpp"
#include "fsmc/rng.hpp"

namespace fsmc {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitError = 2;

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> channel;
  std::optional<std::string> recipe;
  std::optional<double> q;
  std::optional<std::size_t> n;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<int> k_max;
  std::optional<std::string> out_dir;
  std::vector<double> mu_axis;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "experiment config JSON; flags override it");
  cmd->add_option("--channel", flags.channel, "channel definition JSON");
  cmd->add_option("--recipe", flags.recipe, "degradation recipe JSON");
  cmd->add_option("--q", flags.q, "probability of input symbol 1");
  cmd->add_option("--n", flags.n, "block length per trial");
  cmd->add_option("--trials", flags.trials, "Monte Carlo trials");
  cmd->add_option("--seed", flags.seed, "master RNG seed");
  cmd->add_option("--workers", flags.workers, "worker threads (never affects results)");
  cmd->add_option("--k-max", flags.k_max, "largest exact block length");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--mu", flags.mu_axis, "mu axis values; ordering uses the cartesian square");
}

ExperimentConfig effective_config(const CommonFlags& flags) {
  ExperimentConfig config;
  if (!flags.config_path.empty()) config = load_config(flags.config_path);
  if (flags.channel) config.channel_path = *flags.channel;
  if (flags.recipe) config.recipe_path = *flags.recipe;
  if (flags.q) config.q = *flags.q;
  if (flags.n) config.n = *flags.n;
  if (flags.trials) config.trials = *flags.trials;
  if (flags.seed) config.seed = *flags.seed;
  if (flags.workers) config.workers = *flags.workers;
  if (flags.k_max) config.k_max = *flags.k_max;
  if (flags.out_dir) config.out_dir = *flags.out_dir;
  if (!flags.mu_axis.empty()) config.mu_axis = flags.mu_axis;
  if (config.channel_path.empty())
    raise(errc::bad_config, "no channel given (config \"channel\" or --channel)");
  return config;
}

MarkovChannel load_regular_channel(const std::string& path, std::ostream& err) {
  MarkovChannel c = load_channel(path);
  if (!c.regular()) raise(errc::not_regular, path + " defines a non-regular chain");
  (void)err;
  return c;
}

MarkovChannel resolve_degraded(const MarkovChannel& base, const ExperimentConfig& config) {
  if (!config.recipe_path) return base;  // identity recipe: c* = c
  return apply_recipe(base, load_recipe(*config.recipe_path));
}

std::ofstream open_output(const ExperimentConfig& config, const std::string& name) {
  std::filesystem::create_directories(config.out_dir);
  const auto path = std::filesystem::path(config.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(errc::bad_file, "cannot write " + path.string());
  return out;
}

std::string channel_id(const MarkovChannel& c) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(c.digest()));
  return buf;
}

void warn_small_n(const ExperimentConfig& config, std::ostream& err) {
  if (config.n < 1000)
    err << "warning: n = " << config.n << " is small; estimates will be noisy\n";
}

std::string mu_grid_csv_name(const MixParams& mu) {
  return format_double(mu.mu12) + "," + format_double(mu.mu21);
}

int cmd_mix(const std::string& path1, const std::string& path2, double mu12, double mu21,
            std::ostream& out, std::ostream& err) {
  const MarkovChannel c1 = load_channel(path1);
  const MarkovChannel c2 = load_channel(path2);
  const MarkovChannel mixed = mix(c1, c2, MixParams{mu12, mu21});
  if (!mixed.regular())
    err << "warning: mixed channel is not regular (boundary mu produces a reducible chain)\n";
  out << channel_to_json(mixed).dump(2) << "\n";
  return kExitOk;
}

int cmd_apply(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  const ExperimentConfig config = effective_config(flags);
  const MarkovChannel base = load_channel(config.channel_path);
  if (!config.recipe_path) raise(errc::bad_config, "apply needs a recipe (--recipe)");
  const MarkovChannel degraded = apply_recipe(base, load_recipe(*config.recipe_path));
  if (!degraded.regular()) err << "warning: the resulting channel is not regular\n";
  out << channel_to_json(degraded).dump(2) << "\n";
  return kExitOk;
}

int cmd_steady_state(const std::string& path, std::ostream& out) {
  const MarkovChannel c = load_channel(path);
  if (!c.regular()) raise(errc::not_regular, path + " defines a non-regular chain");
  nlohmann::json j;
  j["pi"] = c.steady().probs;
  out << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_mi(const CommonFlags& flags, bool check_convergence, std::ostream& out,
           std::ostream& err) {
  const ExperimentConfig config = effective_config(flags);
  warn_small_n(config, err);
  const MarkovChannel base = load_regular_channel(config.channel_path, err);
  const MarkovChannel c = resolve_degraded(base, config);
  const InputDistribution input(config.q);

  const MIEstimate est =
      estimate_mi_rate(c, input, config.n, config.trials, config.seed, config.workers);
  const double lower = memoryless_lower_bound(c, input);
  const double upper = genie_state_upper_bound(c, input);

  if (check_convergence) {
    const std::size_t n_small = std::max<std::size_t>(1000, config.n / 10);
    const MIEstimate small = estimate_mi_rate(c, input, n_small, config.trials,
                                              derive_seed(config.seed, 0x6d69), config.workers);
    const double gap = std::abs(est.rate_bits - small.rate_bits);
    const double se = std::hypot(est.std_error, small.std_error);
    if (gap > 3.0 * se)
      err << "warning: rate at n and n/10 differ by " << format_double(gap) << " (> 3*"
          << format_double(se) << "); block length may be too short for the asymptotic rate\n";
  }

  const std::vector<std::string> header = {"channel_id", "q",         "n",
                                           "trials",     "seed",      "rate_bits",
                                           "std_error",  "lower_bound", "upper_bound",
                                           "config_hash", "tool_version"};
  const std::vector<std::string> row = {channel_id(c),
                                        format_double(config.q),
                                        std::to_string(config.n),
                                        std::to_string(config.trials),
                                        std::to_string(config.seed),
                                        format_double(est.rate_bits),
                                        format_double(est.std_error),
                                        format_double(lower),
                                        format_double(upper),
                                        config_hash(config),
                                        kToolVersion};
  auto file = open_output(config, "mi.csv");
  CsvWriter csv(file);
  csv.row(header);
  csv.row(row);
  CsvWriter echo(out);
  echo.row(header);
  echo.row(row);
  return kExitOk;
}

int cmd_order(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  const ExperimentConfig config = effective_config(flags);
  warn_small_n(config, err);
  if (config.mu_axis.empty())
    raise(errc::bad_config, "order needs a mu grid (config \"mu_grid\" or --mu)");
  const MarkovChannel c = load_regular_channel(config.channel_path, err);
  const MarkovChannel c_star = resolve_degraded(c, config);

  std::vector<MixParams> grid;
  for (double a : config.mu_axis)
    for (double b : config.mu_axis) grid.push_back(MixParams{a, b});

  McConfig mc;
  mc.n = config.n;
  mc.trials = config.trials;
  mc.seed = config.seed;
  mc.workers = config.workers;
  const OrderingReport report = check_theorem1(c, c_star, grid, InputDistribution(config.q), mc);
  if (!report.certified)
    err << "warning: UncertifiedDegradation: the degraded channel was not built from the base "
           "channel by this tool; membership in the degraded family is asserted, not certified\n";

  const std::string hash = config_hash(config);
  auto file = open_output(config, "order.csv");
  CsvWriter csv(file);
  csv.row({"mu12", "mu21", "rate_base", "se_base", "rate_mixed", "se_mixed", "margin",
           "combined_se", "verdict", "seed", "config_hash", "tool_version"});
  for (const OrderingPoint& p : report.points)
    csv.row({format_double(p.mu.mu12), format_double(p.mu.mu21),
             format_double(report.base.rate_bits), format_double(report.base.std_error),
             format_double(p.mixed.rate_bits), format_double(p.mixed.std_error),
             format_double(p.margin), format_double(p.combined_se), verdict_name(p.verdict),
             std::to_string(config.seed), hash, kToolVersion});

  PlotSeries margins;
  margins.label = "margin +/- 2SE";
  for (std::size_t g = 0; g < report.points.size(); ++g) {
    margins.x.push_back(static_cast<double>(g));
    margins.y.push_back(report.points[g].margin);
    margins.yerr.push_back(2.0 * report.points[g].combined_se);
  }
  PlotOptions opts;
  opts.title = "rate margin, base vs mixed";
  opts.x_label = "mu grid point index";
  opts.y_label = "margin (bits/use)";
  opts.zero_line = true;
  opts.metadata = "seed=" + std::to_string(config.seed) + " config_hash=" + hash +
                  " tool_version=" + kToolVersion;
  auto svg = open_output(config, "order_margins.svg");
  write_svg_plot(svg, {margins}, opts);

  for (const OrderingPoint& p : report.points)
    out << "mu=(" << mu_grid_csv_name(p.mu) << ") margin=" << format_double(p.margin)
        << " combined_se=" << format_double(p.combined_se) << " " << verdict_name(p.verdict)
        << "\n";
  return report.any_violation ? kExitViolation : kExitOk;
}

int cmd_lemma1(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  const ExperimentConfig config = effective_config(flags);
  warn_small_n(config, err);
  const MarkovChannel base = load_regular_channel(config.channel_path, err);
  const MarkovChannel c = resolve_degraded(base, config);

  McConfig mc;
  mc.n = config.n;
  mc.trials = config.trials;
  mc.seed = config.seed;
  mc.workers = config.workers;
  const Lemma1Report report = check_lemma1(c, config.k_max, InputDistribution(config.q), mc);

  const std::string hash = config_hash(config);
  auto file = open_output(config, "lemma1.csv");
  CsvWriter csv(file);
  csv.row({"k", "exact_rate_bits", "mc_rate_bits", "mc_se", "margin", "violation", "seed",
           "config_hash", "tool_version"});
  for (const Lemma1Row& row : report.rows) {
    csv.row({std::to_string(row.k), format_double(row.exact_rate_bits),
             format_double(row.mc_rate_bits), format_double(row.mc_std_error),
             format_double(row.margin), row.violated ? "true" : "false",
             std::to_string(config.seed), hash, kToolVersion});
    out << "k=" << row.k << " exact=" << format_double(row.exact_rate_bits)
        << " mc=" << format_double(row.mc_rate_bits) << " margin=" << format_double(row.margin)
        << (row.violated ? " VIOLATED" : "") << "\n";
  }
  return report.any_violation ? kExitViolation : kExitOk;
}

int cmd_sweep(const CommonFlags& flags, const std::optional<std::string>& param_flag,
              const std::vector<double>& values_flag, std::ostream& out, std::ostream& err) {
  ExperimentConfig config = effective_config(flags);
  if (param_flag || !values_flag.empty()) {
    if (!param_flag || values_flag.empty())
      raise(errc::bad_config, "sweep flags need both --param and --values");
    config.sweep = {*param_flag, values_flag};
  }
  if (!config.sweep) raise(errc::bad_config, "sweep needs an axis (config \"sweep\" or flags)");
  const auto& [param, values] = *config.sweep;
  if (values.empty()) raise(errc::empty_sweep, "sweep axis has no values");
  if (param != "bsc_p" && param != "mu")
    raise(errc::bad_config, "unknown sweep parameter \"" + param + "\" (bsc_p or mu)");
  warn_small_n(config, err);

  const MarkovChannel c = load_regular_channel(config.channel_path, err);
  const MarkovChannel c_star = resolve_degraded(c, config);
  const InputDistribution input(config.q);

  const std::string hash = config_hash(config);
  auto file = open_output(config, "sweep.csv");
  CsvWriter csv(file);
  csv.row({"param", "value", "rate_bits", "std_error", "seed", "config_hash", "tool_version"});

  PlotSeries series;
  series.label = param;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    const MarkovChannel swept =
        param == "bsc_p" ? concat_bsc(c, v) : mix(c, c_star, MixParams{v, v});
    if (!swept.regular())
      raise(errc::not_regular, "sweep value " + format_double(v) + " gives a non-regular chain");
    const MIEstimate est = estimate_mi_rate(swept, input, config.n, config.trials,
                                            derive_seed(config.seed, i), config.workers);
    csv.row({param, format_double(v), format_double(est.rate_bits),
             format_double(est.std_error), std::to_string(config.seed), hash, kToolVersion});
    out << param << "=" << format_double(v) << " rate=" << format_double(est.rate_bits)
        << " se=" << format_double(est.std_error) << "\n";
    series.x.push_back(v);
    series.y.push_back(est.rate_bits);
    series.yerr.push_back(2.0 * est.std_error);
  }

  PlotOptions opts;
  opts.title = "mutual-information rate sweep";
  opts.x_label = param;
  opts.y_label = "rate (bits/use)";
  opts.metadata = "seed=" + std::to_string(config.seed) + " config_hash=" + hash +
                  " tool_version=" + kToolVersion;
  auto svg = open_output(config, "sweep.svg");
  write_svg_plot(svg, {series}, opts);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"finite-state Markov channel construction, degradation and "
               "mutual-information ordering checks"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  auto* mix_cmd = app.add_subcommand("mix", "mix two channels' hidden state machines");
  std::string mix_ch1, mix_ch2;
  double mix_mu12 = 0.0, mix_mu21 = 0.0;
  mix_cmd->add_option("channel1", mix_ch1, "first channel JSON")->required();
  mix_cmd->add_option("channel2", mix_ch2, "second channel JSON")->required();
  mix_cmd->add_option("mu12", mix_mu12, "jump probability machine 1 -> 2")->required();
  mix_cmd->add_option("mu21", mix_mu21, "jump probability machine 2 -> 1")->required();

  auto* steady_cmd = app.add_subcommand("steady-state", "print a channel's steady state");
  std::string steady_ch;
  steady_cmd->add_option("channel", steady_ch, "channel JSON")->required();

  CommonFlags apply_flags;
  auto* apply_cmd =
      app.add_subcommand("apply", "apply a degradation recipe and print the channel");
  add_common_flags(apply_cmd, apply_flags);

  CommonFlags mi_flags;
  bool mi_check_convergence = false;
  auto* mi_cmd = app.add_subcommand("mi", "estimate the mutual-information rate");
  add_common_flags(mi_cmd, mi_flags);
  mi_cmd->add_flag("--check-convergence", mi_check_convergence,
                   "also estimate at n/10 and warn if the rates disagree");

  CommonFlags order_flags;
  auto* order_cmd =
      app.add_subcommand("order", "check the mixing-degradation ordering over a mu grid");
  add_common_flags(order_cmd, order_flags);

  CommonFlags lemma_flags;
  auto* lemma_cmd =
      app.add_subcommand("lemma1", "compare exact truncated-block rates against the MC rate");
  add_common_flags(lemma_cmd, lemma_flags);

  CommonFlags sweep_flags;
  std::optional<std::string> sweep_param;
  std::vector<double> sweep_values;
  auto* sweep_cmd = app.add_subcommand("sweep", "estimate rates along a parameter axis");
  add_common_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--param", sweep_param, "swept parameter: bsc_p or mu");
  sweep_cmd->add_option("--values", sweep_values, "swept values");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (mix_cmd->parsed()) return cmd_mix(mix_ch1, mix_ch2, mix_mu12, mix_mu21, out, err);
    if (steady_cmd->parsed()) return cmd_steady_state(steady_ch, out);
    if (apply_cmd->parsed()) return cmd_apply(apply_flags, out, err);
    if (mi_cmd->parsed()) return cmd_mi(mi_flags, mi_check_convergence, out, err);
    if (order_cmd->parsed()) return cmd_order(order_flags, out, err);
    if (lemma_cmd->parsed()) return cmd_lemma1(lemma_flags, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_flags, sweep_param, sweep_values, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace fsmc
