#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fsmc/inference.hpp"
#include "fsmc/ordering.hpp"

namespace fsmc {

inline constexpr const char* kToolVersion = "0.1.0";

/// Channel definition document: {"family":"bsc","P":[[...]],"n":[...]}.
/// Row-stochastic and parameter-range invariants are enforced on load;
/// non-regular chains are accepted but come back flagged.
MarkovChannel channel_from_json(const nlohmann::json& j);
nlohmann::json channel_to_json(const MarkovChannel& c);
MarkovChannel load_channel(const std::filesystem::path& path);

/// Recipe document: a JSON list applied left to right, e.g.
///   [{"op":"concat_bsc","p":0.1},{"op":"mix","mu12":0.1,"mu21":0.1}]
/// A mix step may name another channel file via "with"; relative paths
/// resolve against the recipe file's directory (or base_dir for in-memory
/// documents).
DegradationRecipe recipe_from_json(const nlohmann::json& j,
                                   const std::filesystem::path& base_dir = {});
DegradationRecipe load_recipe(const std::filesystem::path& path);

/// Formats a double with enough digits to round-trip; used everywhere a
/// number lands in an output artifact so reruns are byte-identical.
std::string format_double(double v);

/// RFC 4180 CSV writer: fields quoted when needed, CRLF record separators.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

/// One plotted series: points at (x, y) with optional symmetric error bars.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> yerr;  // empty or same length as y
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool zero_line = false;
  /// Embedded provenance, written into the SVG metadata element.
  std::string metadata;
};

/// Minimal self-contained SVG line plot (no external assets, no scripts).
void write_svg_plot(std::ostream& out, const std::vector<PlotSeries>& series,
                    const PlotOptions& options);

/// Experiment configuration: a JSON file with CLI-flag overrides (flags win).
struct ExperimentConfig {
  std::string channel_path;
  std::optional<std::string> recipe_path;
  double q = 0.5;
  std::size_t n = 1000000;
  int trials = 20;
  std::uint64_t seed = 1;
  int workers = 1;
  int k_max = 8;
  std::string out_dir = "out";
  /// Axis of mu values; ordering checks use the cartesian square.
  std::vector<double> mu_axis;
  /// Sweep axis: parameter name ("bsc_p" or "mu") plus values.
  std::optional<std::pair<std::string, std::vector<double>>> sweep;
};

ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON rendering of the effective configuration.
nlohmann::json config_to_json(const ExperimentConfig& config);

/// FNV-1a hash of the canonical configuration dump, as fixed-width hex.
std::string config_hash(const ExperimentConfig& config);

}  // namespace fsmc
