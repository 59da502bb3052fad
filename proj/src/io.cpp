#include "fsmc/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace fsmc {

namespace {

nlohmann::json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(errc::bad_file, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(errc::bad_file, path.string() + ": " + e.what());
  }
  return j;
}

double require_number(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number())
    raise(errc::bad_config, "missing numeric field \"" + key + "\"");
  return j[key].get<double>();
}

std::vector<double> number_list(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array()) raise(errc::bad_config, what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) raise(errc::bad_config, what + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

/// Accepts either a plain list of values or {"linspace":[lo,hi,count]}.
std::vector<double> axis_values(const nlohmann::json& j, const std::string& what) {
  if (j.is_object() && j.contains("linspace")) {
    const auto spec = number_list(j["linspace"], what + ".linspace");
    if (spec.size() != 3 || spec[2] < 1 || spec[2] != std::floor(spec[2]))
      raise(errc::bad_config, what + ".linspace must be [lo, hi, count]");
    const auto count = static_cast<std::size_t>(spec[2]);
    std::vector<double> out;
    if (count == 1) {
      out.push_back(spec[0]);
    } else {
      for (std::size_t i = 0; i < count; ++i)
        out.push_back(spec[0] + (spec[1] - spec[0]) * static_cast<double>(i) /
                                    static_cast<double>(count - 1));
    }
    return out;
  }
  return number_list(j, what);
}

}  // namespace

MarkovChannel channel_from_json(const nlohmann::json& j) {
  if (!j.is_object()) raise(errc::bad_file, "channel document must be a JSON object");
  const std::string family = j.value("family", "");
  if (family != "bsc")
    raise(errc::bad_file, "unsupported channel family \"" + family + "\" (expected \"bsc\")");
  if (!j.contains("P") || !j["P"].is_array() || !j.contains("n"))
    raise(errc::bad_file, "channel document needs \"P\" (matrix) and \"n\" (vector)");

  const auto& rows = j["P"];
  const std::size_t dim = rows.size();
  Matrix m(dim, dim > 0 ? number_list(rows[0], "P row").size() : 0);
  for (std::size_t i = 0; i < dim; ++i) {
    const auto row = number_list(rows[i], "P row");
    if (row.size() != m.cols()) raise(errc::non_square, "ragged transition matrix");
    for (std::size_t k = 0; k < row.size(); ++k) m(i, k) = row[k];
  }

  NoiseVector n{number_list(j["n"], "n")};
  return MarkovChannel::create_relaxed(TransitionMatrix(std::move(m)), std::move(n),
                                       SymbolFamily::bsc);
}

nlohmann::json channel_to_json(const MarkovChannel& c) {
  nlohmann::json j;
  j["family"] = family_name(c.family());
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < c.num_states(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t k = 0; k < c.num_states(); ++k) row.push_back(c.transition()(i, k));
    rows.push_back(row);
  }
  j["P"] = rows;
  j["n"] = c.noise().etas;
  return j;
}

MarkovChannel load_channel(const std::filesystem::path& path) {
  return channel_from_json(parse_file(path));
}

DegradationRecipe recipe_from_json(const nlohmann::json& j,
                                   const std::filesystem::path& base_dir) {
  if (!j.is_array()) raise(errc::bad_file, "recipe document must be a JSON array of steps");
  DegradationRecipe recipe;
  for (const auto& step_json : j) {
    const std::string op = step_json.value("op", "");
    RecipeStep step;
    if (op == "concat_bsc") {
      step.op = RecipeStep::Op::concat_bsc;
      step.p = require_number(step_json, "p");
    } else if (op == "mix") {
      step.op = RecipeStep::Op::mix;
      step.mu = MixParams{require_number(step_json, "mu12"), require_number(step_json, "mu21")};
      if (step_json.contains("with")) {
        std::filesystem::path ref = step_json["with"].get<std::string>();
        if (ref.is_relative()) ref = base_dir / ref;
        step.other = load_channel(ref);
      }
    } else {
      raise(errc::bad_file, "unknown recipe op \"" + op + "\"");
    }
    recipe.push_back(std::move(step));
  }
  return recipe;
}

DegradationRecipe load_recipe(const std::filesystem::path& path) {
  return recipe_from_json(parse_file(path), path.parent_path());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out_ << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") != std::string::npos) {
      out_ << '"';
      for (char ch : f) {
        if (ch == '"') out_ << '"';
        out_ << ch;
      }
      out_ << '"';
    } else {
      out_ << f;
    }
  }
  out_ << "\r\n";
}

namespace {

struct Extent {
  double lo = 0.0;
  double hi = 1.0;
};

Extent extent_of(const std::vector<PlotSeries>& series, bool vertical, bool zero_line) {
  bool first = true;
  Extent e;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double err = (vertical && i < s.yerr.size()) ? s.yerr[i] : 0.0;
      const double v = vertical ? s.y[i] : s.x[i];
      const double lo = v - err;
      const double hi = v + err;
      if (first) {
        e = {lo, hi};
        first = false;
      } else {
        e.lo = std::min(e.lo, lo);
        e.hi = std::max(e.hi, hi);
      }
    }
  }
  if (vertical && zero_line) {
    e.lo = std::min(e.lo, 0.0);
    e.hi = std::max(e.hi, 0.0);
  }
  if (e.hi - e.lo < 1e-12) {
    e.lo -= 0.5;
    e.hi += 0.5;
  }
  const double pad = 0.05 * (e.hi - e.lo);
  return {e.lo - pad, e.hi + pad};
}

}  // namespace

void write_svg_plot(std::ostream& out, const std::vector<PlotSeries>& series,
                    const PlotOptions& options) {
  constexpr double kWidth = 640, kHeight = 400;
  constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
  const Extent ex = extent_of(series, false, false);
  const Extent ey = extent_of(series, true, options.zero_line);
  auto sx = [&](double x) {
    return kLeft + (x - ex.lo) / (ex.hi - ex.lo) * (kWidth - kLeft - kRight);
  };
  auto sy = [&](double y) {
    return kHeight - kBottom - (y - ey.lo) / (ey.hi - ey.lo) * (kHeight - kTop - kBottom);
  };
  static const char* kColors[] = {"#1f6fb2", "#c0392b", "#27ae60", "#8e44ad"};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kWidth << " " << kHeight
      << "\">\n";
  if (!options.metadata.empty()) out << "<metadata>" << options.metadata << "</metadata>\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
         "font-family=\"sans-serif\">"
      << options.title << "</text>\n";

  // axes
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
      << kWidth - kRight << "\" y2=\"" << kHeight - kBottom
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kHeight - kBottom << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double fx = ex.lo + (ex.hi - ex.lo) * tick / 4.0;
    const double fy = ey.lo + (ey.hi - ey.lo) * tick / 4.0;
    out << "<text x=\"" << sx(fx) << "\" y=\"" << kHeight - kBottom + 18
        << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
        << format_double(std::round(fx * 1e6) / 1e6) << "</text>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << sy(fy) + 4
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
        << format_double(std::round(fy * 1e6) / 1e6) << "</text>\n";
  }
  out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">"
      << options.x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 16 "
      << (kTop + kHeight - kBottom) / 2 << ")\">" << options.y_label << "</text>\n";

  if (options.zero_line && ey.lo < 0.0 && ey.hi > 0.0)
    out << "<line x1=\"" << kLeft << "\" y1=\"" << sy(0.0) << "\" x2=\"" << kWidth - kRight
        << "\" y2=\"" << sy(0.0) << "\" stroke=\"#999\" stroke-dasharray=\"4,3\"/>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kColors[si % 4];
    if (s.x.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        out << sx(s.x[i]) << "," << sy(s.y[i]) << (i + 1 < s.x.size() ? " " : "");
      out << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i < s.yerr.size() && s.yerr[i] > 0.0) {
        const double px = sx(s.x[i]);
        out << "<line x1=\"" << px << "\" y1=\"" << sy(s.y[i] - s.yerr[i]) << "\" x2=\"" << px
            << "\" y2=\"" << sy(s.y[i] + s.yerr[i]) << "\" stroke=\"" << color << "\"/>\n";
        for (double end : {s.y[i] - s.yerr[i], s.y[i] + s.yerr[i]})
          out << "<line x1=\"" << px - 4 << "\" y1=\"" << sy(end) << "\" x2=\"" << px + 4
              << "\" y2=\"" << sy(end) << "\" stroke=\"" << color << "\"/>\n";
      }
      out << "<circle cx=\"" << sx(s.x[i]) << "\" cy=\"" << sy(s.y[i]) << "\" r=\"3\" fill=\""
          << color << "\"/>\n";
    }
    if (!s.label.empty())
      out << "<text x=\"" << kWidth - kRight - 6 << "\" y=\"" << kTop + 16 + 16 * si
          << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\" fill=\"" << color
          << "\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir) {
  if (!j.is_object()) raise(errc::bad_config, "config must be a JSON object");
  ExperimentConfig config;
  auto resolve = [&](std::string p) {
    std::filesystem::path path = p;
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    return path.string();
  };
  if (j.contains("channel")) config.channel_path = resolve(j["channel"].get<std::string>());
  if (j.contains("recipe")) config.recipe_path = resolve(j["recipe"].get<std::string>());
  if (j.contains("q")) config.q = j["q"].get<double>();
  if (j.contains("n")) config.n = j["n"].get<std::size_t>();
  if (j.contains("trials")) config.trials = j["trials"].get<int>();
  if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("workers")) config.workers = j["workers"].get<int>();
  if (j.contains("k_max")) config.k_max = j["k_max"].get<int>();
  if (j.contains("out")) config.out_dir = resolve(j["out"].get<std::string>());
  if (j.contains("mu_grid")) config.mu_axis = axis_values(j["mu_grid"], "mu_grid");
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    if (!s.is_object() || !s.contains("param") || !s.contains("values"))
      raise(errc::bad_config, "sweep must be {\"param\": ..., \"values\": [...]}");
    config.sweep = {s["param"].get<std::string>(), axis_values(s["values"], "sweep.values")};
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return config_from_json(parse_file(path), path.parent_path());
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["channel"] = config.channel_path;
  if (config.recipe_path) j["recipe"] = *config.recipe_path;
  j["q"] = config.q;
  j["n"] = config.n;
  j["trials"] = config.trials;
  j["seed"] = config.seed;
  j["workers"] = config.workers;
  j["k_max"] = config.k_max;
  j["out"] = config.out_dir;
  if (!config.mu_axis.empty()) j["mu_grid"] = config.mu_axis;
  if (config.sweep) j["sweep"] = {{"param", config.sweep->first}, {"values", config.sweep->second}};
  return j;
}

std::string config_hash(const ExperimentConfig& config) {
  // workers and out never influence results, so they do not hash
  nlohmann::json j = config_to_json(config);
  j.erase("workers");
  j.erase("out");
  const std::string dump = j.dump();
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001B3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fsmc
