#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fsmc/inference.hpp"
#include "fsmc/io.hpp"
#include "fsmc/ordering.hpp"

namespace py = pybind11;
using namespace fsmc;

namespace {

Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  Matrix m(n, n == 0 ? 0 : rows[0].size());
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != m.cols()) raise(errc::non_square, "ragged matrix");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<std::vector<double>> rows_of(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  return rows;
}

py::bytes to_bytes(const std::vector<std::uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

std::vector<MixParams> grid_from_pairs(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<MixParams> grid;
  grid.reserve(pairs.size());
  for (const auto& [a, b] : pairs) grid.push_back(MixParams{a, b});
  return grid;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finite-state Markov channels: construction, degradation operators, "
            "and mutual-information rate estimation under iid inputs.";
  m.attr("__version__") = kToolVersion;

  py::register_exception<Error>(m, "FsmcError");

  py::class_<TransitionMatrix>(m, "TransitionMatrix")
      .def(py::init([](const std::vector<std::vector<double>>& rows) {
             return TransitionMatrix(matrix_from_rows(rows));
           }),
           py::arg("rows"))
      .def_property_readonly("num_states", &TransitionMatrix::num_states)
      .def_property_readonly(
          "rows", [](const TransitionMatrix& t) { return rows_of(t.matrix()); })
      .def("__repr__", [](const TransitionMatrix& t) {
        return "TransitionMatrix(num_states=" + std::to_string(t.num_states()) + ")";
      });

  m.def(
      "validate_stochastic",
      [](const std::vector<std::vector<double>>& rows) {
        return validate_stochastic(matrix_from_rows(rows));
      },
      py::arg("rows"), "Validate a row-stochastic matrix (raises FsmcError on violations).");

  m.def(
      "steady_state",
      [](const TransitionMatrix& P, double tol, std::size_t max_iter) {
        return steady_state(P, tol, max_iter).probs;
      },
      py::arg("P"), py::arg("tol") = 1e-12, py::arg("max_iter") = 100000,
      "Steady-state distribution of a regular chain (power iteration).");

  py::class_<RegularityResult>(m, "RegularityResult")
      .def_readonly("regular", &RegularityResult::regular)
      .def_readonly("positive_power", &RegularityResult::positive_power)
      .def_readonly("period", &RegularityResult::period)
      .def_property_readonly("failure",
                             [](const RegularityResult& r) -> std::string {
                               switch (r.failure) {
                                 case RegularityResult::Failure::none: return "none";
                                 case RegularityResult::Failure::reducible: return "reducible";
                                 case RegularityResult::Failure::periodic: return "periodic";
                               }
                               return "none";
                             })
      .def("__repr__", [](const RegularityResult& r) {
        return std::string("RegularityResult(regular=") + (r.regular ? "True" : "False") + ")";
      });
  m.def("is_regular", &is_regular, py::arg("P"));

  py::class_<DeviationReport>(m, "DeviationReport")
      .def_readonly("d", &DeviationReport::d)
      .def_readonly("delta", &DeviationReport::delta);
  m.def("d_step_deviation", &d_step_deviation, py::arg("P"), py::arg("d"),
        "Multiplicative gap between P^d and the steady state.");

  py::class_<MarkovChannel>(m, "MarkovChannel")
      .def_static(
          "create",
          [](const std::vector<std::vector<double>>& P, const std::vector<double>& etas) {
            return MarkovChannel::create(TransitionMatrix(matrix_from_rows(P)),
                                         NoiseVector{etas});
          },
          py::arg("P"), py::arg("n"),
          "Build a BSC-family Markov channel from a transition matrix and per-state "
          "inversion probabilities; requires a regular chain.")
      .def_property_readonly("num_states", &MarkovChannel::num_states)
      .def_property_readonly("regular", &MarkovChannel::regular)
      .def_property_readonly(
          "P", [](const MarkovChannel& c) { return rows_of(c.transition().matrix()); })
      .def_property_readonly("n", [](const MarkovChannel& c) { return c.noise().etas; })
      .def_property_readonly("steady",
                             [](const MarkovChannel& c) { return c.steady().probs; })
      .def_property_readonly("digest", &MarkovChannel::digest)
      .def("__repr__", [](const MarkovChannel& c) {
        return "MarkovChannel(num_states=" + std::to_string(c.num_states()) + ", family=" +
               family_name(c.family()) + ")";
      });

  m.def(
      "load_channel", [](const std::string& path) { return load_channel(path); },
      py::arg("path"), "Load a channel definition JSON file.");
  m.def(
      "channel_to_json",
      [](const MarkovChannel& c) { return channel_to_json(c).dump(2); }, py::arg("channel"),
      "Channel definition document as a JSON string.");

  m.def(
      "emission_prob",
      [](double eta, int x, int y) { return emission_prob(SymbolFamily::bsc, eta, x, y); },
      py::arg("eta"), py::arg("x"), py::arg("y"));

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("x", [](const Trajectory& t) { return to_bytes(t.x); })
      .def_property_readonly("s", [](const Trajectory& t) { return to_bytes(t.s); })
      .def_property_readonly("y", [](const Trajectory& t) { return to_bytes(t.y); })
      .def_readonly("seed", &Trajectory::seed)
      .def_readonly("stream", &Trajectory::stream)
      .def("__len__", [](const Trajectory& t) { return t.x.size(); });

  m.def(
      "sample_trajectory",
      [](const MarkovChannel& c, std::size_t n, double q, std::uint64_t seed,
         std::uint64_t stream) {
        return sample_trajectory(c, n, InputDistribution(q), seed, stream);
      },
      py::arg("channel"), py::arg("n"), py::arg("q"), py::arg("seed"), py::arg("stream") = 0,
      "Sample (x, s, y); deterministic in (seed, stream).");

  m.def(
      "joint_log_likelihood",
      [](const MarkovChannel& c, const std::vector<std::uint8_t>& x,
         const std::vector<std::uint8_t>& s, const std::vector<std::uint8_t>& y) {
        return joint_log_likelihood(c, x, s, y);
      },
      py::arg("channel"), py::arg("x"), py::arg("s"), py::arg("y"),
      "Natural-log joint likelihood of fully observed sequences.");

  m.def(
      "forward_log_f_y_given_x",
      [](const MarkovChannel& c, const std::vector<std::uint8_t>& x,
         const std::vector<std::uint8_t>& y) { return forward_log_f_y_given_x(c, x, y); },
      py::arg("channel"), py::arg("x"), py::arg("y"),
      "ln f(y|x) by the normalized forward recursion.");
  m.def(
      "forward_log_f_y",
      [](const MarkovChannel& c, double q, const std::vector<std::uint8_t>& y) {
        return forward_log_f_y(c, InputDistribution(q), y);
      },
      py::arg("channel"), py::arg("q"), py::arg("y"),
      "ln f(y) under an iid Bernoulli(q) input.");

  m.def("binary_entropy", &binary_entropy, py::arg("p"));
  m.def("bsc_mutual_information", &bsc_mutual_information, py::arg("eta"), py::arg("q"));

  m.def(
      "exact_block_mi",
      [](const MarkovChannel& c, int k, double q) {
        return exact_block_mi(c, k, InputDistribution(q));
      },
      py::arg("channel"), py::arg("k"), py::arg("q"),
      "Exact I(X_1^k; Y_1^k) in bits by enumeration.");

  py::class_<MIEstimate>(m, "MIEstimate")
      .def_readonly("rate_bits", &MIEstimate::rate_bits)
      .def_readonly("std_error", &MIEstimate::std_error)
      .def_readonly("n", &MIEstimate::n)
      .def_readonly("trials", &MIEstimate::trials)
      .def_readonly("seed", &MIEstimate::seed)
      .def_readonly("wall_seconds", &MIEstimate::wall_seconds)
      .def("__repr__", [](const MIEstimate& e) {
        return "MIEstimate(rate_bits=" + std::to_string(e.rate_bits) +
               ", std_error=" + std::to_string(e.std_error) + ")";
      });

  m.def(
      "estimate_mi_rate",
      [](const MarkovChannel& c, double q, std::size_t n, int trials, std::uint64_t seed,
         int workers) {
        return estimate_mi_rate(c, InputDistribution(q), n, trials, seed, workers);
      },
      py::arg("channel"), py::arg("q"), py::arg("n"), py::arg("trials"), py::arg("seed"),
      py::arg("workers") = 1,
      "Monte Carlo mutual-information rate in bits/use; deterministic in seed, "
      "independent of worker count.");

  m.def(
      "genie_state_upper_bound",
      [](const MarkovChannel& c, double q) {
        return genie_state_upper_bound(c, InputDistribution(q));
      },
      py::arg("channel"), py::arg("q"));
  m.def(
      "memoryless_lower_bound",
      [](const MarkovChannel& c, double q) {
        return memoryless_lower_bound(c, InputDistribution(q));
      },
      py::arg("channel"), py::arg("q"));

  m.def(
      "mix",
      [](const MarkovChannel& c1, const MarkovChannel& c2, double mu12, double mu21) {
        return mix(c1, c2, MixParams{mu12, mu21});
      },
      py::arg("c1"), py::arg("c2"), py::arg("mu12"), py::arg("mu21"),
      "Join two channels' state machines with jump probabilities (mu12, mu21).");
  m.def("concat_bsc", &concat_bsc, py::arg("channel"), py::arg("p"),
        "Cascade every state's BSC with an independent BSC(p).");
  m.def(
      "build_degraded_chain",
      [](const MarkovChannel& c, int steps, double mu12, double mu21,
         std::optional<double> bsc_p, bool chain_successive) {
        return build_degraded_chain(c, steps, MixParams{mu12, mu21}, bsc_p, chain_successive);
      },
      py::arg("channel"), py::arg("steps"), py::arg("mu12"), py::arg("mu21"),
      py::arg("bsc_p") = std::nullopt, py::arg("chain_successive") = false,
      "Recursively degraded channels with growing state counts.");

  py::class_<Lemma1Row>(m, "Lemma1Row")
      .def_readonly("k", &Lemma1Row::k)
      .def_readonly("exact_rate_bits", &Lemma1Row::exact_rate_bits)
      .def_readonly("mc_rate_bits", &Lemma1Row::mc_rate_bits)
      .def_readonly("mc_std_error", &Lemma1Row::mc_std_error)
      .def_readonly("margin", &Lemma1Row::margin)
      .def_readonly("violated", &Lemma1Row::violated);
  py::class_<Lemma1Report>(m, "Lemma1Report")
      .def_readonly("estimate", &Lemma1Report::estimate)
      .def_readonly("rows", &Lemma1Report::rows)
      .def_readonly("any_violation", &Lemma1Report::any_violation);
  m.def(
      "check_lemma1",
      [](const MarkovChannel& c, int k_max, double q, std::size_t n, int trials,
         std::uint64_t seed, int workers) {
        McConfig mc;
        mc.n = n;
        mc.trials = trials;
        mc.seed = seed;
        mc.workers = workers;
        return check_lemma1(c, k_max, InputDistribution(q), mc);
      },
      py::arg("channel"), py::arg("k_max"), py::arg("q") = 0.5, py::arg("n") = 100000,
      py::arg("trials") = 20, py::arg("seed") = 1, py::arg("workers") = 1,
      "Exact truncated-block rates vs the Monte Carlo rate for k = 1..k_max.");

  py::class_<OrderingPoint>(m, "OrderingPoint")
      .def_property_readonly(
          "mu", [](const OrderingPoint& p) { return std::pair{p.mu.mu12, p.mu.mu21}; })
      .def_readonly("mixed", &OrderingPoint::mixed)
      .def_readonly("margin", &OrderingPoint::margin)
      .def_readonly("combined_se", &OrderingPoint::combined_se)
      .def_property_readonly(
          "verdict", [](const OrderingPoint& p) { return std::string(verdict_name(p.verdict)); });
  py::class_<OrderingReport>(m, "OrderingReport")
      .def_readonly("base", &OrderingReport::base)
      .def_readonly("points", &OrderingReport::points)
      .def_readonly("any_violation", &OrderingReport::any_violation)
      .def_readonly("certified", &OrderingReport::certified);
  m.def(
      "check_theorem1",
      [](const MarkovChannel& c, const MarkovChannel& c_star,
         const std::vector<std::pair<double, double>>& grid, double q, std::size_t n,
         int trials, std::uint64_t seed, int workers) {
        McConfig mc;
        mc.n = n;
        mc.trials = trials;
        mc.seed = seed;
        mc.workers = workers;
        return check_theorem1(c, c_star, grid_from_pairs(grid), InputDistribution(q), mc);
      },
      py::arg("channel"), py::arg("degraded"), py::arg("mu_grid"), py::arg("q") = 0.5,
      py::arg("n") = 100000, py::arg("trials") = 20, py::arg("seed") = 1,
      py::arg("workers") = 1,
      "Estimate I[c] against I[mix(c, c*, mu)] over a mu grid; verdict per point.");
}
