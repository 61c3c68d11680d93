// Python bindings. Configs and results cross the boundary as JSON text; the
// package wrapper converts them to and from dicts.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "fibereq/complexity.hpp"
#include "fibereq/errors.hpp"
#include "fibereq/experiment.hpp"
#include "fibereq/metrics.hpp"
#include "fibereq/nn/checkpoint.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace fibereq;

namespace {

py::array_t<double> symbols_array(std::span<const DualPolSymbol> s) {
  py::array_t<double> out({static_cast<py::ssize_t>(s.size()), py::ssize_t{4}});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto n = static_cast<py::ssize_t>(i);
    v(n, 0) = s[i].ix;
    v(n, 1) = s[i].qx;
    v(n, 2) = s[i].iy;
    v(n, 3) = s[i].qy;
  }
  return out;
}

ExperimentConfig parse(const std::string& text) { return config_from_json(json::parse(text)); }

std::string normalized_config(const std::string& text) { return config_to_json(parse(text)).dump(); }

std::string run_experiment_json(const std::string& text) { return result_to_json(run_experiment(parse(text))).dump(); }

std::string run_sweep_json(const std::string& text) {
  const auto rows = run_sweep(sweep_from_json(json::parse(text)));
  json all = json::array();
  for (const auto& row : rows) {
    json e = {{"index", row.index}, {"seed", row.config.seed}, {"training_run", row.training_run}};
    if (row.result) {
      e["result"] = result_to_json(*row.result);
    } else {
      e["error"] = row.error;
    }
    all.push_back(e);
  }
  return all.dump();
}

py::dict simulate(const std::string& text, std::size_t n_symbols, int batch) {
  const auto cfg = parse(text);
  const auto frame = simulate_frame(cfg, {cfg.launch_power_dbm, cfg.neighbor_modulation},
                                    test_frame_seed(cfg.seed, batch), n_symbols);
  py::dict d;
  d["tx"] = symbols_array(frame.tx.symbols);
  d["fde"] = symbols_array(frame.fde_symbols);
  d["fde_evm"] = evm(frame.fde_symbols, frame.tx);
  const auto count = count_errors(frame.fde_symbols, frame.tx);
  d["fde_bit_errors"] = count.bit_errors;
  d["bits"] = count.bits;
  if (cfg.equalizer == Equalizer::kDbp) {
    const auto sym = equalize_dbp(cfg, frame, cfg.dbp_steps_per_span);
    d["dbp"] = symbols_array(sym);
    d["dbp_bit_errors"] = count_errors(sym, frame.tx).bit_errors;
  }
  return d;
}

std::string train_json(const std::string& text) {
  auto cfg = parse(text);
  const auto trained = train_equalizer(cfg);
  json j = history_to_json(trained.history);
  j["model"] = nn::serialize_model(trained.model);
  return j.dump();
}

std::string evaluate_json(const std::string& text, const std::string& model_text) {
  auto cfg = parse(text);
  cfg.equalizer = Equalizer::kFdeLstm;
  return result_to_json(evaluate_experiment(cfg, nn::parse_model(model_text))).dump();
}

std::optional<double> crossover(int band_nm, double hidden, double word, int max_spans) {
  if (band_nm != 1310 && band_nm != 1550) throw ConfigError("band must be 1310 or 1550");
  return crossover_distance(ComplexityModel::for_band(static_cast<Band>(band_nm)), hidden, word, max_spans);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fiber link simulation and bi-LSTM equalization";
  // Translators run most-recent first: the derived type registers last.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("normalized_config", &normalized_config, py::arg("config_json"));
  m.def("run_experiment", &run_experiment_json, py::arg("config_json"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_sweep", &run_sweep_json, py::arg("sweep_json"), py::call_guard<py::gil_scoped_release>());
  m.def("simulate", &simulate, py::arg("config_json"), py::arg("n_symbols"), py::arg("batch") = 0);
  m.def("train", &train_json, py::arg("config_json"), py::call_guard<py::gil_scoped_release>());
  m.def("evaluate", &evaluate_json, py::arg("config_json"), py::arg("model_text"),
        py::call_guard<py::gil_scoped_release>());

  m.def("delay_spread_ps", &delay_spread_ps, py::arg("beta2_ps2_per_km"), py::arg("length_km"),
        py::arg("bandwidth_thz"));
  m.def("c_pred", &c_pred, py::arg("hidden_units"), py::arg("word_length"), py::arg("constellation_order") = 16);
  m.def("crossover_distance_km", &crossover, py::arg("band_nm"), py::arg("hidden_units"), py::arg("word_length"),
        py::arg("max_spans") = 400);
  m.def("qam16_constellation", [] {
    const auto& c = qam16_constellation();
    return std::vector<std::complex<double>>(c.begin(), c.end());
  });
}
