// Command-line front end: simulate | train | evaluate | complexity | sweep.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "fibereq/complexity.hpp"
#include "fibereq/errors.hpp"
#include "fibereq/experiment.hpp"
#include "fibereq/nn/checkpoint.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fibereq;

namespace {

json read_json(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed) {
  auto j = read_json(path);
  if (seed) j["seed"] = *seed;
  return config_from_json(j);
}

fs::path prepare_out(const std::string& out) {
  fs::path dir = out.empty() ? fs::path("results") : fs::path(out);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write '" + path.string() + "'");
  os << text;
}

int cmd_simulate(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out) {
  const auto cfg = load_config(config, seed);
  const auto dir = prepare_out(out);
  const ChannelCondition cond{cfg.launch_power_dbm, cfg.neighbor_modulation};
  const auto frame = simulate_frame(cfg, cond, test_frame_seed(cfg.seed, 0), cfg.n_test);
  dump_waveform(dir / "rx_waveform.f64", frame.dsp);
  dump_symbols(dir / "tx_symbols.f64", frame.tx.symbols);
  dump_symbols(dir / "fde_symbols.f64", frame.fde_symbols);
  const auto count = count_errors(frame.fde_symbols, frame.tx);
  json j = {{"config", config_to_json(cfg)},
            {"n_symbols", frame.tx.size()},
            {"fde_evm", evm(frame.fde_symbols, frame.tx)},
            {"fde_ber", count.ber()},
            {"fde_bit_errors", count.bit_errors}};
  write_file(dir / "simulate.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_train(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out) {
  auto cfg = load_config(config, seed);
  cfg.equalizer = Equalizer::kFdeLstm;
  cfg.validate();
  const auto dir = prepare_out(out);
  const auto trained = train_equalizer(cfg);
  nn::save_model(trained.model, dir / "model.txt");
  json h = history_to_json(trained.history);
  h["config"] = config_to_json(cfg);
  write_file(dir / "history.json", h.dump(2) + "\n");
  std::cout << "best epoch " << trained.history.best_epoch << ", validation accuracy "
            << trained.history.best_val_accuracy << "\nmodel written to " << (dir / "model.txt").string()
            << '\n';
  return 0;
}

int cmd_evaluate(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out,
                 const std::string& model_path) {
  const auto cfg = load_config(config, seed);
  const auto dir = prepare_out(out);
  ExperimentResult r;
  if (cfg.equalizer == Equalizer::kFdeLstm) {
    if (model_path.empty()) throw ConfigError("evaluate with equalizer fde+lstm needs --model");
    r = evaluate_experiment(cfg, nn::load_model(model_path));
  } else {
    r = run_experiment(cfg);
  }
  std::ofstream csv(dir / "results.csv");
  write_csv_header(csv);
  write_csv_row(csv, r);
  const auto j = result_to_json(r);
  write_file(dir / "result.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_complexity(const std::string& config, const std::string& out, double hidden, double word,
                   int max_spans) {
  // Sweep configs are accepted; list axes contribute their first value.
  const auto cfg = sweep_from_json(read_json(config)).base;
  auto model = ComplexityModel::for_band(cfg.band);
  model.beta2_ps2_per_km = cfg.fiber.beta2_ps2_per_km;
  model.span_km = cfg.fiber.span_km;
  if (hidden <= 0) hidden = cfg.hidden_units;
  if (word <= 0) word = cfg.word_length();
  const auto dir = prepare_out(out);
  std::ofstream csv(dir / "complexity.csv");
  write_complexity_csv(csv, complexity_sweep(model, hidden, word, max_spans));
  const auto cross = crossover_distance(model, hidden, word, max_spans);
  std::cout << "band " << static_cast<int>(cfg.band) << " nm, L=" << hidden << ", m=" << word
            << ": crossover ";
  if (cross) {
    std::cout << *cross << " km\n";
  } else {
    std::cout << "none within " << max_spans * model.span_km << " km\n";
  }
  return 0;
}

int cmd_sweep(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out) {
  auto j = read_json(config);
  if (seed) j["seed"] = *seed;
  const auto sweep = sweep_from_json(j);
  const auto dir = prepare_out(out);
  std::ofstream csv(dir / "results.csv");
  const auto rows = run_sweep(sweep, &csv, &std::cerr);
  json all = json::array();
  int failed = 0;
  for (const auto& row : rows) {
    json e = {{"index", row.index}, {"seed", row.config.seed}};
    if (row.result) {
      e["result"] = result_to_json(*row.result);
      if (row.result->history) e["history"] = history_to_json(*row.result->history);
    } else {
      e["config"] = config_to_json(row.config);
      e["error"] = row.error;
      ++failed;
    }
    all.push_back(e);
  }
  write_file(dir / "results.json", all.dump(2) + "\n");
  std::cout << rows.size() << " points, " << failed << " failed; results in " << dir.string() << '\n';
  return failed == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fiber link simulation and bi-LSTM equalization"};
  app.require_subcommand(1);

  std::string config, out, model_path;
  std::optional<std::uint64_t> seed;
  double hidden = 0, word = 0;
  int max_spans = 60;

  auto add_common = [&](CLI::App* sub, bool with_seed) {
    sub->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
    if (with_seed) sub->add_option("--seed", seed, "Base seed (overrides the config)");
    sub->add_option("--out", out, "Output directory");
  };
  auto* simulate = app.add_subcommand("simulate", "Propagate one test frame and dump waveforms");
  add_common(simulate, true);
  auto* train = app.add_subcommand("train", "Train the bi-LSTM equalizer and save a checkpoint");
  add_common(train, true);
  auto* evaluate = app.add_subcommand("evaluate", "Measure BER for one operating point");
  add_common(evaluate, true);
  evaluate->add_option("--model", model_path, "Checkpoint from 'train'")->check(CLI::ExistingFile);
  auto* complexity = app.add_subcommand("complexity", "Tabulate multiplications per bit against distance");
  add_common(complexity, true);
  complexity->add_option("--hidden", hidden, "Hidden units L (default from config)");
  complexity->add_option("--word", word, "Word length m (default from config)");
  complexity->add_option("--max-spans", max_spans, "Largest span count")->check(CLI::PositiveNumber);
  auto* sweep = app.add_subcommand("sweep", "Run the Cartesian product of list-valued axes");
  add_common(sweep, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(config, seed, out);
    if (*train) return cmd_train(config, seed, out);
    if (*evaluate) return cmd_evaluate(config, seed, out, model_path);
    if (*complexity) return cmd_complexity(config, out, hidden, word, max_spans);
    if (*sweep) return cmd_sweep(config, seed, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
