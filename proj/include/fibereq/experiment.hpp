#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fibereq/fiber.hpp"
#include "fibereq/nn/train.hpp"
#include "fibereq/txrx.hpp"

namespace fibereq {

enum class Equalizer { kFde, kFdeLstm, kDbp };

std::string to_string(Equalizer e);
std::string to_string(Modulation m);

struct ExperimentConfig {
  Band band = Band::kC;
  int n_channels = 1;
  int n_spans = 10;
  int forward_steps_per_span = 40;
  int samples_per_symbol = 16;
  double launch_power_dbm = 0.0;
  Equalizer equalizer = Equalizer::kFdeLstm;
  int dbp_steps_per_span = 2;
  int dsp_samples_per_symbol = 4;
  int hidden_units = 16;
  int half_window = 15;  // k; word length m = 2k + 1
  std::size_t n_train = 20000;
  std::size_t n_val = 5000;
  std::size_t n_test = 5000;
  nn::TrainConfig training;
  std::uint64_t seed = 1;
  bool noiseless = false;
  Modulation neighbor_modulation = Modulation::kQam16;
  double spacing_hz = 50e9;
  double baud_rate = kDefaultBaudRate;
  FiberParams fiber = FiberParams::for_band(Band::kC);
  AmpParams amp = AmpParams::for_band(Band::kC);

  // Mismatch mode: train under a different channel condition and/or seed.
  std::optional<double> train_launch_power_dbm;
  std::optional<Modulation> train_neighbor_modulation;
  std::optional<std::uint64_t> train_seed;

  // Extra test frames are appended until min_bit_errors is reached, the
  // counted bits reach ber_floor_bits, or max_extra_test_batches run out.
  int max_extra_test_batches = 0;
  std::size_t extra_batch_symbols = 20000;
  std::uint64_t min_bit_errors = 10;
  std::uint64_t ber_floor_bits = 1000000;

  int word_length() const { return 2 * half_window + 1; }
  double distance_km() const { return n_spans * fiber.span_km; }
  LinkConfig link() const;
  void validate() const;
};

// JSON config document. Unknown keys and ill-typed values are rejected with
// the offending key in the message; omitted keys take band defaults.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);

struct ChannelCondition {
  double launch_power_dbm = 0.0;
  Modulation neighbor_modulation = Modulation::kQam16;
};

// One transmitted frame of the channel of interest after the link and the
// receiver front end.
struct ReceivedFrame {
  SymbolFrame tx;
  Waveform dsp;                            // low-passed, dsp_samples_per_symbol
  std::vector<DualPolSymbol> fde_symbols;  // FDE, matched filter, ideal gain/phase
  double launch_power_dbm = 0.0;
};

ReceivedFrame simulate_frame(const ExperimentConfig& cfg, const ChannelCondition& cond,
                             std::uint64_t frame_seed, std::size_t n_symbols);

std::vector<DualPolSymbol> equalize_dbp(const ExperimentConfig& cfg, const ReceivedFrame& frame,
                                        int steps_per_span);

// Seeds of the frames an experiment simulates.
std::uint64_t test_frame_seed(std::uint64_t seed, int batch);
std::uint64_t train_frame_seed(std::uint64_t seed);

struct TrainedEqualizer {
  nn::BiLstmModel model;
  nn::TrainHistory history;
};

// Simulates the training frame (n_train + n_val symbols) under the training
// condition and fits the bi-LSTM.
TrainedEqualizer train_equalizer(const ExperimentConfig& cfg, const nn::EpochCallback& on_epoch = {});

struct ExperimentResult {
  ExperimentConfig config;
  double ber = 0.0;
  double ser = 0.0;
  std::uint64_t bit_errors = 0;
  std::uint64_t n_bits = 0;
  int test_batches = 1;
  double pre_equalizer_evm = 0.0;  // FDE (or DBP) EVM of the first test frame
  std::optional<nn::TrainHistory> history;
  double c_dbp = 0.0;
  double c_fde = 0.0;
  double c_pred = 0.0;
  double wall_time_s = 0.0;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);
// Evaluates a given model under cfg's test condition (no training).
ExperimentResult evaluate_experiment(const ExperimentConfig& cfg, const nn::BiLstmModel& model);

nlohmann::json result_to_json(const ExperimentResult& r);
nlohmann::json history_to_json(const nn::TrainHistory& h);

// band,n_channels,distance_km,power_dbm,equalizer,steps_per_span,L,m,ber,n_bits,seed
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const ExperimentResult& r);

// A config whose list-valued axes (launch_power_dbm, n_spans, equalizer,
// dbp.steps_per_span, lstm.hidden_units, lstm.k) span a Cartesian product.
struct SweepConfig {
  ExperimentConfig base;
  std::vector<double> launch_power_dbm;
  std::vector<int> n_spans;
  std::vector<Equalizer> equalizer;
  std::vector<int> dbp_steps_per_span;
  std::vector<int> hidden_units;
  std::vector<int> half_window;
  bool empty = false;  // some axis was given as an empty list

  std::vector<ExperimentConfig> points() const;
};

SweepConfig sweep_from_json(const nlohmann::json& j);

struct SweepRow {
  std::size_t index = 0;
  std::optional<ExperimentResult> result;
  ExperimentConfig config;
  std::string error;
  int training_run = -1;  // shared model index in mismatch mode
};

// Per-point seed derived from (base seed, point index). Points sharing a
// mismatch training condition reuse one trained model. Failing points are
// reported and skipped; rows are written in point order.
std::vector<SweepRow> run_sweep(const SweepConfig& sweep, std::ostream* csv = nullptr,
                                std::ostream* log = nullptr);

std::uint64_t point_seed(std::uint64_t base_seed, std::size_t index);

}  // namespace fibereq
