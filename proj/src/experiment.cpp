#include "fibereq/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "fibereq/complexity.hpp"
#include "fibereq/errors.hpp"
#include "fibereq/lin_dsp.hpp"
#include "fibereq/nn/dataset.hpp"
#include "fibereq/rng.hpp"

namespace fibereq {

using nlohmann::json;

std::string to_string(Equalizer e) {
  switch (e) {
    case Equalizer::kFde: return "fde";
    case Equalizer::kFdeLstm: return "fde+lstm";
    case Equalizer::kDbp: return "dbp";
  }
  return "?";
}

std::string to_string(Modulation m) { return m == Modulation::kQam16 ? "16qam" : "qpsk"; }

namespace {

Equalizer parse_equalizer(const std::string& s, const std::string& key) {
  if (s == "fde") return Equalizer::kFde;
  if (s == "fde+lstm" || s == "lstm") return Equalizer::kFdeLstm;
  if (s == "dbp") return Equalizer::kDbp;
  throw ConfigError(key + ": unknown equalizer '" + s + "' (expected fde, fde+lstm or dbp)");
}

Modulation parse_modulation(const std::string& s, const std::string& key) {
  if (s == "16qam" || s == "16QAM" || s == "qam16") return Modulation::kQam16;
  if (s == "qpsk" || s == "QPSK") return Modulation::kQpsk;
  throw ConfigError(key + ": unknown modulation '" + s + "' (expected 16qam or qpsk)");
}

Band parse_band(const json& v, const std::string& key) {
  if (v.is_number_integer()) {
    const auto b = v.get<long>();
    if (b == 1310) return Band::kO;
    if (b == 1550) return Band::kC;
  } else if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "O" || s == "o" || s == "1310") return Band::kO;
    if (s == "C" || s == "c" || s == "1550") return Band::kC;
  }
  throw ConfigError(key + ": band must be 1310 or 1550 (or \"O\"/\"C\"), got " + v.dump());
}

// Typed access to one JSON object with unknown-key detection.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(name("") + ": expected an object");
  }

  std::string name(const std::string& key) const {
    return path_.empty() ? key : (key.empty() ? path_ : path_ + "." + key);
  }

  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  void read(const std::string& key, int& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(name(key) + ": expected an integer, got " + v->dump());
      out = v->get<int>();
    }
  }
  void read(const std::string& key, std::uint64_t& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
        throw ConfigError(name(key) + ": expected an unsigned integer, got " + v->dump());
      out = v->get<std::uint64_t>();
    }
  }
  void read(const std::string& key, double& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number()) throw ConfigError(name(key) + ": expected a number, got " + v->dump());
      out = v->get<double>();
    }
  }
  void read(const std::string& key, bool& out) {
    if (const auto* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(name(key) + ": expected true/false, got " + v->dump());
      out = v->get<bool>();
    }
  }
  std::optional<std::string> string(const std::string& key) {
    if (const auto* v = find(key)) {
      if (!v->is_string()) throw ConfigError(name(key) + ": expected a string, got " + v->dump());
      return v->get<std::string>();
    }
    return std::nullopt;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(name(it.key()) + ": unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

template <typename Fn>
void with_object(ObjectReader& parent, const std::string& key, Fn&& fn) {
  if (const auto* v = parent.find(key)) {
    ObjectReader child(*v, parent.name(key));
    fn(child);
    child.finish();
  }
}

}  // namespace

LinkConfig ExperimentConfig::link() const {
  LinkConfig l;
  l.n_spans = n_spans;
  l.steps_per_span_forward = forward_steps_per_span;
  l.samples_per_symbol = samples_per_symbol;
  l.band = band;
  l.fiber = fiber;
  l.amp = amp;
  l.amp.noiseless = noiseless || amp.noiseless;
  l.n_channels = n_channels;
  l.spacing_hz = spacing_hz;
  l.baud_rate = baud_rate;
  return l;
}

void ExperimentConfig::validate() const {
  link().validate();
  if (n_spans < 1) throw ConfigError("n_spans must be >= 1");
  if (dbp_steps_per_span < 1) throw ConfigError("dbp.steps_per_span must be >= 1");
  if (dsp_samples_per_symbol < 2 || dsp_samples_per_symbol > samples_per_symbol)
    throw ConfigError("dbp.samples_per_symbol must be in [2, samples_per_symbol]");
  if (hidden_units < 1) throw ConfigError("lstm.hidden_units must be >= 1");
  if (half_window < 0) throw ConfigError("lstm.k must be >= 0");
  if (n_test == 0) throw ConfigError("split.test must be > 0");
  if (equalizer == Equalizer::kFdeLstm) {
    const auto m = static_cast<std::size_t>(word_length());
    if (n_train < m || n_val < m || n_test < m)
      throw ConfigError("split sizes must each be >= the word length " + std::to_string(m));
    training.validate();
  }
  if (max_extra_test_batches < 0) throw ConfigError("ber.max_extra_test_batches must be >= 0");
  if (max_extra_test_batches > 0 && extra_batch_symbols < static_cast<std::size_t>(word_length()))
    throw ConfigError("ber.extra_batch_symbols must be >= the word length");
  if (!std::isfinite(launch_power_dbm)) throw ConfigError("launch_power_dbm must be finite");
  const double edge = (n_channels - 1) / 2.0 * spacing_hz + spacing_hz / 2.0 +
                      (1.0 + kRrcRolloff) * baud_rate / 2.0;
  if (n_channels > 1 && edge >= samples_per_symbol * baud_rate / 2.0)
    throw ConfigError("samples_per_symbol " + std::to_string(samples_per_symbol) + " too low for " +
                      std::to_string(n_channels) + " channels");
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  ObjectReader r(j, "");
  if (const auto* b = r.find("band")) {
    c.band = parse_band(*b, "band");
    c.fiber = FiberParams::for_band(c.band);
    c.amp = AmpParams::for_band(c.band);
  }
  r.read("n_channels", c.n_channels);
  r.read("n_spans", c.n_spans);
  r.read("forward_steps_per_span", c.forward_steps_per_span);
  r.read("samples_per_symbol", c.samples_per_symbol);
  r.read("launch_power_dbm", c.launch_power_dbm);
  if (auto s = r.string("equalizer")) c.equalizer = parse_equalizer(*s, "equalizer");
  r.read("seed", c.seed);
  r.read("noiseless", c.noiseless);
  if (auto s = r.string("neighbor_modulation"))
    c.neighbor_modulation = parse_modulation(*s, "neighbor_modulation");
  double spacing_ghz = c.spacing_hz / 1e9;
  r.read("channel_spacing_ghz", spacing_ghz);
  c.spacing_hz = spacing_ghz * 1e9;
  double baud_gbd = c.baud_rate / 1e9;
  r.read("baud_rate_gbaud", baud_gbd);
  c.baud_rate = baud_gbd * 1e9;
  r.string("output");  // consumed by the CLI

  with_object(r, "dbp", [&](ObjectReader& o) {
    o.read("steps_per_span", c.dbp_steps_per_span);
    o.read("samples_per_symbol", c.dsp_samples_per_symbol);
  });
  with_object(r, "lstm", [&](ObjectReader& o) {
    o.read("hidden_units", c.hidden_units);
    o.read("k", c.half_window);
  });
  with_object(r, "split", [&](ObjectReader& o) {
    o.read("train", c.n_train);
    o.read("validation", c.n_val);
    o.read("test", c.n_test);
  });
  with_object(r, "training", [&](ObjectReader& o) {
    o.read("batch_size", c.training.batch_size);
    o.read("max_epochs", c.training.max_epochs);
    o.read("patience", c.training.patience);
    o.read("learning_rate", c.training.adam.learning_rate);
  });
  with_object(r, "mismatch", [&](ObjectReader& o) {
    double p = 0.0;
    if (o.find("train_launch_power_dbm")) {
      o.read("train_launch_power_dbm", p);
      c.train_launch_power_dbm = p;
    }
    if (auto s = o.string("train_neighbor_modulation"))
      c.train_neighbor_modulation = parse_modulation(*s, "mismatch.train_neighbor_modulation");
    std::uint64_t ts = 0;
    if (o.find("train_seed")) {
      o.read("train_seed", ts);
      c.train_seed = ts;
    }
  });
  with_object(r, "ber", [&](ObjectReader& o) {
    o.read("max_extra_test_batches", c.max_extra_test_batches);
    o.read("extra_batch_symbols", c.extra_batch_symbols);
    o.read("min_bit_errors", c.min_bit_errors);
    o.read("floor_bits", c.ber_floor_bits);
  });
  with_object(r, "fiber", [&](ObjectReader& o) {
    o.read("alpha_db_per_km", c.fiber.alpha_db_per_km);
    o.read("beta2_ps2_per_km", c.fiber.beta2_ps2_per_km);
    o.read("gamma_per_w_km", c.fiber.gamma_per_w_km);
    o.read("span_km", c.fiber.span_km);
  });
  with_object(r, "amplifier", [&](ObjectReader& o) {
    o.read("gain_db", c.amp.gain_db);
    o.read("noise_figure_db", c.amp.noise_figure_db);
  });
  r.finish();
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["band"] = static_cast<int>(c.band);
  j["n_channels"] = c.n_channels;
  j["n_spans"] = c.n_spans;
  j["forward_steps_per_span"] = c.forward_steps_per_span;
  j["samples_per_symbol"] = c.samples_per_symbol;
  j["launch_power_dbm"] = c.launch_power_dbm;
  j["equalizer"] = to_string(c.equalizer);
  j["seed"] = c.seed;
  j["noiseless"] = c.noiseless;
  j["neighbor_modulation"] = to_string(c.neighbor_modulation);
  j["channel_spacing_ghz"] = c.spacing_hz / 1e9;
  j["baud_rate_gbaud"] = c.baud_rate / 1e9;
  j["dbp"] = {{"steps_per_span", c.dbp_steps_per_span}, {"samples_per_symbol", c.dsp_samples_per_symbol}};
  j["lstm"] = {{"hidden_units", c.hidden_units}, {"k", c.half_window}};
  j["split"] = {{"train", c.n_train}, {"validation", c.n_val}, {"test", c.n_test}};
  j["training"] = {{"batch_size", c.training.batch_size},
                   {"max_epochs", c.training.max_epochs},
                   {"patience", c.training.patience},
                   {"learning_rate", c.training.adam.learning_rate}};
  json mm = json::object();
  if (c.train_launch_power_dbm) mm["train_launch_power_dbm"] = *c.train_launch_power_dbm;
  if (c.train_neighbor_modulation) mm["train_neighbor_modulation"] = to_string(*c.train_neighbor_modulation);
  if (c.train_seed) mm["train_seed"] = *c.train_seed;
  if (!mm.empty()) j["mismatch"] = mm;
  j["ber"] = {{"max_extra_test_batches", c.max_extra_test_batches},
              {"extra_batch_symbols", c.extra_batch_symbols},
              {"min_bit_errors", c.min_bit_errors},
              {"floor_bits", c.ber_floor_bits}};
  j["fiber"] = {{"alpha_db_per_km", c.fiber.alpha_db_per_km},
                {"beta2_ps2_per_km", c.fiber.beta2_ps2_per_km},
                {"gamma_per_w_km", c.fiber.gamma_per_w_km},
                {"span_km", c.fiber.span_km}};
  j["amplifier"] = {{"gain_db", c.amp.gain_db}, {"noise_figure_db", c.amp.noise_figure_db}};
  return j;
}

std::uint64_t test_frame_seed(std::uint64_t seed, int batch) {
  return derive_seed(seed, Stream::kTestFrame, static_cast<std::uint64_t>(batch));
}

std::uint64_t train_frame_seed(std::uint64_t seed) { return derive_seed(seed, Stream::kTrainFrame); }

std::uint64_t point_seed(std::uint64_t base_seed, std::size_t index) {
  return derive_seed(base_seed, Stream::kPoint, index);
}

ReceivedFrame simulate_frame(const ExperimentConfig& cfg, const ChannelCondition& cond,
                             std::uint64_t frame_seed, std::size_t n_symbols) {
  const LinkConfig link = cfg.link();
  link.validate();
  ReceivedFrame out;
  out.launch_power_dbm = cond.launch_power_dbm;
  out.tx = build_polmux_frame(frame_seed, n_symbols, Modulation::kQam16, cfg.baud_rate);

  const auto n_ch = static_cast<std::size_t>(cfg.n_channels);
  const std::size_t central = central_channel_index(n_ch);
  Waveform field;
  if (n_ch == 1) {
    field = modulate(out.tx, cfg.samples_per_symbol, cond.launch_power_dbm);
  } else {
    std::vector<Waveform> waves;
    waves.reserve(n_ch);
    for (std::size_t i = 0; i < n_ch; ++i) {
      if (i == central) {
        waves.push_back(modulate(out.tx, cfg.samples_per_symbol, cond.launch_power_dbm));
      } else {
        const auto nb = build_polmux_frame(derive_seed(frame_seed, Stream::kNeighbor, i), n_symbols,
                                           cond.neighbor_modulation, cfg.baud_rate);
        waves.push_back(modulate(nb, cfg.samples_per_symbol, cond.launch_power_dbm));
      }
    }
    field = wdm_mux(waves, cfg.spacing_hz);
  }

  auto noise = Rng::stream(frame_seed, Stream::kNoise);
  field = propagate_link(std::move(field), link, noise);
  auto rx = rx_front_end(field, n_symbols, {cfg.dsp_samples_per_symbol, true});
  out.dsp = std::move(rx.dsp);
  const auto eq = fde(out.dsp, link.fiber.beta2_ps2_per_km, link.length_km());
  out.fde_symbols = normalize_to_reference(matched_sample(eq), out.tx);
  return out;
}

std::vector<DualPolSymbol> equalize_dbp(const ExperimentConfig& cfg, const ReceivedFrame& frame,
                                        int steps_per_span) {
  DbpConfig d;
  d.steps_per_span = steps_per_span;
  d.samples_per_symbol = frame.dsp.samples_per_symbol;
  d.link = cfg.link();
  d.launch_power_dbm = frame.launch_power_dbm;
  const auto w = dbp(frame.dsp, d);
  return normalize_to_reference(matched_sample(w), frame.tx);
}

TrainedEqualizer train_equalizer(const ExperimentConfig& cfg, const nn::EpochCallback& on_epoch) {
  cfg.validate();
  const ChannelCondition cond{cfg.train_launch_power_dbm.value_or(cfg.launch_power_dbm),
                              cfg.train_neighbor_modulation.value_or(cfg.neighbor_modulation)};
  const std::uint64_t tseed = cfg.train_seed.value_or(cfg.seed);
  const auto frame = simulate_frame(cfg, cond, train_frame_seed(tseed), cfg.n_train + cfg.n_val);

  const std::span<const DualPolSymbol> all(frame.fde_symbols);
  const auto train_sym = all.subspan(0, cfg.n_train);
  const auto val_sym = all.subspan(cfg.n_train, cfg.n_val);
  const auto scale = nn::fit_standardizer(train_sym);
  const auto train_ds = nn::build_windows(train_sym, frame.tx.slice(0, cfg.n_train), cfg.half_window, scale);
  const auto val_ds = nn::build_windows(val_sym, frame.tx.slice(cfg.n_train, cfg.n_val), cfg.half_window, scale);

  auto init_rng = Rng::stream(tseed, Stream::kInit);
  auto model = nn::init_model(cfg.hidden_units, cfg.word_length(), init_rng);
  model.input = scale;
  auto shuffle_rng = Rng::stream(tseed, Stream::kShuffle);
  auto res = nn::train(train_ds, val_ds, std::move(model), cfg.training, shuffle_rng, on_epoch);
  return {std::move(res.model), std::move(res.history)};
}

namespace {

void fill_complexity(ExperimentResult& r) {
  const auto& c = r.config;
  auto model = ComplexityModel::for_band(c.band);
  model.beta2_ps2_per_km = c.fiber.beta2_ps2_per_km;
  model.span_km = c.fiber.span_km;
  model.symbol_period_ps = 1e12 / c.baud_rate;
  model.dbp_steps_per_span = c.dbp_steps_per_span;
  model.dbp_oversampling = c.dsp_samples_per_symbol;
  r.c_dbp = c_dbp(model.dbp_inputs(c.n_spans));
  r.c_fde = c_fde(model.fde_inputs(c.n_spans));
  r.c_pred = c_pred(c.hidden_units, c.word_length(), 16);
}

ExperimentResult evaluate_impl(const ExperimentConfig& cfg, const nn::BiLstmModel* model) {
  ExperimentResult r;
  r.config = cfg;
  const ChannelCondition cond{cfg.launch_power_dbm, cfg.neighbor_modulation};
  DecisionCount total;
  int batch = 0;
  for (;; ++batch) {
    const std::size_t n = batch == 0 ? cfg.n_test : cfg.extra_batch_symbols;
    const auto frame = simulate_frame(cfg, cond, test_frame_seed(cfg.seed, batch), n);
    DecisionCount count;
    if (cfg.equalizer == Equalizer::kDbp) {
      const auto sym = equalize_dbp(cfg, frame, cfg.dbp_steps_per_span);
      if (batch == 0) r.pre_equalizer_evm = evm(sym, frame.tx);
      count = count_errors(sym, frame.tx);
    } else {
      if (batch == 0) r.pre_equalizer_evm = evm(frame.fde_symbols, frame.tx);
      if (cfg.equalizer == Equalizer::kFde) {
        count = count_errors(frame.fde_symbols, frame.tx);
      } else {
        const auto ds = nn::build_windows(frame.fde_symbols, frame.tx, model->half_window(), model->input);
        count = nn::evaluate_ber(*model, ds);
      }
    }
    total += count;
    if (total.bit_errors >= cfg.min_bit_errors || total.bits >= cfg.ber_floor_bits ||
        batch >= cfg.max_extra_test_batches)
      break;
  }
  r.test_batches = batch + 1;
  r.bit_errors = total.bit_errors;
  r.n_bits = total.bits;
  r.ber = total.ber();
  r.ser = total.ser();
  fill_complexity(r);
  return r;
}

}  // namespace

ExperimentResult evaluate_experiment(const ExperimentConfig& cfg, const nn::BiLstmModel& model) {
  cfg.validate();
  if (model.word_length != cfg.word_length() || model.hidden_size != cfg.hidden_units)
    throw ConfigError("evaluate: model (L=" + std::to_string(model.hidden_size) + ", m=" +
                      std::to_string(model.word_length) + ") does not match config (L=" +
                      std::to_string(cfg.hidden_units) + ", m=" + std::to_string(cfg.word_length()) + ")");
  const auto t0 = std::chrono::steady_clock::now();
  auto r = evaluate_impl(cfg, cfg.equalizer == Equalizer::kFdeLstm ? &model : nullptr);
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult r;
  if (cfg.equalizer == Equalizer::kFdeLstm) {
    auto trained = train_equalizer(cfg);
    r = evaluate_impl(cfg, &trained.model);
    r.history = std::move(trained.history);
  } else {
    r = evaluate_impl(cfg, nullptr);
  }
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

json history_to_json(const nn::TrainHistory& h) {
  json epochs = json::array();
  for (const auto& e : h.epochs)
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"val_loss", e.val_loss},
                      {"val_accuracy", e.val_accuracy}});
  return {{"best_epoch", h.best_epoch},
          {"restored_epoch", h.restored_epoch},
          {"best_val_accuracy", h.best_val_accuracy},
          {"early_stopped", h.early_stopped},
          {"epochs_run", h.epochs.size()},
          {"epochs", epochs}};
}

json result_to_json(const ExperimentResult& r) {
  json j;
  j["config"] = config_to_json(r.config);
  j["seed"] = r.config.seed;
  j["ber"] = r.ber;
  j["ser"] = r.ser;
  j["bit_errors"] = r.bit_errors;
  j["n_bits"] = r.n_bits;
  j["test_batches"] = r.test_batches;
  j["pre_equalizer_evm"] = r.pre_equalizer_evm;
  j["complexity"] = {{"c_dbp", r.c_dbp}, {"c_fde", r.c_fde}, {"c_pred", r.c_pred}};
  if (r.history) {
    const auto& h = *r.history;
    j["training"] = {{"best_epoch", h.best_epoch},
                     {"restored_epoch", h.restored_epoch},
                     {"best_val_accuracy", h.best_val_accuracy},
                     {"epochs_run", h.epochs.size()},
                     {"early_stopped", h.early_stopped},
                     {"final_train_loss", h.epochs.empty() ? 0.0 : h.epochs.back().train_loss}};
  }
  j["wall_time_s"] = r.wall_time_s;
  return j;
}

void write_csv_header(std::ostream& os) {
  os << "band,n_channels,distance_km,power_dbm,equalizer,steps_per_span,L,m,ber,n_bits,seed\n";
}

void write_csv_row(std::ostream& os, const ExperimentResult& r) {
  const auto& c = r.config;
  const bool lstm = c.equalizer == Equalizer::kFdeLstm;
  std::ostringstream line;
  line << std::setprecision(12);
  line << static_cast<int>(c.band) << ',' << c.n_channels << ',' << c.distance_km() << ','
       << c.launch_power_dbm << ',' << to_string(c.equalizer) << ','
       << (c.equalizer == Equalizer::kDbp ? c.dbp_steps_per_span : 0) << ','
       << (lstm ? c.hidden_units : 0) << ',' << (lstm ? c.word_length() : 0) << ',' << r.ber << ','
       << r.n_bits << ',' << c.seed << '\n';
  os << line.str();
}

namespace {

template <typename T, typename Parse>
std::vector<T> axis(json& doc, const std::string& key, Parse&& parse) {
  std::vector<T> out;
  auto it = doc.find(key);
  if (it == doc.end()) return out;
  if (it->is_array()) {
    for (const auto& v : *it) out.push_back(parse(v, key));
    if (out.empty()) {
      doc.erase(it);
    } else {
      *it = it->front();
    }
  } else {
    out.push_back(parse(*it, key));
  }
  return out;
}

template <typename T>
std::vector<T> nested_axis(json& doc, const std::string& obj, const std::string& key) {
  auto it = doc.find(obj);
  if (it == doc.end() || !it->is_object()) return {};
  return axis<T>(*it, key, [&](const json& v, const std::string&) {
    if (!v.is_number_integer()) throw ConfigError(obj + "." + key + ": expected integers, got " + v.dump());
    return v.get<T>();
  });
}

}  // namespace

SweepConfig sweep_from_json(const json& j) {
  SweepConfig s;
  json doc = j;
  bool empty_axis = false;
  auto note_empty = [&](const json& d, const std::string& key) {
    auto it = d.find(key);
    if (it != d.end() && it->is_array() && it->empty()) empty_axis = true;
  };
  note_empty(doc, "launch_power_dbm");
  note_empty(doc, "n_spans");
  note_empty(doc, "equalizer");
  for (const char* obj : {"dbp", "lstm"}) {
    auto it = doc.find(obj);
    if (it != doc.end() && it->is_object())
      for (const char* key : {"steps_per_span", "hidden_units", "k"}) note_empty(*it, key);
  }

  s.launch_power_dbm = axis<double>(doc, "launch_power_dbm", [](const json& v, const std::string& k) {
    if (!v.is_number()) throw ConfigError(k + ": expected numbers, got " + v.dump());
    return v.get<double>();
  });
  s.n_spans = axis<int>(doc, "n_spans", [](const json& v, const std::string& k) {
    if (!v.is_number_integer()) throw ConfigError(k + ": expected integers, got " + v.dump());
    return v.get<int>();
  });
  s.equalizer = axis<Equalizer>(doc, "equalizer", [](const json& v, const std::string& k) {
    if (!v.is_string()) throw ConfigError(k + ": expected strings, got " + v.dump());
    return parse_equalizer(v.get<std::string>(), k);
  });
  s.dbp_steps_per_span = nested_axis<int>(doc, "dbp", "steps_per_span");
  s.hidden_units = nested_axis<int>(doc, "lstm", "hidden_units");
  s.half_window = nested_axis<int>(doc, "lstm", "k");
  s.base = config_from_json(doc);
  s.empty = empty_axis;
  return s;
}

std::vector<ExperimentConfig> SweepConfig::points() const {
  auto or_base = [](const auto& v, auto fallback) {
    using T = typename std::decay_t<decltype(v)>::value_type;
    return v.empty() ? std::vector<T>{static_cast<T>(fallback)} : v;
  };
  if (empty) return {};
  const auto powers = or_base(launch_power_dbm, base.launch_power_dbm);
  const auto spans = or_base(n_spans, base.n_spans);
  const auto eqs = or_base(equalizer, base.equalizer);
  const auto steps = or_base(dbp_steps_per_span, base.dbp_steps_per_span);
  const auto hidden = or_base(hidden_units, base.hidden_units);
  const auto ks = or_base(half_window, base.half_window);

  std::vector<ExperimentConfig> out;
  for (int ns : spans)
    for (Equalizer eq : eqs)
      for (int st : steps)
        for (int l : hidden)
          for (int k : ks)
            for (double p : powers) {
              ExperimentConfig c = base;
              c.n_spans = ns;
              c.equalizer = eq;
              c.dbp_steps_per_span = st;
              c.hidden_units = l;
              c.half_window = k;
              c.launch_power_dbm = p;
              out.push_back(c);
            }
  return out;
}

std::vector<SweepRow> run_sweep(const SweepConfig& sweep, std::ostream* csv, std::ostream* log) {
  auto pts = sweep.points();
  const bool mismatch = sweep.base.train_launch_power_dbm || sweep.base.train_neighbor_modulation;
  const std::uint64_t shared_train_seed =
      sweep.base.train_seed.value_or(derive_seed(sweep.base.seed, Stream::kMismatchTrain));

  std::map<std::string, std::pair<int, TrainedEqualizer>> trained;
  std::vector<SweepRow> rows;
  if (csv) write_csv_header(*csv);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    SweepRow row;
    row.index = i;
    row.config = pts[i];
    row.config.seed = point_seed(sweep.base.seed, i);
    if (mismatch) row.config.train_seed = shared_train_seed;
    try {
      row.config.validate();
      if (mismatch && row.config.equalizer == Equalizer::kFdeLstm) {
        // Everything that shapes training, with the test-side fields blanked.
        ExperimentConfig key_cfg = row.config;
        key_cfg.seed = 0;
        key_cfg.launch_power_dbm = 0.0;
        key_cfg.neighbor_modulation = Modulation::kQam16;
        if (!key_cfg.train_launch_power_dbm) key_cfg.train_launch_power_dbm = row.config.launch_power_dbm;
        if (!key_cfg.train_neighbor_modulation)
          key_cfg.train_neighbor_modulation = row.config.neighbor_modulation;
        const auto key = config_to_json(key_cfg).dump();
        auto it = trained.find(key);
        if (it == trained.end()) {
          auto train_cfg = row.config;
          train_cfg.train_launch_power_dbm = key_cfg.train_launch_power_dbm;
          train_cfg.train_neighbor_modulation = key_cfg.train_neighbor_modulation;
          const int run = static_cast<int>(trained.size());
          it = trained.emplace(key, std::pair{run, train_equalizer(train_cfg)}).first;
        }
        row.training_run = it->second.first;
        auto r = evaluate_experiment(row.config, it->second.second.model);
        r.history = it->second.second.history;
        row.result = std::move(r);
      } else {
        row.result = run_experiment(row.config);
      }
      if (csv) write_csv_row(*csv, *row.result);
      if (log) *log << "point " << i << ": ber=" << row.result->ber << '\n';
    } catch (const Error& e) {
      row.error = e.what();
      if (log) *log << "point " << i << " failed: " << e.what() << '\n';
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fibereq
