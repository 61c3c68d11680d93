#include "fibereq/complexity.hpp"

#include <cmath>
#include <iomanip>
#include <string>

#include "fibereq/errors.hpp"
#include "fibereq/metrics.hpp"

namespace fibereq {
namespace {

double fft_term(const ComplexityInputs& in) {
  const double n = in.fft_size;
  const double denom = (n - in.dispersive_taps + 1.0) * std::log2(in.constellation_order);
  if (!(denom > 0.0))
    throw DomainError("complexity: FFT size " + std::to_string(n) +
                      " too small for dispersive taps " + std::to_string(in.dispersive_taps));
  return n * (std::log2(n) + 1.0) * in.oversampling / denom;
}

}  // namespace

double c_dbp(const ComplexityInputs& in) {
  return 4.0 * in.n_span * in.steps_per_span * (fft_term(in) + in.oversampling);
}

double c_fde(const ComplexityInputs& in) { return 4.0 * fft_term(in); }

double c_pred(double hidden_units, double word_length, double constellation_order) {
  const double l = hidden_units;
  return 16.0 * (l * l + l * word_length + l) / std::log2(constellation_order);
}

double c_train(double epochs, double train_symbols, double c_pred_value) {
  return epochs * train_symbols * c_pred_value;
}

double training_overhead_fraction(double epochs, double train_symbols,
                                  double symbols_between_retraining) {
  if (!(symbols_between_retraining > 0.0))
    throw DomainError("training_overhead_fraction: period must be positive");
  return epochs * train_symbols / symbols_between_retraining;
}

ComplexityModel ComplexityModel::for_band(Band band) {
  ComplexityModel m;
  m.band = band;
  m.beta2_ps2_per_km = FiberParams::for_band(band).beta2_ps2_per_km;
  return m;
}

double ComplexityModel::dispersive_taps(double length_km, double oversampling) const {
  return oversampling * delay_spread_ps(beta2_ps2_per_km, length_km, bandwidth_thz) /
         symbol_period_ps;
}

double ComplexityModel::fft_size_for(double taps) const {
  double n = 1.0;
  while (n < 4.0 * taps || n < min_fft_size) n *= 2.0;
  return n;
}

ComplexityInputs ComplexityModel::dbp_inputs(int n_spans) const {
  ComplexityInputs in;
  in.n_span = n_spans;
  in.steps_per_span = dbp_steps_per_span;
  in.oversampling = dbp_oversampling;
  in.constellation_order = constellation_order;
  in.dispersive_taps = dispersive_taps(span_km, dbp_oversampling);
  in.fft_size = fft_size_for(in.dispersive_taps);
  return in;
}

ComplexityInputs ComplexityModel::fde_inputs(int n_spans) const {
  ComplexityInputs in;
  in.oversampling = fde_oversampling;
  in.constellation_order = constellation_order;
  in.dispersive_taps = dispersive_taps(n_spans * span_km, fde_oversampling);
  in.fft_size = fft_size_for(in.dispersive_taps);
  return in;
}

ComplexityRow complexity_at(const ComplexityModel& model, int n_spans, double hidden_units,
                            double word_length) {
  ComplexityRow r;
  r.distance_km = n_spans * model.span_km;
  r.c_dbp = c_dbp(model.dbp_inputs(n_spans));
  r.c_fde = c_fde(model.fde_inputs(n_spans));
  r.c_pred = c_pred(hidden_units, word_length, model.constellation_order);
  r.c_total_lstm = r.c_pred + r.c_fde;
  r.band = model.band;
  r.hidden_units = hidden_units;
  r.word_length = word_length;
  return r;
}

std::optional<int> crossover_spans(int max_spans, const std::function<double(int)>& lstm_cost,
                                   const std::function<double(int)>& dbp_cost) {
  for (int s = 1; s <= max_spans; ++s)
    if (lstm_cost(s) < dbp_cost(s)) return s;
  return std::nullopt;
}

std::optional<double> crossover_distance(const ComplexityModel& model, double hidden_units,
                                         double word_length, int max_spans) {
  auto spans = crossover_spans(
      max_spans,
      [&](int s) { return complexity_at(model, s, hidden_units, word_length).c_total_lstm; },
      [&](int s) { return c_dbp(model.dbp_inputs(s)); });
  if (!spans) return std::nullopt;
  return *spans * model.span_km;
}

std::vector<ComplexityRow> complexity_sweep(const ComplexityModel& model, double hidden_units,
                                            double word_length, int max_spans) {
  std::vector<ComplexityRow> rows;
  for (int s = 1; s <= max_spans; ++s) rows.push_back(complexity_at(model, s, hidden_units, word_length));
  return rows;
}

void write_complexity_csv(std::ostream& os, const std::vector<ComplexityRow>& rows) {
  os << "distance_km,c_dbp,c_fde,c_pred,c_total_lstm,band,L,m\n";
  os << std::setprecision(10);
  for (const auto& r : rows) {
    os << r.distance_km << ',' << r.c_dbp << ',' << r.c_fde << ',' << r.c_pred << ','
       << r.c_total_lstm << ',' << static_cast<int>(r.band) << ',' << r.hidden_units << ','
       << r.word_length << '\n';
  }
}

}  // namespace fibereq
