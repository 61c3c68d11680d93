#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "fibereq/fiber.hpp"

namespace fibereq {

// Real multiplications per bit for the classical and recurrent equalizers.
struct ComplexityInputs {
  double n_span = 1;
  double steps_per_span = 1;
  double fft_size = 64;          // N
  double oversampling = 4;       // n_s
  double constellation_order = 16;
  double dispersive_taps = 1;    // N_D = n_s * tau_D / T
  double hidden_units = 16;      // L
  double word_length = 31;       // m
  double epochs = 100;
  double train_symbols = 20000;
};

// 4 N_span N_StpSt [ N (log2 N + 1) n_s / ((N - N_D + 1) log2 M) + n_s ]
double c_dbp(const ComplexityInputs& in);
// 4 N (log2 N + 1) n_s / ((N - N_D + 1) log2 M)
double c_fde(const ComplexityInputs& in);
// 16 (L^2 + L m + L) / log2 M
double c_pred(double hidden_units, double word_length, double constellation_order);
// N_ep N_TS C_pred
double c_train(double epochs, double train_symbols, double c_pred_value);

// Share of prediction work spent on retraining when the network is retrained
// once every `symbols_between_retraining` symbol periods.
double training_overhead_fraction(double epochs, double train_symbols,
                                  double symbols_between_retraining);

// FFT-size schedule used to evaluate C_DBP and C_FDE against distance.
struct ComplexityModel {
  Band band = Band::kC;
  double beta2_ps2_per_km = -21.5;
  double span_km = 50.0;
  double bandwidth_thz = 0.05;   // optical bandwidth for the delay spread
  double symbol_period_ps = 40.0;
  double dbp_steps_per_span = 4;
  double dbp_oversampling = 4;
  double fde_oversampling = 2;
  double constellation_order = 16;
  double min_fft_size = 64;

  static ComplexityModel for_band(Band band);

  // N_D for a fiber segment at the given oversampling.
  double dispersive_taps(double length_km, double oversampling) const;
  // Smallest power of two >= 4 N_D, at least min_fft_size.
  double fft_size_for(double taps) const;

  ComplexityInputs dbp_inputs(int n_spans) const;
  ComplexityInputs fde_inputs(int n_spans) const;
};

struct ComplexityRow {
  double distance_km = 0;
  double c_dbp = 0;
  double c_fde = 0;
  double c_pred = 0;
  double c_total_lstm = 0;
  Band band = Band::kC;
  double hidden_units = 0;
  double word_length = 0;
};

ComplexityRow complexity_at(const ComplexityModel& model, int n_spans, double hidden_units,
                            double word_length);

// Smallest span count in [1, max_spans] at which lstm_cost < dbp_cost.
std::optional<int> crossover_spans(int max_spans, const std::function<double(int)>& lstm_cost,
                                   const std::function<double(int)>& dbp_cost);

// Distance in km where FDE + bi-LSTM prediction becomes cheaper than DBP.
std::optional<double> crossover_distance(const ComplexityModel& model, double hidden_units,
                                         double word_length, int max_spans = 400);

std::vector<ComplexityRow> complexity_sweep(const ComplexityModel& model, double hidden_units,
                                            double word_length, int max_spans);

// Columns: distance_km,c_dbp,c_fde,c_pred,c_total_lstm,band,L,m
void write_complexity_csv(std::ostream& os, const std::vector<ComplexityRow>& rows);

}  // namespace fibereq
