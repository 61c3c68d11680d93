#pragma once

#include "fibereq/rng.hpp"
#include "fibereq/txrx.hpp"

namespace fibereq {

enum class Band { kO = 1310, kC = 1550 };

double carrier_wavelength_m(Band band);
double carrier_frequency_hz(Band band);

struct FiberParams {
  double alpha_db_per_km = 0.2;
  double beta2_ps2_per_km = -21.5;
  double gamma_per_w_km = 1.3;
  double span_km = 50.0;

  static FiberParams for_band(Band band);
  double alpha_per_km() const;  // power attenuation in 1/km
  void validate() const;
};

struct AmpParams {
  double gain_db = 10.0;
  double noise_figure_db = 5.0;
  bool noiseless = false;
  double carrier_hz = 0.0;  // photon energy reference; 0 selects the C-band carrier

  static AmpParams for_band(Band band);
  double gain() const;
  // Per-polarization ASE power spectral density n_sp*h*nu*(G-1) in W/Hz,
  // with n_sp = 10^(NF/10)/2.
  double ase_psd() const;
};

struct LinkConfig {
  int n_spans = 10;
  int steps_per_span_forward = 100;
  int samples_per_symbol = 16;
  Band band = Band::kC;
  FiberParams fiber;
  AmpParams amp;
  int n_channels = 1;
  double spacing_hz = 50e9;
  double baud_rate = kDefaultBaudRate;

  // Table-default fiber and amplifier for the band.
  static LinkConfig for_band(Band band);
  double length_km() const { return n_spans * fiber.span_km; }
  void validate() const;
};

// Symmetric split-step solution of the Manakov equation over one span.
Waveform ssfm_span(Waveform field, const FiberParams& fiber, int n_steps);

// Lumped amplifier: gain sqrt(G) on the field plus white complex Gaussian
// ASE per polarization over the full simulation bandwidth.
Waveform edfa(Waveform field, const AmpParams& amp, Rng& rng);

// n_spans x (span, amplifier).
Waveform propagate_link(Waveform field, const LinkConfig& cfg, Rng& rng);

namespace detail {

// Strang-split propagation over length_km in n_steps uniform steps.
// Signed coefficients let the same kernel run the inverse channel.
void split_step(Waveform& field, double alpha_per_km, double beta2_ps2_per_km,
                double gamma_per_w_km, double length_km, int n_steps);

// Linear all-pass exp(-j (beta2/2) w^2 L) applied in the frequency domain.
void apply_dispersion(Waveform& field, double beta2_ps2_per_km, double length_km);

}  // namespace detail

}  // namespace fibereq
