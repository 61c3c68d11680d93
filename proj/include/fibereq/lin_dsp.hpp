#pragma once

#include "fibereq/fiber.hpp"
#include "fibereq/txrx.hpp"

namespace fibereq {

// Ideal chromatic dispersion compensation: the all-pass filter
// exp(+j (beta2/2) w^2 L) on both polarizations.
Waveform fde(Waveform samples, double beta2_ps2_per_km, double total_length_km);

struct DbpConfig {
  int steps_per_span = 2;
  int samples_per_symbol = 4;
  LinkConfig link;
  // Known launch power per channel; the input is rescaled to it.
  double launch_power_dbm = 0.0;
  bool rescale_to_launch_power = true;

  void validate() const;
};

// Single-channel digital back-propagation: spans in reverse order, each
// undoing the amplifier gain then propagating with negated loss,
// dispersion and nonlinearity.
Waveform dbp(Waveform samples, const DbpConfig& cfg);

}  // namespace fibereq
