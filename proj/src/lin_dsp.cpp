#include "fibereq/lin_dsp.hpp"

#include <cmath>
#include <string>

#include "fibereq/errors.hpp"

namespace fibereq {

Waveform fde(Waveform samples, double beta2_ps2_per_km, double total_length_km) {
  if (samples.size() > 0 && samples.samples_per_symbol < 2)
    throw ConfigError("fde: needs >= 2 samples/symbol");
  detail::apply_dispersion(samples, -beta2_ps2_per_km, total_length_km);
  return samples;
}

void DbpConfig::validate() const {
  if (steps_per_span < 1) throw ConfigError("dbp: steps_per_span must be >= 1");
  if (samples_per_symbol < 2) throw ConfigError("dbp: samples_per_symbol must be >= 2");
  link.validate();
}

Waveform dbp(Waveform samples, const DbpConfig& cfg) {
  cfg.validate();
  if (samples.samples_per_symbol != cfg.samples_per_symbol)
    throw ConfigError("dbp: input has " + std::to_string(samples.samples_per_symbol) +
                      " samples/symbol, configured " + std::to_string(cfg.samples_per_symbol));
  if (!std::isfinite(samples.energy())) throw NumericError("dbp: non-finite input");
  if (samples.size() == 0) return samples;

  if (cfg.rescale_to_launch_power) {
    const double p = samples.mean_power();
    if (p > 0.0) {
      const double s = std::sqrt(dbm_to_watt(cfg.launch_power_dbm) / p);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        samples.ex[i] *= s;
        samples.ey[i] *= s;
      }
    }
  }

  const auto& f = cfg.link.fiber;
  const double inv_gain = 1.0 / std::sqrt(cfg.link.amp.gain());
  for (int s = 0; s < cfg.link.n_spans; ++s) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      samples.ex[i] *= inv_gain;
      samples.ey[i] *= inv_gain;
    }
    detail::split_step(samples, -f.alpha_per_km(), -f.beta2_ps2_per_km, -f.gamma_per_w_km,
                       f.span_km, cfg.steps_per_span);
    if (!std::isfinite(samples.energy()))
      throw NumericError("dbp: non-finite field after span " + std::to_string(s));
  }
  return samples;
}

}  // namespace fibereq
