#include "fibereq/fiber.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fibereq/errors.hpp"

namespace fibereq {
namespace {

constexpr double kPlanck = 6.62607015e-34;
constexpr double kLightSpeed = 299792458.0;
constexpr double kManakov = 8.0 / 9.0;

// Angular frequency in rad/ps for each DFT bin.
std::vector<double> omega_rad_per_ps(const Waveform& w) {
  auto f = fft_frequencies(w.size(), w.sample_rate());
  for (auto& v : f) v *= 2.0 * std::numbers::pi * 1e-12;
  return f;
}

void check_finite(const Waveform& w, const char* where) {
  if (!std::isfinite(w.energy())) throw NumericError(std::string(where) + ": non-finite field");
}

}  // namespace

double carrier_wavelength_m(Band band) { return band == Band::kO ? 1310e-9 : 1550e-9; }
double carrier_frequency_hz(Band band) { return kLightSpeed / carrier_wavelength_m(band); }

FiberParams FiberParams::for_band(Band band) {
  if (band == Band::kO) return {0.34, -0.82, 1.3, 50.0};
  return {0.2, -21.5, 1.3, 50.0};
}

double FiberParams::alpha_per_km() const { return alpha_db_per_km * std::log(10.0) / 10.0; }

void FiberParams::validate() const {
  if (!(alpha_db_per_km >= 0.0)) throw ConfigError("fiber: attenuation must be >= 0");
  if (!(span_km > 0.0)) throw ConfigError("fiber: span length must be > 0");
  if (!std::isfinite(beta2_ps2_per_km) || !std::isfinite(gamma_per_w_km))
    throw ConfigError("fiber: non-finite beta2 or gamma");
}

AmpParams AmpParams::for_band(Band band) {
  AmpParams a;
  a.gain_db = band == Band::kO ? 17.0 : 10.0;
  a.noise_figure_db = 5.0;
  a.carrier_hz = carrier_frequency_hz(band);
  return a;
}

double AmpParams::gain() const { return std::pow(10.0, gain_db / 10.0); }

double AmpParams::ase_psd() const {
  const double nu = carrier_hz > 0.0 ? carrier_hz : carrier_frequency_hz(Band::kC);
  const double n_sp = std::pow(10.0, noise_figure_db / 10.0) / 2.0;
  return n_sp * kPlanck * nu * (gain() - 1.0);
}

LinkConfig LinkConfig::for_band(Band band) {
  LinkConfig c;
  c.band = band;
  c.fiber = FiberParams::for_band(band);
  c.amp = AmpParams::for_band(band);
  return c;
}

void LinkConfig::validate() const {
  if (n_spans < 0) throw ConfigError("link: n_spans must be >= 0");
  if (steps_per_span_forward < 1) throw ConfigError("link: steps_per_span_forward must be >= 1");
  if (samples_per_symbol < 2 || samples_per_symbol % 2 != 0)
    throw ConfigError("link: samples_per_symbol must be even and >= 2");
  if (n_channels < 1) throw ConfigError("link: n_channels must be >= 1");
  if (!(baud_rate > 0.0)) throw ConfigError("link: baud_rate must be > 0");
  fiber.validate();
  if (!(amp.gain_db > 0.0)) throw ConfigError("link: amplifier gain must be > 0 dB");
}

namespace detail {

void apply_dispersion(Waveform& field, double beta2_ps2_per_km, double length_km) {
  if (field.size() == 0) return;
  const auto w = omega_rad_per_ps(field);
  CVec h(w.size());
  for (std::size_t k = 0; k < w.size(); ++k)
    h[k] = std::polar(1.0, -0.5 * beta2_ps2_per_km * w[k] * w[k] * length_km);
  for (CVec* pol : {&field.ex, &field.ey}) {
    fft_forward(*pol);
    for (std::size_t k = 0; k < h.size(); ++k) (*pol)[k] *= h[k];
    fft_inverse(*pol);
  }
}

void split_step(Waveform& field, double alpha_per_km, double beta2_ps2_per_km,
                double gamma_per_w_km, double length_km, int n_steps) {
  if (n_steps < 1) throw ConfigError("split_step: n_steps must be >= 1");
  const std::size_t n = field.size();
  if (n == 0) return;
  const double h = length_km / n_steps;
  // Nonlinear phase over a step evaluated at the mid-step power equals the
  // exact lossy integral when the step length is 2 sinh(alpha h / 2) / alpha.
  const double h_nl =
      alpha_per_km == 0.0 ? h : 2.0 * std::sinh(alpha_per_km * h / 2.0) / alpha_per_km;
  const double nl = -gamma_per_w_km * kManakov * h_nl;

  const auto w = omega_rad_per_ps(field);
  CVec half(n), full(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double amp = std::exp(-alpha_per_km * h / 4.0);
    half[k] = std::polar(amp, -0.5 * beta2_ps2_per_km * w[k] * w[k] * (h / 2.0));
    full[k] = half[k] * half[k];
  }

  auto& x = field.ex;
  auto& y = field.ey;
  fft_forward(x);
  fft_forward(y);
  for (std::size_t k = 0; k < n; ++k) {
    x[k] *= half[k];
    y[k] *= half[k];
  }
  for (int s = 0; s < n_steps; ++s) {
    fft_inverse(x);
    fft_inverse(y);
    if (nl != 0.0) {
      for (std::size_t i = 0; i < n; ++i) {
        const cplx rot = std::polar(1.0, nl * (std::norm(x[i]) + std::norm(y[i])));
        x[i] *= rot;
        y[i] *= rot;
      }
    }
    fft_forward(x);
    fft_forward(y);
    const CVec& lin = (s + 1 < n_steps) ? full : half;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] *= lin[k];
      y[k] *= lin[k];
    }
  }
  fft_inverse(x);
  fft_inverse(y);
}

}  // namespace detail

Waveform ssfm_span(Waveform field, const FiberParams& fiber, int n_steps) {
  if (n_steps < 1) throw ConfigError("ssfm_span: n_steps must be >= 1");
  fiber.validate();
  check_finite(field, "ssfm_span input");
  detail::split_step(field, fiber.alpha_per_km(), fiber.beta2_ps2_per_km, fiber.gamma_per_w_km,
                     fiber.span_km, n_steps);
  check_finite(field, "ssfm_span");
  return field;
}

Waveform edfa(Waveform field, const AmpParams& amp, Rng& rng) {
  if (!(amp.gain_db > 0.0)) throw ConfigError("edfa: gain must be > 0 dB");
  const double g = std::sqrt(amp.gain());
  for (std::size_t i = 0; i < field.size(); ++i) {
    field.ex[i] *= g;
    field.ey[i] *= g;
  }
  if (amp.noiseless) return field;
  // E|n|^2 = PSD * bandwidth, split evenly over the two quadratures.
  const double sigma = std::sqrt(amp.ase_psd() * field.sample_rate() / 2.0);
  for (CVec* pol : {&field.ex, &field.ey})
    for (auto& v : *pol) {
      const double re = rng.normal();
      const double im = rng.normal();
      v += cplx(sigma * re, sigma * im);
    }
  return field;
}

Waveform propagate_link(Waveform field, const LinkConfig& cfg, Rng& rng) {
  cfg.validate();
  for (int s = 0; s < cfg.n_spans; ++s) {
    try {
      field = ssfm_span(std::move(field), cfg.fiber, cfg.steps_per_span_forward);
    } catch (const NumericError& e) {
      throw NumericError("propagate_link: span " + std::to_string(s) + ": " + e.what());
    }
    field = edfa(std::move(field), cfg.amp, rng);
  }
  return field;
}

}  // namespace fibereq
