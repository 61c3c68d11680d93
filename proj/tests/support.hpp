#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "fibereq/fft.hpp"
#include "fibereq/txrx.hpp"

namespace testing {

// sqrt(sum |a-b|^2 / sum |b|^2) over both polarizations.
inline double relative_rms(const fibereq::Waveform& a, const fibereq::Waveform& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    num += std::norm(a.ex[i] - b.ex[i]) + std::norm(a.ey[i] - b.ey[i]);
    den += std::norm(b.ex[i]) + std::norm(b.ey[i]);
  }
  return std::sqrt(num / den);
}

inline fibereq::Waveform test_signal(std::uint64_t seed, std::size_t n_symbols, int sps,
                                     double power_dbm) {
  const auto frame = fibereq::build_polmux_frame(seed, n_symbols);
  return fibereq::modulate(frame, sps, power_dbm);
}

}  // namespace testing
