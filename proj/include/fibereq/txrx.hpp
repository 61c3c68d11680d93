#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fibereq/fft.hpp"

namespace fibereq {

inline constexpr double kDefaultBaudRate = 25e9;
inline constexpr double kRrcRolloff = 0.1;

enum class Modulation { kQam16, kQpsk };

constexpr int bits_per_symbol(Modulation m) { return m == Modulation::kQam16 ? 4 : 2; }
constexpr int constellation_size(Modulation m) { return 1 << bits_per_symbol(m); }

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

// One symbol period of both polarizations as four reals.
struct DualPolSymbol {
  double ix = 0.0;
  double qx = 0.0;
  double iy = 0.0;
  double qy = 0.0;

  cplx x() const { return {ix, qx}; }
  cplx y() const { return {iy, qy}; }
  static DualPolSymbol from(cplx x, cplx y) { return {x.real(), x.imag(), y.real(), y.imag()}; }
};

struct SymbolFrame {
  std::vector<DualPolSymbol> symbols;
  std::vector<std::uint8_t> labels_x;
  std::vector<std::uint8_t> labels_y;
  double baud_rate = kDefaultBaudRate;
  Modulation modulation = Modulation::kQam16;

  std::size_t size() const { return symbols.size(); }
  // Contiguous sub-frame [first, first + count).
  SymbolFrame slice(std::size_t first, std::size_t count) const;
};

// Dual-polarization complex baseband field in sqrt(W). Sample rate is
// baud_rate * samples_per_symbol by construction.
struct Waveform {
  CVec ex;
  CVec ey;
  double baud_rate = kDefaultBaudRate;
  int samples_per_symbol = 1;
  // Position of the WDM comb center relative to 0 Hz of this waveform.
  double center_offset = 0.0;

  double sample_rate() const { return baud_rate * samples_per_symbol; }
  std::size_t size() const { return ex.size(); }
  // Mean of |Ex|^2 + |Ey|^2.
  double mean_power() const;
  double energy() const;
};

// Gray map: class index = b3b2b1b0, I from b3b2, Q from b1b0 with
// 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3, scaled by 1/sqrt(10).
const std::array<cplx, 16>& qam16_constellation();
// QPSK: class index = b1b0, I from b1, Q from b0 with 0 -> -1, 1 -> +1.
const std::array<cplx, 4>& qpsk_constellation();
cplx constellation_point(Modulation m, unsigned cls);

std::vector<cplx> map_bits_to_qam16(std::span<const std::uint8_t> bits);

struct HardDecision {
  unsigned cls = 0;
  std::array<std::uint8_t, 4> bits{};  // b3, b2, b1, b0
};

// Nearest 16-QAM point; ties go to the lowest class index.
HardDecision demap_hard(cplx s);
unsigned decide(Modulation m, cplx s);

// I.i.d. uniform classes per polarization drawn from the data stream of seed.
SymbolFrame build_polmux_frame(std::uint64_t seed, std::size_t n_symbols,
                               Modulation m = Modulation::kQam16,
                               double baud_rate = kDefaultBaudRate);

// Raised-cosine spectrum (roll-off kRrcRolloff) at frequency f.
double raised_cosine(double f, double baud_rate, double rolloff = kRrcRolloff);

// RRC pulse shaping; the result is rescaled so mean_power() equals the
// launch power exactly.
Waveform modulate(const SymbolFrame& frame, int samples_per_symbol, double launch_power_dbm);

std::size_t central_channel_index(std::size_t n_channels);
// Channel offsets relative to the comb center, e.g. {-225, ..., 225} GHz for
// ten channels at 50 GHz.
std::vector<double> wdm_channel_offsets(std::size_t n_channels, double spacing_hz);
// Frequency-shifted sum placing the central channel at 0 Hz.
Waveform wdm_mux(std::span<const Waveform> channels, double spacing_hz);

struct RxOptions {
  int dsp_samples_per_symbol = 4;
  // Brick-wall electrical low-pass with cut-off at the baud rate.
  bool lowpass = true;
};

struct RxOutput {
  std::vector<DualPolSymbol> symbols;  // matched filter, 1 sample/symbol
  Waveform dsp;                        // low-passed, decimated for DSP
};

RxOutput rx_front_end(const Waveform& field, std::size_t frame_len, const RxOptions& opts = {});

// Frequency-domain resampling to samples_per_symbol, keeping |f| < cutoff_hz
// (cutoff_hz <= 0 keeps everything the new rate can represent).
Waveform resample(const Waveform& w, int samples_per_symbol, double cutoff_hz);

// Matched RRC filter then sampling at the pulse centers.
std::vector<DualPolSymbol> matched_sample(const Waveform& w);

// Ideal receiver: per-polarization least-squares complex gain against the
// transmitted symbols removes amplitude scale and common phase.
std::vector<DualPolSymbol> normalize_to_reference(std::span<const DualPolSymbol> rx,
                                                  const SymbolFrame& tx);

// RMS error vector over both polarizations relative to RMS reference.
double evm(std::span<const DualPolSymbol> rx, const SymbolFrame& tx);

struct DecisionCount {
  std::uint64_t bit_errors = 0;
  std::uint64_t symbol_errors = 0;
  std::uint64_t bits = 0;
  std::uint64_t symbols = 0;  // per-polarization decisions
  double ber() const { return bits ? static_cast<double>(bit_errors) / static_cast<double>(bits) : 0.0; }
  double ser() const {
    return symbols ? static_cast<double>(symbol_errors) / static_cast<double>(symbols) : 0.0;
  }
  DecisionCount& operator+=(const DecisionCount& o);
};

// Hard decisions on both polarizations against the frame's labels.
DecisionCount count_errors(std::span<const DualPolSymbol> rx, const SymbolFrame& tx);

// Little-endian float64 records (Ix, Qx, Iy, Qy).
void dump_waveform(const std::filesystem::path& path, const Waveform& w);
void dump_symbols(const std::filesystem::path& path, std::span<const DualPolSymbol> symbols);

}  // namespace fibereq
