#include "fibereq/txrx.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>

#include "fibereq/errors.hpp"
#include "fibereq/rng.hpp"

namespace fibereq {
namespace {

// Gray level for a two-bit group: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
constexpr double gray_level(unsigned two_bits) {
  switch (two_bits & 3U) {
    case 0b00: return -3.0;
    case 0b01: return -1.0;
    case 0b11: return 1.0;
    default: return 3.0;
  }
}

std::array<cplx, 16> make_qam16() {
  std::array<cplx, 16> pts{};
  const double s = 1.0 / std::sqrt(10.0);
  for (unsigned k = 0; k < 16; ++k) pts[k] = cplx(gray_level(k >> 2) * s, gray_level(k) * s);
  return pts;
}

std::array<cplx, 4> make_qpsk() {
  std::array<cplx, 4> pts{};
  const double s = 1.0 / std::sqrt(2.0);
  for (unsigned k = 0; k < 4; ++k) pts[k] = cplx(((k >> 1) & 1U) ? s : -s, (k & 1U) ? s : -s);
  return pts;
}

template <std::size_t N>
unsigned nearest(const std::array<cplx, N>& pts, cplx s) {
  unsigned best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (unsigned k = 0; k < N; ++k) {
    const double d = std::norm(s - pts[k]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

void require_finite(cplx s) {
  if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
    throw NumericError("demap: non-finite symbol");
}

}  // namespace

double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
double watt_to_dbm(double watt) { return 10.0 * std::log10(watt / 1e-3); }

SymbolFrame SymbolFrame::slice(std::size_t first, std::size_t count) const {
  if (first + count > size()) throw ShapeError("SymbolFrame::slice out of range");
  SymbolFrame out;
  out.baud_rate = baud_rate;
  out.modulation = modulation;
  const auto b = static_cast<std::ptrdiff_t>(first);
  const auto e = static_cast<std::ptrdiff_t>(first + count);
  out.symbols.assign(symbols.begin() + b, symbols.begin() + e);
  out.labels_x.assign(labels_x.begin() + b, labels_x.begin() + e);
  out.labels_y.assign(labels_y.begin() + b, labels_y.begin() + e);
  return out;
}

double Waveform::energy() const {
  double e = 0.0;
  for (std::size_t i = 0; i < ex.size(); ++i) e += std::norm(ex[i]) + std::norm(ey[i]);
  return e;
}

double Waveform::mean_power() const {
  return ex.empty() ? 0.0 : energy() / static_cast<double>(ex.size());
}

const std::array<cplx, 16>& qam16_constellation() {
  static const auto pts = make_qam16();
  return pts;
}

const std::array<cplx, 4>& qpsk_constellation() {
  static const auto pts = make_qpsk();
  return pts;
}

cplx constellation_point(Modulation m, unsigned cls) {
  return m == Modulation::kQam16 ? qam16_constellation().at(cls) : qpsk_constellation().at(cls);
}

std::vector<cplx> map_bits_to_qam16(std::span<const std::uint8_t> bits) {
  if (bits.size() % 4 != 0)
    throw ShapeError("map_bits_to_qam16: bit count " + std::to_string(bits.size()) +
                     " is not a multiple of 4");
  std::vector<cplx> out;
  out.reserve(bits.size() / 4);
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    unsigned cls = 0;
    for (std::size_t j = 0; j < 4; ++j) cls = (cls << 1) | (bits[i + j] & 1U);
    out.push_back(qam16_constellation()[cls]);
  }
  return out;
}

HardDecision demap_hard(cplx s) {
  require_finite(s);
  HardDecision d;
  d.cls = nearest(qam16_constellation(), s);
  for (unsigned j = 0; j < 4; ++j) d.bits[j] = static_cast<std::uint8_t>((d.cls >> (3 - j)) & 1U);
  return d;
}

unsigned decide(Modulation m, cplx s) {
  require_finite(s);
  return m == Modulation::kQam16 ? nearest(qam16_constellation(), s)
                                 : nearest(qpsk_constellation(), s);
}

SymbolFrame build_polmux_frame(std::uint64_t seed, std::size_t n_symbols, Modulation m,
                               double baud_rate) {
  SymbolFrame f;
  f.baud_rate = baud_rate;
  f.modulation = m;
  f.symbols.resize(n_symbols);
  f.labels_x.resize(n_symbols);
  f.labels_y.resize(n_symbols);
  auto rng = Rng::stream(seed, Stream::kData);
  const int shift = 64 - bits_per_symbol(m);
  for (std::size_t i = 0; i < n_symbols; ++i) {
    const auto lx = static_cast<std::uint8_t>(rng.next_u64() >> shift);
    const auto ly = static_cast<std::uint8_t>(rng.next_u64() >> shift);
    f.labels_x[i] = lx;
    f.labels_y[i] = ly;
    f.symbols[i] = DualPolSymbol::from(constellation_point(m, lx), constellation_point(m, ly));
  }
  return f;
}

double raised_cosine(double f, double baud_rate, double rolloff) {
  const double af = std::abs(f);
  const double lo = (1.0 - rolloff) * baud_rate / 2.0;
  const double hi = (1.0 + rolloff) * baud_rate / 2.0;
  if (af <= lo) return 1.0;
  if (af > hi) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi / (rolloff * baud_rate) * (af - lo)));
}

Waveform modulate(const SymbolFrame& frame, int samples_per_symbol, double launch_power_dbm) {
  if (samples_per_symbol < 2 || samples_per_symbol % 2 != 0)
    throw ConfigError("modulate: samples_per_symbol must be even and >= 2, got " +
                      std::to_string(samples_per_symbol));
  Waveform w;
  w.baud_rate = frame.baud_rate;
  w.samples_per_symbol = samples_per_symbol;
  const std::size_t n = frame.size() * static_cast<std::size_t>(samples_per_symbol);
  w.ex.assign(n, cplx{});
  w.ey.assign(n, cplx{});
  if (n == 0) return w;

  for (std::size_t k = 0; k < frame.size(); ++k) {
    w.ex[k * samples_per_symbol] = frame.symbols[k].x();
    w.ey[k * samples_per_symbol] = frame.symbols[k].y();
  }
  // sps * sqrt(RC) gives unit power per polarization for unit-energy symbols
  // and an exact Nyquist chain together with the matched filter.
  const auto freqs = fft_frequencies(n, w.sample_rate());
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i)
    h[i] = samples_per_symbol * std::sqrt(raised_cosine(freqs[i], w.baud_rate));
  for (CVec* pol : {&w.ex, &w.ey}) {
    fft_forward(*pol);
    for (std::size_t i = 0; i < n; ++i) (*pol)[i] *= h[i];
    fft_inverse(*pol);
  }
  const double measured = w.mean_power();
  if (measured > 0.0) {
    const double scale = std::sqrt(dbm_to_watt(launch_power_dbm) / measured);
    for (std::size_t i = 0; i < n; ++i) {
      w.ex[i] *= scale;
      w.ey[i] *= scale;
    }
  }
  return w;
}

std::size_t central_channel_index(std::size_t n_channels) {
  return n_channels == 0 ? 0 : (n_channels + 1) / 2 - 1;
}

std::vector<double> wdm_channel_offsets(std::size_t n_channels, double spacing_hz) {
  std::vector<double> out(n_channels);
  const double mid = (static_cast<double>(n_channels) - 1.0) / 2.0;
  for (std::size_t i = 0; i < n_channels; ++i)
    out[i] = (static_cast<double>(i) - mid) * spacing_hz;
  return out;
}

Waveform wdm_mux(std::span<const Waveform> channels, double spacing_hz) {
  if (channels.empty()) throw ConfigError("wdm_mux: no channels");
  const auto& ref = channels.front();
  for (const auto& c : channels) {
    if (c.size() != ref.size() || c.ey.size() != ref.size() ||
        c.samples_per_symbol != ref.samples_per_symbol || c.baud_rate != ref.baud_rate)
      throw ShapeError("wdm_mux: channels differ in sample rate or length");
  }
  const auto offsets = wdm_channel_offsets(channels.size(), spacing_hz);
  const double central = offsets[central_channel_index(channels.size())];
  const double fs = ref.sample_rate();

  double max_edge = 0.0;
  for (double off : offsets)
    max_edge = std::max(max_edge, std::abs(off - central) + (1.0 + kRrcRolloff) * ref.baud_rate / 2.0);
  if (max_edge >= fs / 2.0)
    throw ConfigError("wdm_mux: comb edge at " + std::to_string(max_edge / 1e9) +
                      " GHz exceeds Nyquist " + std::to_string(fs / 2e9) + " GHz");

  Waveform out;
  out.baud_rate = ref.baud_rate;
  out.samples_per_symbol = ref.samples_per_symbol;
  out.center_offset = -central;
  const std::size_t n = ref.size();
  out.ex.assign(n, cplx{});
  out.ey.assign(n, cplx{});
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const double shift = offsets[c] - central;
    for (std::size_t i = 0; i < n; ++i) {
      const double phase = 2.0 * std::numbers::pi * shift * (static_cast<double>(i) / fs);
      const cplx rot = shift == 0.0 ? cplx(1.0, 0.0) : std::polar(1.0, phase);
      out.ex[i] += channels[c].ex[i] * rot;
      out.ey[i] += channels[c].ey[i] * rot;
    }
  }
  return out;
}

Waveform resample(const Waveform& w, int samples_per_symbol, double cutoff_hz) {
  if (samples_per_symbol < 1) throw ConfigError("resample: samples_per_symbol must be >= 1");
  Waveform out;
  out.baud_rate = w.baud_rate;
  out.samples_per_symbol = samples_per_symbol;
  out.center_offset = w.center_offset;
  const std::size_t n_in = w.size();
  const std::size_t n_sym = n_in / static_cast<std::size_t>(w.samples_per_symbol);
  const std::size_t n_out = n_sym * static_cast<std::size_t>(samples_per_symbol);
  if (n_in == 0) return out;
  if (n_out == n_in && cutoff_hz <= 0.0) {
    out.ex = w.ex;
    out.ey = w.ey;
    return out;
  }

  const double fs_out = out.sample_rate();
  const double limit = cutoff_hz > 0.0 ? std::min(cutoff_hz, fs_out / 2.0) : fs_out / 2.0;
  const auto f_in = fft_frequencies(n_in, w.sample_rate());
  const double gain = static_cast<double>(n_out) / static_cast<double>(n_in);

  auto convert = [&](const CVec& src) {
    CVec spec = src;
    fft_forward(spec);
    CVec dst(n_out, cplx{});
    for (std::size_t k = 0; k < n_in; ++k) {
      if (std::abs(f_in[k]) >= limit) continue;
      // Map the input bin to the output bin of the same frequency.
      const bool negative = f_in[k] < 0.0;
      const std::size_t idx = negative ? n_out - (n_in - k) : k;
      if (idx < n_out) dst[idx] += spec[k] * gain;
    }
    fft_inverse(dst);
    return dst;
  };
  out.ex = convert(w.ex);
  out.ey = convert(w.ey);
  return out;
}

std::vector<DualPolSymbol> matched_sample(const Waveform& w) {
  if (w.samples_per_symbol < 2) throw ConfigError("matched_sample: needs >= 2 samples/symbol");
  const std::size_t n = w.size();
  const auto sps = static_cast<std::size_t>(w.samples_per_symbol);
  std::vector<DualPolSymbol> out(n / sps);
  if (n == 0) return out;
  const auto freqs = fft_frequencies(n, w.sample_rate());
  CVec x = w.ex;
  CVec y = w.ey;
  for (CVec* pol : {&x, &y}) {
    fft_forward(*pol);
    for (std::size_t i = 0; i < n; ++i) (*pol)[i] *= std::sqrt(raised_cosine(freqs[i], w.baud_rate));
    fft_inverse(*pol);
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = DualPolSymbol::from(x[k * sps], y[k * sps]);
  return out;
}

RxOutput rx_front_end(const Waveform& field, std::size_t frame_len, const RxOptions& opts) {
  const auto expected = frame_len * static_cast<std::size_t>(field.samples_per_symbol);
  if (field.size() != expected || field.ey.size() != expected)
    throw AlignmentError("rx_front_end: field has " + std::to_string(field.size()) +
                         " samples, expected " + std::to_string(expected) + " for " +
                         std::to_string(frame_len) + " symbols");
  RxOutput out;
  out.symbols = matched_sample(field);
  out.dsp = resample(field, opts.dsp_samples_per_symbol, opts.lowpass ? field.baud_rate : 0.0);
  return out;
}

std::vector<DualPolSymbol> normalize_to_reference(std::span<const DualPolSymbol> rx,
                                                  const SymbolFrame& tx) {
  if (rx.size() != tx.size()) throw AlignmentError("normalize_to_reference: length mismatch");
  cplx cx{}, cy{};
  double ex = 0.0, ey = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    cx += rx[i].x() * std::conj(tx.symbols[i].x());
    cy += rx[i].y() * std::conj(tx.symbols[i].y());
    ex += std::norm(tx.symbols[i].x());
    ey += std::norm(tx.symbols[i].y());
  }
  const cplx gx = ex > 0.0 ? cx / ex : cplx(1.0);
  const cplx gy = ey > 0.0 ? cy / ey : cplx(1.0);
  std::vector<DualPolSymbol> out(rx.size());
  for (std::size_t i = 0; i < rx.size(); ++i) {
    out[i] = DualPolSymbol::from(std::abs(gx) > 0.0 ? rx[i].x() / gx : rx[i].x(),
                                 std::abs(gy) > 0.0 ? rx[i].y() / gy : rx[i].y());
  }
  return out;
}

double evm(std::span<const DualPolSymbol> rx, const SymbolFrame& tx) {
  if (rx.size() != tx.size()) throw AlignmentError("evm: length mismatch");
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    err += std::norm(rx[i].x() - tx.symbols[i].x()) + std::norm(rx[i].y() - tx.symbols[i].y());
    ref += std::norm(tx.symbols[i].x()) + std::norm(tx.symbols[i].y());
  }
  return ref > 0.0 ? std::sqrt(err / ref) : 0.0;
}

DecisionCount& DecisionCount::operator+=(const DecisionCount& o) {
  bit_errors += o.bit_errors;
  symbol_errors += o.symbol_errors;
  bits += o.bits;
  symbols += o.symbols;
  return *this;
}

DecisionCount count_errors(std::span<const DualPolSymbol> rx, const SymbolFrame& tx) {
  if (rx.size() != tx.size()) throw AlignmentError("count_errors: length mismatch");
  DecisionCount c;
  const auto bps = static_cast<std::uint64_t>(bits_per_symbol(tx.modulation));
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const unsigned dx = decide(tx.modulation, rx[i].x());
    const unsigned dy = decide(tx.modulation, rx[i].y());
    const unsigned ex = dx ^ tx.labels_x[i];
    const unsigned ey = dy ^ tx.labels_y[i];
    c.bit_errors += static_cast<std::uint64_t>(std::popcount(ex) + std::popcount(ey));
    c.symbol_errors += (ex != 0) + (ey != 0);
  }
  c.symbols = 2 * rx.size();
  c.bits = c.symbols * bps;
  return c;
}

namespace {

void write_le_doubles(std::ofstream& os, std::initializer_list<double> values) {
  static_assert(std::endian::native == std::endian::little, "dump format assumes little-endian host");
  for (double v : values) os.write(reinterpret_cast<const char*>(&v), sizeof(double));
}

}  // namespace

void dump_waveform(const std::filesystem::path& path, const Waveform& w) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("dump_waveform: cannot open " + path.string());
  for (std::size_t i = 0; i < w.size(); ++i)
    write_le_doubles(os, {w.ex[i].real(), w.ex[i].imag(), w.ey[i].real(), w.ey[i].imag()});
}

void dump_symbols(const std::filesystem::path& path, std::span<const DualPolSymbol> symbols) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("dump_symbols: cannot open " + path.string());
  for (const auto& s : symbols) write_le_doubles(os, {s.ix, s.qx, s.iy, s.qy});
}

}  // namespace fibereq
