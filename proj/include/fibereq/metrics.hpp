#pragma once

#include <cstdint>
#include <span>

namespace fibereq {

// Hamming distance over length. Inputs hold one bit (0/1) per element.
double ber(std::span<const std::uint8_t> tx_bits, std::span<const std::uint8_t> rx_bits);

// Chromatic-dispersion delay spread 2*pi*|beta2|*L*B in picoseconds for
// beta2 in ps^2/km, L in km and B in THz.
double delay_spread_ps(double beta2_ps2_per_km, double length_km, double bandwidth_thz);

}  // namespace fibereq
