#include "fibereq/metrics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fibereq/errors.hpp"

namespace fibereq {

double ber(std::span<const std::uint8_t> tx_bits, std::span<const std::uint8_t> rx_bits) {
  if (tx_bits.size() != rx_bits.size())
    throw ShapeError("ber: length mismatch " + std::to_string(tx_bits.size()) + " vs " +
                     std::to_string(rx_bits.size()));
  if (tx_bits.empty()) throw ShapeError("ber: empty input");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < tx_bits.size(); ++i) errors += ((tx_bits[i] ^ rx_bits[i]) & 1U);
  return static_cast<double>(errors) / static_cast<double>(tx_bits.size());
}

double delay_spread_ps(double beta2_ps2_per_km, double length_km, double bandwidth_thz) {
  if (length_km < 0.0 || bandwidth_thz < 0.0)
    throw DomainError("delay_spread: length and bandwidth must be nonnegative");
  return 2.0 * std::numbers::pi * std::abs(beta2_ps2_per_km) * length_km * bandwidth_thz;
}

}  // namespace fibereq
