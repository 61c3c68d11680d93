#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fibereq/nn/model.hpp"
#include "fibereq/txrx.hpp"

namespace fibereq::nn {

using FeatureMat = Eigen::Matrix<double, kInputSize, Eigen::Dynamic>;

// Stride-1 windows over a standardized symbol sequence. Window w spans
// symbols w .. w + m - 1; its central symbol is w + k. Symbols closer than k
// to either end are never central (no padding).
struct WindowDataset {
  FeatureMat features;                 // 4 x n, standardized
  std::vector<std::uint8_t> labels_x;  // per symbol
  std::vector<std::uint8_t> labels_y;
  int word_length = 1;
  Standardizer scale;

  std::size_t n_symbols() const { return labels_x.size(); }
  std::size_t n_windows() const {
    return n_symbols() >= static_cast<std::size_t>(word_length) ? n_symbols() - word_length + 1 : 0;
  }
  int half_window() const { return (word_length - 1) / 2; }
  std::size_t central_index(std::size_t w) const { return w + static_cast<std::size_t>(half_window()); }
  // m x 4, one symbol per row.
  Mat window(std::size_t w) const;
};

// Mean and standard deviation of each of the four components.
Standardizer fit_standardizer(std::span<const DualPolSymbol> rx);

WindowDataset build_windows(std::span<const DualPolSymbol> rx, const SymbolFrame& tx_labels, int k,
                            const Standardizer& scale);

}  // namespace fibereq::nn
