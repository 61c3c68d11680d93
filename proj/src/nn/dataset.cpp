#include "fibereq/nn/dataset.hpp"

#include <cmath>
#include <string>

#include "fibereq/errors.hpp"

namespace fibereq::nn {

Mat WindowDataset::window(std::size_t w) const {
  if (w >= n_windows()) throw ShapeError("WindowDataset::window: index out of range");
  return features.middleCols(static_cast<Eigen::Index>(w), word_length).transpose();
}

Standardizer fit_standardizer(std::span<const DualPolSymbol> rx) {
  Standardizer s;
  if (rx.empty()) return s;
  const auto n = static_cast<double>(rx.size());
  std::array<double, kInputSize> sum{}, sq{};
  for (const auto& v : rx) {
    const std::array<double, kInputSize> a{v.ix, v.qx, v.iy, v.qy};
    for (int j = 0; j < kInputSize; ++j) {
      sum[j] += a[j];
      sq[j] += a[j] * a[j];
    }
  }
  for (int j = 0; j < kInputSize; ++j) {
    s.mean[j] = sum[j] / n;
    const double var = std::max(sq[j] / n - s.mean[j] * s.mean[j], 0.0);
    s.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

WindowDataset build_windows(std::span<const DualPolSymbol> rx, const SymbolFrame& tx_labels, int k,
                            const Standardizer& scale) {
  if (k < 0) throw ShapeError("build_windows: k must be >= 0");
  if (rx.size() != tx_labels.size())
    throw ShapeError("build_windows: " + std::to_string(rx.size()) + " received symbols vs " +
                     std::to_string(tx_labels.size()) + " labels");
  const auto m = static_cast<std::size_t>(2 * k + 1);
  if (rx.size() < m)
    throw ShapeError("build_windows: " + std::to_string(rx.size()) +
                     " symbols are fewer than the word length " + std::to_string(m));
  WindowDataset d;
  d.word_length = static_cast<int>(m);
  d.scale = scale;
  d.features.resize(kInputSize, static_cast<Eigen::Index>(rx.size()));
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const std::array<double, kInputSize> a{rx[i].ix, rx[i].qx, rx[i].iy, rx[i].qy};
    for (int j = 0; j < kInputSize; ++j)
      d.features(j, static_cast<Eigen::Index>(i)) = (a[j] - scale.mean[j]) / scale.scale[j];
  }
  d.labels_x = tx_labels.labels_x;
  d.labels_y = tx_labels.labels_y;
  return d;
}

}  // namespace fibereq::nn
