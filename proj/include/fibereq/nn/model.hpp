#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "fibereq/rng.hpp"

namespace fibereq::nn {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline constexpr int kInputSize = 4;   // Ix, Qx, Iy, Qy
inline constexpr int kNumClasses = 16;

// Gate blocks are stacked in this order inside LstmCellParams.
enum class Gate { kInput = 0, kForget = 1, kOutput = 2, kCell = 3 };

struct LstmCellParams {
  Mat wx;  // 4L x 4   (W_xi; W_xf; W_xo; W_xc)
  Mat wh;  // 4L x L   (W_hi; W_hf; W_ho; W_hc)
  Vec b;   // 4L       (b_i; b_f; b_o; b_c)

  LstmCellParams() = default;
  explicit LstmCellParams(int hidden);

  int hidden() const { return static_cast<int>(wh.cols()); }
  auto input_kernel(Gate g) { return wx.middleRows(static_cast<int>(g) * hidden(), hidden()); }
  auto input_kernel(Gate g) const { return wx.middleRows(static_cast<int>(g) * hidden(), hidden()); }
  auto recurrent_kernel(Gate g) { return wh.middleRows(static_cast<int>(g) * hidden(), hidden()); }
  auto recurrent_kernel(Gate g) const {
    return wh.middleRows(static_cast<int>(g) * hidden(), hidden());
  }
  auto bias(Gate g) { return b.segment(static_cast<int>(g) * hidden(), hidden()); }
  auto bias(Gate g) const { return b.segment(static_cast<int>(g) * hidden(), hidden()); }
};

struct SoftmaxHead {
  Mat w;  // 16 x L
  Vec b;  // 16

  SoftmaxHead() = default;
  explicit SoftmaxHead(int hidden);
};

// Trainable tensors of the bidirectional network; gradients use the same type.
struct BiLstmParams {
  LstmCellParams fwd;
  LstmCellParams bwd;
  SoftmaxHead head_x;
  SoftmaxHead head_y;

  BiLstmParams() = default;
  explicit BiLstmParams(int hidden);

  void set_zero();
  BiLstmParams& operator+=(const BiLstmParams& o);
  BiLstmParams& operator*=(double s);
};

// Non-owning view of one contiguous parameter tensor (column-major storage).
struct TensorView {
  std::string name;
  double* data;
  Eigen::Index rows;
  Eigen::Index cols;
  Eigen::Index size() const { return rows * cols; }
};

std::vector<TensorView> tensors(BiLstmParams& p);

// Per-component standardization of the received 4-vectors.
struct Standardizer {
  std::array<double, kInputSize> mean{0.0, 0.0, 0.0, 0.0};
  std::array<double, kInputSize> scale{1.0, 1.0, 1.0, 1.0};
};

struct BiLstmModel {
  int hidden_size = 1;
  int word_length = 1;  // m = 2k + 1
  BiLstmParams params;
  Standardizer input;

  BiLstmModel() : BiLstmModel(1, 1) {}
  BiLstmModel(int hidden, int word_length);

  int half_window() const { return (word_length - 1) / 2; }
};

// Glorot-uniform input and head kernels, orthogonal recurrent kernels, zero
// biases except a forget-gate bias of 1.
BiLstmModel init_model(int hidden, int word_length, Rng& rng);

}  // namespace fibereq::nn
