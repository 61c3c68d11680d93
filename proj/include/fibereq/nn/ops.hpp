#pragma once

#include <cstdint>
#include <span>

#include "fibereq/nn/model.hpp"

namespace fibereq::nn {

struct CellState {
  Vec h;
  Vec c;
};

// One LSTM step:
//   i = sigmoid(W_xi x + W_hi h + b_i)   f, o likewise
//   c' = f * c + i * tanh(W_xc x + W_hc h + b_c)
//   h' = o * tanh(c')
CellState lstm_cell_forward(const Vec& x, const Vec& h_prev, const Vec& c_prev,
                            const LstmCellParams& p);

// window: m x 4 (one symbol per row). Returns L x m, column t holding the
// mean of the forward and backward hidden states at position t.
Mat bilstm_forward(const Mat& window, const BiLstmParams& p);

// Softmax of W h + b, stabilized by subtracting the max logit.
Vec head_forward(const Vec& h, const SoftmaxHead& head);
Vec softmax(const Vec& logits);

// Mean over positions and both heads of -ln p[target], p clamped at 1e-12.
// probs_x/probs_y: 16 x m.
double sequence_loss(const Mat& probs_x, const Mat& probs_y,
                     std::span<const std::uint8_t> targets_x,
                     std::span<const std::uint8_t> targets_y);

// Lowest index among equal maxima.
int argmax(const Eigen::Ref<const Vec>& v);

}  // namespace fibereq::nn
