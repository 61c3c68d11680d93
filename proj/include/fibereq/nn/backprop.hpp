#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fibereq/nn/dataset.hpp"
#include "fibereq/nn/model.hpp"

namespace fibereq::nn {

// A mini-batch of B windows of length m laid out position-major: column
// t * B + b of `x` is position t of window b, and targets use the same index.
struct Batch {
  int word_length = 1;
  int size = 0;
  Mat x;  // 4 x (m * B)
  std::vector<std::uint8_t> targets_x;
  std::vector<std::uint8_t> targets_y;
};

Batch make_batch(const WindowDataset& data, std::span<const std::size_t> windows);

struct BatchEval {
  double loss = 0.0;  // mean cross-entropy over positions, heads and windows
  std::vector<std::uint8_t> central_x;  // argmax at the central position
  std::vector<std::uint8_t> central_y;
};

// Reusable forward/backward buffers for one batch shape.
class BiLstmEngine {
 public:
  // Mean batch loss; writes exact gradients of it into grad.
  double loss_and_gradients(const BiLstmParams& p, const Batch& batch, BiLstmParams& grad);

  BatchEval evaluate(const BiLstmParams& p, const Batch& batch);

 private:
  struct Direction {
    Mat gates;  // 4L x mB: sigmoid(i, f, o), tanh(g)
    Mat c;
    Mat tanh_c;
    Mat h;
    Mat z;      // scratch 4L x B
    Mat dz;     // 4L x mB
  };

  void run_direction(const LstmCellParams& p, const Mat& x, int m, int b, bool reverse,
                     Direction& d);
  void backprop_direction(const LstmCellParams& p, const Mat& x, const Mat& dh_in, int m, int b,
                          bool reverse, Direction& d, LstmCellParams& grad);
  void forward(const BiLstmParams& p, const Batch& batch);

  Direction fwd_;
  Direction bwd_;
  Mat hc_;       // L x mB combined state
  Mat probs_x_;  // 16 x mB
  Mat probs_y_;
};

// Convenience wrapper over BiLstmEngine for a single call.
double loss_and_gradients(const BiLstmParams& p, const Batch& batch, BiLstmParams& grad);

}  // namespace fibereq::nn
