#include "fibereq/nn/ops.hpp"

#include <algorithm>
#include <cmath>

#include "fibereq/errors.hpp"

namespace fibereq::nn {
namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

CellState lstm_cell_forward(const Vec& x, const Vec& h_prev, const Vec& c_prev,
                            const LstmCellParams& p) {
  const int l = p.hidden();
  if (x.size() != kInputSize || h_prev.size() != l || c_prev.size() != l)
    throw ShapeError("lstm_cell_forward: shape mismatch");
  const Vec z = p.wx * x + p.wh * h_prev + p.b;
  CellState s{Vec(l), Vec(l)};
  for (int j = 0; j < l; ++j) {
    const double i = sigmoid(z(j));
    const double f = sigmoid(z(l + j));
    const double o = sigmoid(z(2 * l + j));
    const double g = std::tanh(z(3 * l + j));
    s.c(j) = f * c_prev(j) + i * g;
    s.h(j) = o * std::tanh(s.c(j));
  }
  return s;
}

Mat bilstm_forward(const Mat& window, const BiLstmParams& p) {
  if (window.cols() != kInputSize) throw ShapeError("bilstm_forward: window must be m x 4");
  const int l = p.fwd.hidden();
  const auto m = window.rows();
  Mat out = Mat::Zero(l, m);
  CellState s{Vec::Zero(l), Vec::Zero(l)};
  for (Eigen::Index t = 0; t < m; ++t) {
    s = lstm_cell_forward(window.row(t).transpose(), s.h, s.c, p.fwd);
    out.col(t) = 0.5 * s.h;
  }
  s = {Vec::Zero(l), Vec::Zero(l)};
  for (Eigen::Index t = m - 1; t >= 0; --t) {
    s = lstm_cell_forward(window.row(t).transpose(), s.h, s.c, p.bwd);
    out.col(t) += 0.5 * s.h;
  }
  return out;
}

Vec softmax(const Vec& logits) {
  const double mx = logits.maxCoeff();
  Vec e = (logits.array() - mx).exp().matrix();
  return e / e.sum();
}

Vec head_forward(const Vec& h, const SoftmaxHead& head) {
  if (h.size() != head.w.cols()) throw ShapeError("head_forward: hidden size mismatch");
  return softmax(head.w * h + head.b);
}

double sequence_loss(const Mat& probs_x, const Mat& probs_y,
                     std::span<const std::uint8_t> targets_x,
                     std::span<const std::uint8_t> targets_y) {
  const auto m = static_cast<std::size_t>(probs_x.cols());
  if (static_cast<std::size_t>(probs_y.cols()) != m || targets_x.size() != m || targets_y.size() != m)
    throw ShapeError("sequence_loss: misaligned probabilities and targets");
  if (m == 0) return 0.0;
  double total = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    total -= std::log(std::max(probs_x(targets_x[t], ti), 1e-12));
    total -= std::log(std::max(probs_y(targets_y[t], ti), 1e-12));
  }
  return total / (2.0 * static_cast<double>(m));
}

int argmax(const Eigen::Ref<const Vec>& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v(i) > v(best)) best = i;
  return best;
}

}  // namespace fibereq::nn
