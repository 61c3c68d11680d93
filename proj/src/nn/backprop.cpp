#include "fibereq/nn/backprop.hpp"

#include <algorithm>
#include <cmath>

#include "fibereq/errors.hpp"
#include "fibereq/nn/ops.hpp"

namespace fibereq::nn {
namespace {

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& z) {
  return 1.0 / (1.0 + (-z).exp());
}

// tanh through exp keeps the evaluation vectorized; exact limits at +-inf.
template <typename Derived>
auto fast_tanh(const Eigen::ArrayBase<Derived>& z) {
  return 1.0 - 2.0 / ((2.0 * z).exp() + 1.0);
}

void softmax_columns(Mat& logits) {
  const Eigen::RowVectorXd mx = logits.colwise().maxCoeff();
  logits.rowwise() -= mx;
  logits = logits.array().exp().matrix();
  const Eigen::RowVectorXd sum = logits.colwise().sum();
  logits.array().rowwise() /= sum.array();
}

}  // namespace

Batch make_batch(const WindowDataset& data, std::span<const std::size_t> windows) {
  Batch b;
  b.word_length = data.word_length;
  b.size = static_cast<int>(windows.size());
  const int m = b.word_length;
  const auto bs = static_cast<Eigen::Index>(windows.size());
  b.x.resize(kInputSize, m * bs);
  b.targets_x.resize(static_cast<std::size_t>(m) * windows.size());
  b.targets_y.resize(b.targets_x.size());
  for (Eigen::Index j = 0; j < bs; ++j) {
    const auto w = windows[static_cast<std::size_t>(j)];
    if (w >= data.n_windows()) throw ShapeError("make_batch: window index out of range");
    for (int t = 0; t < m; ++t) {
      const auto col = t * bs + j;
      const auto sym = static_cast<Eigen::Index>(w) + t;
      b.x.col(col) = data.features.col(sym);
      b.targets_x[static_cast<std::size_t>(col)] = data.labels_x[static_cast<std::size_t>(sym)];
      b.targets_y[static_cast<std::size_t>(col)] = data.labels_y[static_cast<std::size_t>(sym)];
    }
  }
  return b;
}

void BiLstmEngine::run_direction(const LstmCellParams& p, const Mat& x, int m, int b, bool reverse,
                                 Direction& d) {
  const int l = p.hidden();
  const auto total = static_cast<Eigen::Index>(m) * b;
  d.gates.resize(4 * l, total);
  d.c.resize(l, total);
  d.tanh_c.resize(l, total);
  d.h.resize(l, total);
  d.z.resize(4 * l, b);
  for (int s = 0; s < m; ++s) {
    const int t = reverse ? m - 1 - s : s;
    const int tp = reverse ? t + 1 : t - 1;
    const auto cols = static_cast<Eigen::Index>(t) * b;
    d.z.noalias() = p.wx * x.middleCols(cols, b);
    if (s > 0) d.z.noalias() += p.wh * d.h.middleCols(static_cast<Eigen::Index>(tp) * b, b);
    d.z.colwise() += p.b;

    auto g = d.gates.middleCols(cols, b);
    g.topRows(3 * l) = sigmoid(d.z.topRows(3 * l).array()).matrix();
    g.bottomRows(l) = fast_tanh(d.z.bottomRows(l).array()).matrix();

    auto c = d.c.middleCols(cols, b);
    c = (g.topRows(l).array() * g.bottomRows(l).array()).matrix();
    if (s > 0)
      c.array() += g.middleRows(l, l).array() * d.c.middleCols(static_cast<Eigen::Index>(tp) * b, b).array();
    auto tc = d.tanh_c.middleCols(cols, b);
    tc = fast_tanh(c.array()).matrix();
    d.h.middleCols(cols, b) = (g.middleRows(2 * l, l).array() * tc.array()).matrix();
  }
}

void BiLstmEngine::forward(const BiLstmParams& p, const Batch& batch) {
  const int m = batch.word_length;
  const int b = batch.size;
  if (batch.x.rows() != kInputSize || batch.x.cols() != static_cast<Eigen::Index>(m) * b)
    throw ShapeError("BiLstmEngine: malformed batch");
  run_direction(p.fwd, batch.x, m, b, false, fwd_);
  run_direction(p.bwd, batch.x, m, b, true, bwd_);
  hc_ = 0.5 * (fwd_.h + bwd_.h);
  probs_x_ = p.head_x.w * hc_;
  probs_x_.colwise() += p.head_x.b;
  softmax_columns(probs_x_);
  probs_y_ = p.head_y.w * hc_;
  probs_y_.colwise() += p.head_y.b;
  softmax_columns(probs_y_);
}

void BiLstmEngine::backprop_direction(const LstmCellParams& p, const Mat& x, const Mat& dh_in, int m,
                                      int b, bool reverse, Direction& d, LstmCellParams& grad) {
  const int l = p.hidden();
  d.dz.resize(4 * l, static_cast<Eigen::Index>(m) * b);
  Mat dh_next = Mat::Zero(l, b);
  Mat dc_next = Mat::Zero(l, b);
  Mat dh(l, b), dc(l, b);
  for (int s = m - 1; s >= 0; --s) {
    const int t = reverse ? m - 1 - s : s;
    const int tp = reverse ? t + 1 : t - 1;
    const auto cols = static_cast<Eigen::Index>(t) * b;
    const auto g = d.gates.middleCols(cols, b).array();
    const auto gi = g.topRows(l);
    const auto gf = g.middleRows(l, l);
    const auto go = g.middleRows(2 * l, l);
    const auto gg = g.bottomRows(l);
    const auto tc = d.tanh_c.middleCols(cols, b).array();

    dh = dh_in.middleCols(cols, b) + dh_next;
    dc.array() = dh.array() * go * (1.0 - tc * tc) + dc_next.array();

    auto dz = d.dz.middleCols(cols, b);
    dz.topRows(l).array() = dc.array() * gg * gi * (1.0 - gi);
    if (s > 0) {
      const auto c_prev = d.c.middleCols(static_cast<Eigen::Index>(tp) * b, b).array();
      dz.middleRows(l, l).array() = dc.array() * c_prev * gf * (1.0 - gf);
    } else {
      dz.middleRows(l, l).setZero();
    }
    dz.middleRows(2 * l, l).array() = dh.array() * tc * go * (1.0 - go);
    dz.bottomRows(l).array() = dc.array() * gi * (1.0 - gg * gg);

    dc_next.array() = dc.array() * gf;
    if (s > 0) {
      const auto h_prev = d.h.middleCols(static_cast<Eigen::Index>(tp) * b, b);
      grad.wh.noalias() += dz * h_prev.transpose();
      dh_next.noalias() = p.wh.transpose() * dz;
    }
  }
  grad.wx.noalias() += d.dz * x.transpose();
  grad.b += d.dz.rowwise().sum();
}

double BiLstmEngine::loss_and_gradients(const BiLstmParams& p, const Batch& batch, BiLstmParams& grad) {
  forward(p, batch);
  const int m = batch.word_length;
  const int b = batch.size;
  const auto total = static_cast<Eigen::Index>(m) * b;
  const double norm = 1.0 / (2.0 * static_cast<double>(total));

  double loss = 0.0;
  for (Eigen::Index j = 0; j < total; ++j) {
    const auto tx = batch.targets_x[static_cast<std::size_t>(j)];
    const auto ty = batch.targets_y[static_cast<std::size_t>(j)];
    loss -= std::log(std::max(probs_x_(tx, j), 1e-12));
    loss -= std::log(std::max(probs_y_(ty, j), 1e-12));
    probs_x_(tx, j) -= 1.0;
    probs_y_(ty, j) -= 1.0;
  }
  loss *= norm;
  // probs_* now hold (p - onehot); scale to d(loss)/d(logits).
  probs_x_ *= norm;
  probs_y_ *= norm;

  const int l = p.fwd.hidden();
  grad = BiLstmParams(l);
  grad.head_x.w.noalias() = probs_x_ * hc_.transpose();
  grad.head_x.b = probs_x_.rowwise().sum();
  grad.head_y.w.noalias() = probs_y_ * hc_.transpose();
  grad.head_y.b = probs_y_.rowwise().sum();

  Mat dh(l, total);
  dh.noalias() = p.head_x.w.transpose() * probs_x_;
  dh.noalias() += p.head_y.w.transpose() * probs_y_;
  dh *= 0.5;  // each direction contributes half of the combined state

  backprop_direction(p.fwd, batch.x, dh, m, b, false, fwd_, grad.fwd);
  backprop_direction(p.bwd, batch.x, dh, m, b, true, bwd_, grad.bwd);
  return loss;
}

BatchEval BiLstmEngine::evaluate(const BiLstmParams& p, const Batch& batch) {
  forward(p, batch);
  const int m = batch.word_length;
  const int b = batch.size;
  const auto total = static_cast<Eigen::Index>(m) * b;
  BatchEval ev;
  double loss = 0.0;
  for (Eigen::Index j = 0; j < total; ++j) {
    loss -= std::log(std::max(probs_x_(batch.targets_x[static_cast<std::size_t>(j)], j), 1e-12));
    loss -= std::log(std::max(probs_y_(batch.targets_y[static_cast<std::size_t>(j)], j), 1e-12));
  }
  ev.loss = total > 0 ? loss / (2.0 * static_cast<double>(total)) : 0.0;
  const auto k = static_cast<Eigen::Index>((m - 1) / 2);
  ev.central_x.resize(static_cast<std::size_t>(b));
  ev.central_y.resize(static_cast<std::size_t>(b));
  for (Eigen::Index j = 0; j < b; ++j) {
    ev.central_x[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(argmax(probs_x_.col(k * b + j)));
    ev.central_y[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(argmax(probs_y_.col(k * b + j)));
  }
  return ev;
}

double loss_and_gradients(const BiLstmParams& p, const Batch& batch, BiLstmParams& grad) {
  BiLstmEngine engine;
  return engine.loss_and_gradients(p, batch, grad);
}

}  // namespace fibereq::nn
