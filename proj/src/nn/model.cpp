#include "fibereq/nn/model.hpp"

#include <cmath>
#include <string>

#include "fibereq/errors.hpp"

namespace fibereq::nn {

LstmCellParams::LstmCellParams(int hidden)
    : wx(Mat::Zero(4 * hidden, kInputSize)), wh(Mat::Zero(4 * hidden, hidden)), b(Vec::Zero(4 * hidden)) {}

SoftmaxHead::SoftmaxHead(int hidden) : w(Mat::Zero(kNumClasses, hidden)), b(Vec::Zero(kNumClasses)) {}

BiLstmParams::BiLstmParams(int hidden) : fwd(hidden), bwd(hidden), head_x(hidden), head_y(hidden) {}

void BiLstmParams::set_zero() {
  for (auto& t : tensors(*this)) std::fill(t.data, t.data + t.size(), 0.0);
}

BiLstmParams& BiLstmParams::operator+=(const BiLstmParams& o) {
  for (auto* c : {&fwd, &bwd}) {
    const auto& oc = (c == &fwd) ? o.fwd : o.bwd;
    c->wx += oc.wx;
    c->wh += oc.wh;
    c->b += oc.b;
  }
  head_x.w += o.head_x.w;
  head_x.b += o.head_x.b;
  head_y.w += o.head_y.w;
  head_y.b += o.head_y.b;
  return *this;
}

BiLstmParams& BiLstmParams::operator*=(double s) {
  for (auto& t : tensors(*this))
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data[i] *= s;
  return *this;
}

std::vector<TensorView> tensors(BiLstmParams& p) {
  auto view = [](std::string name, auto& m) {
    return TensorView{std::move(name), m.data(), m.rows(), m.cols()};
  };
  return {view("fwd.wx", p.fwd.wx),       view("fwd.wh", p.fwd.wh),       view("fwd.b", p.fwd.b),
          view("bwd.wx", p.bwd.wx),       view("bwd.wh", p.bwd.wh),       view("bwd.b", p.bwd.b),
          view("head_x.w", p.head_x.w),   view("head_x.b", p.head_x.b),   view("head_y.w", p.head_y.w),
          view("head_y.b", p.head_y.b)};
}

BiLstmModel::BiLstmModel(int hidden, int m) : hidden_size(hidden), word_length(m), params(hidden) {
  if (hidden < 1) throw ConfigError("BiLstmModel: hidden size must be >= 1");
  if (m < 1 || m % 2 == 0)
    throw ConfigError("BiLstmModel: word length must be odd and >= 1, got " + std::to_string(m));
}

namespace {

void glorot_uniform(Mat& w, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Eigen::Index j = 0; j < w.cols(); ++j)
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = (2.0 * rng.uniform() - 1.0) * limit;
}

// 4L x L matrix with orthonormal columns.
void orthogonal(Mat& w, Rng& rng) {
  Mat g(w.rows(), w.cols());
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(w.rows(), w.cols());
  // Sign fix makes the factorization unique.
  const Mat r = qr.matrixQR().topRows(w.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < w.cols(); ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  w = q;
}

void init_cell(LstmCellParams& c, Rng& rng) {
  glorot_uniform(c.wx, rng);
  orthogonal(c.wh, rng);
  c.b.setZero();
  c.bias(Gate::kForget).setOnes();
}

}  // namespace

BiLstmModel init_model(int hidden, int word_length, Rng& rng) {
  BiLstmModel m(hidden, word_length);
  init_cell(m.params.fwd, rng);
  init_cell(m.params.bwd, rng);
  glorot_uniform(m.params.head_x.w, rng);
  glorot_uniform(m.params.head_y.w, rng);
  return m;
}

}  // namespace fibereq::nn
