#pragma once

#include "fibereq/nn/model.hpp"

namespace fibereq::nn {

struct AdamHyper {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamHyper hyper;
  BiLstmParams first_moment;
  BiLstmParams second_moment;
  long step = 0;

  AdamState() = default;
  AdamState(int hidden, AdamHyper h = {}) : hyper(h), first_moment(hidden), second_moment(hidden) {}
};

// Bias-corrected Adam:
//   m = b1 m + (1-b1) g;  v = b2 v + (1-b2) g^2
//   theta -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
void adam_step(BiLstmParams& params, const BiLstmParams& grads, AdamState& state);

// The same update on a flat parameter vector; used by small standalone
// optimizations and tests.
struct AdamVector {
  AdamHyper hyper;
  Vec m;
  Vec v;
  long step = 0;

  explicit AdamVector(Eigen::Index n, AdamHyper h = {}) : hyper(h), m(Vec::Zero(n)), v(Vec::Zero(n)) {}
  void update(Vec& theta, const Vec& grad);
};

}  // namespace fibereq::nn
