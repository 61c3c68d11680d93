#include "fibereq/nn/adam.hpp"

#include <cmath>

#include "fibereq/errors.hpp"

namespace fibereq::nn {
namespace {

void update_block(double* theta, const double* g, double* m, double* v, Eigen::Index n,
                  const AdamHyper& h, double c1, double c2) {
  for (Eigen::Index i = 0; i < n; ++i) {
    m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g[i];
    v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g[i] * g[i];
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    theta[i] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon);
  }
}

}  // namespace

void adam_step(BiLstmParams& params, const BiLstmParams& grads, AdamState& state) {
  auto p = tensors(params);
  auto g = tensors(const_cast<BiLstmParams&>(grads));
  auto m = tensors(state.first_moment);
  auto v = tensors(state.second_moment);
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i].rows != g[i].rows || p[i].cols != g[i].cols || p[i].rows != m[i].rows ||
        p[i].cols != m[i].cols || p[i].rows != v[i].rows || p[i].cols != v[i].cols)
      throw ShapeError("adam_step: shape mismatch in " + p[i].name);
  ++state.step;
  const double c1 = 1.0 - std::pow(state.hyper.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.hyper.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < p.size(); ++i)
    update_block(p[i].data, g[i].data, m[i].data, v[i].data, p[i].size(), state.hyper, c1, c2);
}

void AdamVector::update(Vec& theta, const Vec& grad) {
  if (theta.size() != m.size() || grad.size() != m.size()) throw ShapeError("AdamVector: shape mismatch");
  ++step;
  const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(step));
  update_block(theta.data(), grad.data(), m.data(), v.data(), theta.size(), hyper, c1, c2);
}

}  // namespace fibereq::nn
