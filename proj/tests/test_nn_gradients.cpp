#include <doctest.h>

#include <cmath>

#include "fibereq/nn/adam.hpp"
#include "fibereq/nn/backprop.hpp"
#include "fibereq/nn/dataset.hpp"
#include "fibereq/nn/model.hpp"
#include "fibereq/rng.hpp"

using namespace fibereq;
using namespace fibereq::nn;

namespace {

struct Problem {
  BiLstmModel model;
  WindowDataset data;
};

Problem random_problem(int hidden, int word_length, std::uint64_t seed) {
  Rng rng(seed);
  Problem pr{init_model(hidden, word_length, rng), {}};
  for (auto& t : tensors(pr.model.params))
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data[i] = 0.8 * (2.0 * rng.uniform() - 1.0);
  const auto frame = build_polmux_frame(seed + 1, 30);
  auto sym = frame.symbols;
  for (auto& s : sym) s.ix += 0.3 * rng.normal(), s.qy -= 0.2 * rng.normal();
  pr.data = build_windows(sym, frame, (word_length - 1) / 2, fit_standardizer(sym));
  return pr;
}

double max_abs(const BiLstmParams& p) {
  double m = 0;
  for (auto& t : tensors(const_cast<BiLstmParams&>(p)))
    for (Eigen::Index i = 0; i < t.size(); ++i) m = std::max(m, std::abs(t.data[i]));
  return m;
}

}  // namespace

TEST_CASE("every gradient matches central finite differences") {
  auto pr = random_problem(4, 5, 11);
  const std::vector<std::size_t> idx{0, 4, 9, 17};
  const auto batch = make_batch(pr.data, idx);
  BiLstmParams grad(4);
  loss_and_gradients(pr.model.params, batch, grad);

  BiLstmEngine engine;
  auto params = pr.model.params;
  auto views = tensors(params);
  auto gviews = tensors(grad);
  // Fourth-order central stencil; no absolute floor on the relative error.
  const double h = 1e-3;
  double worst = 0.0;
  std::string worst_name;
  for (std::size_t v = 0; v < views.size(); ++v) {
    for (Eigen::Index i = 0; i < views[v].size(); ++i) {
      double& w = views[v].data[i];
      const double saved = w;
      auto loss_at = [&](double x) {
        w = x;
        return engine.evaluate(params, batch).loss;
      };
      const double d1 = loss_at(saved + h) - loss_at(saved - h);
      const double d2 = loss_at(saved + 2.0 * h) - loss_at(saved - 2.0 * h);
      w = saved;
      const double fd = (8.0 * d1 - d2) / (12.0 * h);
      const double an = gviews[v].data[i];
      const double rel = std::abs(fd - an) / std::max(std::abs(fd), std::abs(an));
      if (rel > worst) worst = rel, worst_name = views[v].name;
    }
  }
  INFO("worst tensor " << worst_name);
  CHECK(worst < 1e-5);
}

TEST_CASE("gradient is a batch mean") {
  auto pr = random_problem(3, 3, 21);
  BiLstmParams g_dup(3), g_a(3), g_b(3);
  const std::vector<std::size_t> dup{2, 7, 7}, a{2}, b{7};
  loss_and_gradients(pr.model.params, make_batch(pr.data, dup), g_dup);
  loss_and_gradients(pr.model.params, make_batch(pr.data, a), g_a);
  loss_and_gradients(pr.model.params, make_batch(pr.data, b), g_b);
  g_dup *= 3.0;
  g_b *= 2.0;
  g_a += g_b;
  g_a *= -1.0;
  g_dup += g_a;
  CHECK(max_abs(g_dup) < 1e-12);
}

TEST_CASE("gradient does not depend on batch order") {
  auto pr = random_problem(4, 5, 31);
  BiLstmParams g1(4), g2(4);
  const std::vector<std::size_t> a{1, 5, 9, 13, 20}, b{20, 9, 1, 13, 5};
  const double l1 = loss_and_gradients(pr.model.params, make_batch(pr.data, a), g1);
  const double l2 = loss_and_gradients(pr.model.params, make_batch(pr.data, b), g2);
  CHECK(std::abs(l1 - l2) < 1e-12);
  g2 *= -1.0;
  g1 += g2;
  CHECK(max_abs(g1) < 1e-12);
}

TEST_CASE("zero gradient leaves parameters unchanged") {
  auto pr = random_problem(3, 3, 41);
  const auto before = pr.model.params;
  BiLstmParams zero(3);
  AdamState st(3);
  adam_step(pr.model.params, zero, st);
  auto diff = pr.model.params;
  auto neg = before;
  neg *= -1.0;
  diff += neg;
  CHECK(max_abs(diff) == 0.0);
  CHECK(st.step == 1);
}

TEST_CASE("first Adam step") {
  const AdamHyper hp;
  for (double g : {3.0, -0.02, 1e-4}) {
    AdamVector opt(1);
    Vec theta = Vec::Constant(1, 0.5), grad = Vec::Constant(1, g);
    opt.update(theta, grad);
    // m_hat = g and v_hat = g^2 after one bias-corrected step.
    const double expect = -hp.learning_rate * g / (std::abs(g) + hp.epsilon);
    CHECK(theta(0) - 0.5 == doctest::Approx(expect).epsilon(1e-12));
    // -lr * sign(g) up to a relative eps / |g|.
    const double sign_step = -hp.learning_rate * (g > 0 ? 1 : -1);
    CHECK(std::abs((theta(0) - 0.5) - sign_step) <= 1.01 * hp.learning_rate * hp.epsilon / std::abs(g));
  }
}

TEST_CASE("Adam on the structured parameter set matches the flat form") {
  auto pr = random_problem(3, 3, 51);
  BiLstmParams grad(3);
  const auto batch = make_batch(pr.data, std::vector<std::size_t>{0, 1, 2});
  loss_and_gradients(pr.model.params, batch, grad);
  auto params = pr.model.params;
  std::vector<double> flat, gflat;
  for (auto& t : tensors(params)) flat.insert(flat.end(), t.data, t.data + t.size());
  for (auto& t : tensors(grad)) gflat.insert(gflat.end(), t.data, t.data + t.size());
  Vec theta = Eigen::Map<Vec>(flat.data(), flat.size());
  const Vec g = Eigen::Map<Vec>(gflat.data(), gflat.size());
  AdamState st(3);
  AdamVector opt(theta.size());
  for (int s = 0; s < 5; ++s) {
    adam_step(params, grad, st);
    opt.update(theta, g);
  }
  std::vector<double> after;
  for (auto& t : tensors(params)) after.insert(after.end(), t.data, t.data + t.size());
  CHECK((Eigen::Map<Vec>(after.data(), after.size()) - theta).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("Adam converges on a one-dimensional quadratic") {
  // f(theta) = (theta - 0.03)^2 from theta = 0 with the default step size.
  AdamVector opt(1);
  Vec theta = Vec::Zero(1);
  for (int s = 0; s < 100; ++s) {
    const Vec g = Vec::Constant(1, 2.0 * (theta(0) - 0.03));
    opt.update(theta, g);
  }
  CHECK(std::abs(theta(0) - 0.03) < 1e-3);
}
