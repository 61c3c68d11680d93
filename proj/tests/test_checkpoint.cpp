#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fibereq/errors.hpp"
#include "fibereq/nn/backprop.hpp"
#include "fibereq/nn/checkpoint.hpp"
#include "fibereq/nn/dataset.hpp"
#include "fibereq/rng.hpp"

using namespace fibereq;
using namespace fibereq::nn;

namespace {

BiLstmModel sample_model() {
  Rng rng(1);
  auto m = init_model(5, 7, rng);
  for (auto& t : tensors(m.params))
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data[i] = rng.normal() / 3.0;
  m.input.mean = {0.01, -0.02, 1e-17, 3.0};
  m.input.scale = {0.7, 1.0 / 3.0, 2.5, 1e300};
  return m;
}

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("save, load, save is byte identical and bit exact") {
  const auto m = sample_model();
  const auto path = std::filesystem::temp_directory_path() / "fibereq_ckpt_test.txt";
  save_model(m, path);
  const auto loaded = load_model(path);
  CHECK(serialize_model(loaded) == serialize_model(m));
  auto a = m.params, b = loaded.params;
  auto ta = tensors(a), tb = tensors(b);
  for (std::size_t i = 0; i < ta.size(); ++i)
    for (Eigen::Index j = 0; j < ta[i].size(); ++j) REQUIRE(ta[i].data[j] == tb[i].data[j]);
  CHECK(loaded.input.mean == m.input.mean);
  CHECK(loaded.input.scale == m.input.scale);
  CHECK(loaded.hidden_size == 5);
  CHECK(loaded.word_length == 7);
  std::filesystem::remove(path);
}

TEST_CASE("checkpoint layout") {
  const auto text = serialize_model(sample_model());
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == "fibereq-bilstm 1");
  std::getline(in, line);
  CHECK(line == "hidden_size 5");
  std::getline(in, line);
  CHECK(line == "word_length 7");
  for (const char* t : {"tensor input.mean 1 4", "tensor fwd.W_xi 5 4", "tensor bwd.W_hc 5 5",
                        "tensor fwd.b_f 5 1", "tensor head_x.W 16 5", "tensor head_y.b 16 1"})
    CHECK(text.find(t) != std::string::npos);
  CHECK(text.substr(text.size() - 4) == "end\n");
}

TEST_CASE("loaded model predicts identically") {
  const auto m = sample_model();
  const auto copy = parse_model(serialize_model(m));
  const auto frame = build_polmux_frame(2, 106);
  const auto data = build_windows(frame.symbols, frame, 3, m.input);
  std::vector<std::size_t> idx(100);
  for (std::size_t i = 0; i < 100; ++i) idx[i] = i;
  const auto batch = make_batch(data, idx);
  BiLstmEngine e1, e2;
  const auto a = e1.evaluate(m.params, batch);
  const auto b = e2.evaluate(copy.params, batch);
  CHECK(a.loss == b.loss);
  CHECK(a.central_x == b.central_x);
  CHECK(a.central_y == b.central_y);
}

TEST_CASE("corrupt checkpoints are rejected") {
  const auto text = serialize_model(sample_model());
  CHECK_THROWS_AS(parse_model(replace_once(text, "tensor fwd.W_xi 5 4", "tensor fwd.W_xi 6 4")), FormatError);
  CHECK_THROWS_AS(parse_model(replace_once(text, "hidden_size 5", "hidden_size 4")), FormatError);
  CHECK_THROWS_AS(parse_model(replace_once(text, "word_length 7", "word_length 6")), FormatError);
  CHECK_THROWS_AS(parse_model(replace_once(text, "fibereq-bilstm 1", "fibereq-bilstm 2")), FormatError);
  CHECK_THROWS_AS(parse_model(replace_once(text, "tensor head_y.b", "tensor head_z.b")), FormatError);
  CHECK_THROWS_AS(parse_model(text.substr(0, text.size() / 2)), FormatError);
  CHECK_THROWS_AS(parse_model(replace_once(text, "\nend\n", "\n")), FormatError);
  try {
    parse_model(replace_once(text, "tensor fwd.W_xi 5 4", "tensor fwd.W_xi 6 4"));
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("fwd.W_xi") != std::string::npos);
    CHECK(msg.find('6') != std::string::npos);
  }
  CHECK_THROWS_AS(load_model("/nonexistent/fibereq/model.txt"), FormatError);
}
