#include <doctest.h>

#include <sstream>

#include "fibereq/errors.hpp"
#include "fibereq/experiment.hpp"
#include "fibereq/rng.hpp"

using namespace fibereq;
using nlohmann::json;

namespace {

// Short linear noiseless link: cheap and exactly invertible.
json linear_link() {
  return json{{"equalizer", "fde"},
              {"n_spans", 2},
              {"forward_steps_per_span", 2},
              {"noiseless", true},
              {"fiber", {{"gamma_per_w_km", 0.0}}},
              {"split", {{"test", 2000}}}};
}

json small_lstm() {
  return json{{"equalizer", "fde+lstm"},
              {"n_spans", 2},
              {"forward_steps_per_span", 8},
              {"launch_power_dbm", 4.0},
              {"lstm", {{"hidden_units", 4}, {"k", 2}}},
              {"split", {{"train", 1500}, {"validation", 500}, {"test", 1000}}},
              {"training", {{"max_epochs", 3}, {"batch_size", 256}}}};
}

std::string csv_row(const ExperimentResult& r) {
  std::ostringstream os;
  write_csv_row(os, r);
  return os.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("defaults echo the table and desk-scale settings") {
  const auto c = config_from_json(json::object());
  CHECK(c.band == Band::kC);
  CHECK(c.n_spans == 10);
  CHECK(c.samples_per_symbol == 16);
  CHECK(c.hidden_units == 16);
  CHECK(c.half_window == 15);
  CHECK(c.word_length() == 31);
  CHECK(c.n_train == 20000);
  CHECK(c.n_val == 5000);
  CHECK(c.n_test == 5000);
  CHECK(c.fiber.beta2_ps2_per_km == -21.5);
  CHECK(c.amp.gain_db == 10.0);
  CHECK(c.baud_rate == 25e9);
  CHECK(c.spacing_hz == 50e9);
  CHECK(c.distance_km() == 500.0);
  const auto o = config_from_json(json{{"band", 1310}});
  CHECK(o.fiber.alpha_db_per_km == 0.34);
  CHECK(o.fiber.beta2_ps2_per_km == -0.82);
  CHECK(o.amp.gain_db == 17.0);
  CHECK(config_from_json(json{{"band", "O"}}).band == Band::kO);
  // Round trip through the echoed form.
  const auto again = config_from_json(config_to_json(o));
  CHECK(config_to_json(again) == config_to_json(o));
}

TEST_CASE("config validation names the offending key") {
  auto expect_error = [](const json& j, const std::string& fragment) {
    try {
      config_from_json(j);
      FAIL("accepted " << j.dump());
    } catch (const ConfigError& e) {
      CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos, e.what());
    }
  };
  expect_error(json{{"n_spnas", 3}}, "n_spnas");
  expect_error(json{{"lstm", {{"hidden", 3}}}}, "lstm.hidden");
  expect_error(json{{"n_spans", "ten"}}, "n_spans");
  expect_error(json{{"n_spans", 2.5}}, "n_spans");
  expect_error(json{{"band", 1490}}, "band");
  expect_error(json{{"equalizer", "cnn"}}, "equalizer");
  expect_error(json{{"neighbor_modulation", "8psk"}}, "neighbor_modulation");
  expect_error(json{{"n_spans", 0}}, "n_spans");
  expect_error(json{{"lstm", {{"k", -1}}}}, "lstm.k");
  expect_error(json{{"split", {{"train", 10}}}}, "split");
  expect_error(json{{"samples_per_symbol", 7}}, "samples_per_symbol");
  expect_error(json{{"n_channels", 10}, {"samples_per_symbol", 16}}, "samples_per_symbol");
  expect_error(json{{"seed", -4}}, "seed");
  expect_error(json{{"training", {{"patience", 0}}}}, "patience");
}

TEST_CASE("linear noiseless FDE run is error free") {
  const auto r = run_experiment(config_from_json(linear_link()));
  CHECK(r.bit_errors == 0);
  CHECK(r.ber == 0.0);
  CHECK(r.n_bits == 2000 * 8);
  CHECK(r.pre_equalizer_evm < 1e-9);
  CHECK(r.c_fde > 0);
  CHECK(r.c_dbp > r.c_fde);
}

TEST_CASE("extra test batches push the BER floor to 1e-6") {
  auto j = linear_link();
  j["split"]["test"] = 20000;
  j["ber"] = {{"max_extra_test_batches", 10}, {"extra_batch_symbols", 20000}};
  j["n_spans"] = 1;
  const auto r = run_experiment(config_from_json(j));
  CHECK(r.bit_errors == 0);
  CHECK(r.n_bits >= 1000000);
  CHECK(r.test_batches == 7);
}

TEST_CASE("fixed seed runs are identical") {
  auto j = small_lstm();
  j["seed"] = 77;
  const auto cfg = config_from_json(j);
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  CHECK(a.ber == b.ber);
  CHECK(a.bit_errors == b.bit_errors);
  CHECK(a.pre_equalizer_evm == b.pre_equalizer_evm);
  CHECK(a.history->epochs.back().train_loss == b.history->epochs.back().train_loss);
  CHECK(csv_row(a) == csv_row(b));
  auto ja = result_to_json(a), jb = result_to_json(b);
  ja.erase("wall_time_s");
  jb.erase("wall_time_s");
  CHECK(ja == jb);
  CHECK(ja["config"]["seed"] == 77);
}

TEST_CASE("empty axis gives a header-only CSV") {
  auto j = linear_link();
  j["launch_power_dbm"] = json::array();
  const auto sweep = sweep_from_json(j);
  std::ostringstream csv;
  const auto rows = run_sweep(sweep, &csv);
  CHECK(rows.empty());
  CHECK(csv.str() == "band,n_channels,distance_km,power_dbm,equalizer,steps_per_span,L,m,ber,n_bits,seed\n");
}

TEST_CASE("sweep expands the product with derived seeds") {
  auto j = linear_link();
  j["launch_power_dbm"] = {-2.0, 0.0, 2.0};
  j["equalizer"] = {"fde", "dbp"};
  j["dbp"] = {{"steps_per_span", json::array({1, 2})}};
  j["seed"] = 5;
  const auto sweep = sweep_from_json(j);
  const auto pts = sweep.points();
  CHECK(pts.size() == 12);
  std::ostringstream csv;
  const auto rows = run_sweep(sweep, &csv);
  REQUIRE(rows.size() == 12);
  const auto l = lines(csv.str());
  CHECK(l.size() == 13);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].index == i);
    CHECK(rows[i].config.seed == point_seed(5, i));
    REQUIRE(rows[i].result.has_value());
    CHECK(rows[i].result->bit_errors == 0);
  }

  SUBCASE("rows are regenerable from config and seed") {
    Rng pick(3);
    for (int n = 0; n < 3; ++n) {
      const auto i = pick.below(rows.size());
      CHECK(csv_row(run_experiment(rows[i].config)) == l[i + 1] + "\n");
    }
  }
}

TEST_CASE("one-point sweep equals run_experiment") {
  auto j = small_lstm();
  j["seed"] = 9;
  const auto sweep = sweep_from_json(j);
  const auto rows = run_sweep(sweep);
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].result.has_value());
  const auto direct = run_experiment(rows[0].config);
  CHECK(csv_row(direct) == csv_row(*rows[0].result));
  CHECK(direct.history->best_epoch == rows[0].result->history->best_epoch);
}

TEST_CASE("mismatch mode trains once and tests everywhere") {
  auto j = small_lstm();
  j["launch_power_dbm"] = {2.0, 4.0, 6.0};
  j["mismatch"] = {{"train_launch_power_dbm", 4.0}};
  const auto sweep = sweep_from_json(j);
  const auto rows = run_sweep(sweep);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    REQUIRE(r.result.has_value());
    CHECK(r.training_run == 0);
    CHECK(r.config.train_launch_power_dbm == 4.0);
    CHECK(r.result->history->epochs.size() == rows[0].result->history->epochs.size());
  }
  // A recorded row is reproduced by a standalone run of its config.
  CHECK(csv_row(run_experiment(rows[2].config)) == csv_row(*rows[2].result));

  auto q = small_lstm();
  q["n_channels"] = 3;
  q["samples_per_symbol"] = 16;
  q["neighbor_modulation"] = "qpsk";
  q["mismatch"] = {{"train_neighbor_modulation", "16qam"}};
  q["launch_power_dbm"] = {0.0, 1.0};
  const auto rows_q = run_sweep(sweep_from_json(q));
  REQUIRE(rows_q.size() == 2);
  // Training power follows the test power here: one model per power.
  CHECK(rows_q[0].training_run == 0);
  CHECK(rows_q[1].training_run == 1);
  CHECK(rows_q[0].config.neighbor_modulation == Modulation::kQpsk);
  CHECK(rows_q[0].config.train_neighbor_modulation == Modulation::kQam16);
}

TEST_CASE("a failing point does not abort the sweep") {
  auto j = linear_link();
  j["n_spans"] = {1, 0, 2};
  std::ostringstream csv, log;
  const auto rows = run_sweep(sweep_from_json(j), &csv, &log);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].result.has_value());
  CHECK(!rows[1].result.has_value());
  CHECK(rows[1].error.find("n_spans") != std::string::npos);
  CHECK(rows[2].result.has_value());
  CHECK(lines(csv.str()).size() == 3);
  CHECK(log.str().find("point 1 failed") != std::string::npos);
}

TEST_CASE("CSV columns") {
  auto j = linear_link();
  const auto r = run_experiment(config_from_json(j));
  std::ostringstream os;
  write_csv_header(os);
  write_csv_row(os, r);
  const auto l = lines(os.str());
  REQUIRE(l.size() == 2);
  CHECK(l[1].rfind("1550,1,100,0,fde,0,0,0,0,16000,", 0) == 0);
}
