#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fibereq/complexity.hpp"
#include "fibereq/errors.hpp"
#include "fibereq/metrics.hpp"
#include "fibereq/rng.hpp"

using namespace fibereq;

namespace {

ComplexityInputs eq4_example() {
  ComplexityInputs in;
  in.n_span = 10;
  in.steps_per_span = 2;
  in.fft_size = 64;
  in.oversampling = 4;
  in.constellation_order = 16;
  in.dispersive_taps = 32;
  return in;
}

}  // namespace

TEST_CASE("bit error rate") {
  std::vector<std::uint8_t> a(10000), b;
  Rng rng(1);
  for (auto& v : a) v = static_cast<std::uint8_t>(rng.below(2));
  CHECK(ber(a, a) == 0.0);
  b = a;
  for (auto& v : b) v ^= 1;
  CHECK(ber(a, b) == 1.0);
  b = a;
  b[1234] ^= 1;
  CHECK(ber(a, b) == doctest::Approx(1e-4));
  CHECK_THROWS_AS(ber(a, std::span(b).first(10)), ShapeError);
  CHECK_THROWS_AS(ber({}, {}), ShapeError);
}

TEST_CASE("delay spread") {
  CHECK(std::abs(delay_spread_ps(0.82, 300, 0.05) - 77.0) < 1.0);
  CHECK(std::abs(delay_spread_ps(21.5, 500, 0.05) / 1000.0 - 3.38) < 0.05);
  CHECK(delay_spread_ps(-21.5, 500, 0.05) == delay_spread_ps(21.5, 500, 0.05));
  CHECK(delay_spread_ps(21.5, 0, 0.05) == 0.0);
  CHECK(delay_spread_ps(1.0, 1.0, 1.0) == doctest::Approx(2 * std::numbers::pi));
  // Linear in each argument.
  CHECK(delay_spread_ps(2 * 0.82, 300, 0.05) == doctest::Approx(2 * delay_spread_ps(0.82, 300, 0.05)));
  CHECK(delay_spread_ps(0.82, 3 * 300, 0.05) == doctest::Approx(3 * delay_spread_ps(0.82, 300, 0.05)));
  CHECK(delay_spread_ps(0.82, 300, 0.5 * 0.05) == doctest::Approx(0.5 * delay_spread_ps(0.82, 300, 0.05)));
}

TEST_CASE("DBP cost per bit") {
  const auto in = eq4_example();
  CHECK(c_dbp(in) == doctest::Approx(4.0 * 10 * 2 * (64.0 * 7 * 4 / (33.0 * 4) + 4)).epsilon(1e-14));
  CHECK(c_dbp(in) == doctest::Approx(1406.06).epsilon(1e-5));
  auto twice = in;
  twice.n_span *= 2;
  CHECK(c_dbp(twice) == 2 * c_dbp(in));
  twice = in;
  twice.steps_per_span *= 3;
  CHECK(c_dbp(twice) == 3 * c_dbp(in));
  auto bad = in;
  bad.dispersive_taps = 65;
  CHECK_THROWS_AS(c_dbp(bad), DomainError);
  CHECK_THROWS_AS(c_fde(bad), DomainError);
}

TEST_CASE("FDE cost per bit") {
  ComplexityInputs in;
  in.fft_size = 1024;
  in.oversampling = 2;
  in.constellation_order = 16;
  in.dispersive_taps = 512;
  CHECK(c_fde(in) == doctest::Approx(4.0 * 1024 * 11 * 2 / (513.0 * 4)).epsilon(1e-14));
  CHECK(c_fde(in) == doctest::Approx(43.91).epsilon(1e-4));
  const auto d = eq4_example();
  CHECK(c_fde(d) == doctest::Approx(c_dbp(d) / (d.n_span * d.steps_per_span) - 4 * d.oversampling).epsilon(1e-14));
  double prev = 0;
  for (double nd = 1; nd < 1024; nd += 37) {
    in.dispersive_taps = nd;
    CHECK(c_fde(in) > prev);
    prev = c_fde(in);
  }
}

TEST_CASE("prediction and training cost") {
  CHECK(c_pred(32, 71, 16) == 13312.0);
  CHECK(c_pred(1, 1, 16) == 12.0);
  CHECK(c_train(100, 20000, 13312) == doctest::Approx(2.6624e10).epsilon(1e-15));
  CHECK(c_train(0, 20000, 13312) == 0.0);
  // 100 epochs over 20000 symbols every 5e7 symbols: four percent.
  const double overhead = training_overhead_fraction(100, 20000, 5e7);
  CHECK(overhead == doctest::Approx(0.04).epsilon(1e-15));
  CHECK(overhead <= 0.04);
}

TEST_CASE("formulas agree with hand arithmetic on random inputs") {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    ComplexityInputs in;
    in.n_span = 1 + static_cast<double>(rng.below(40));
    in.steps_per_span = 1 + static_cast<double>(rng.below(8));
    in.fft_size = std::pow(2.0, 6 + static_cast<double>(rng.below(8)));
    in.oversampling = 1 + static_cast<double>(rng.below(4));
    in.constellation_order = std::pow(2.0, 2 + static_cast<double>(rng.below(5)));
    in.dispersive_taps = 1 + std::floor(rng.uniform() * (in.fft_size - 1));
    const double n = in.fft_size, lg = std::log(n) / std::log(2.0), b = std::log(in.constellation_order) / std::log(2.0);
    const double frac = n * (lg + 1) * in.oversampling / ((n - in.dispersive_taps + 1) * b);
    CHECK(c_fde(in) == doctest::Approx(4 * frac).epsilon(1e-13));
    CHECK(c_dbp(in) == doctest::Approx(4 * in.n_span * in.steps_per_span * (frac + in.oversampling)).epsilon(1e-13));
    const double l = 1 + static_cast<double>(rng.below(64)), m = 1 + 2 * static_cast<double>(rng.below(50));
    CHECK(c_pred(l, m, in.constellation_order) == doctest::Approx(16 * (l * l + l * m + l) / b).epsilon(1e-14));
  }
}

TEST_CASE("FFT size schedule") {
  const auto c = ComplexityModel::for_band(Band::kC);
  // One C-band span: 2 pi 21.5 50 0.05 = 337.7 ps, times n_s = 4 over 40 ps.
  const double nd = c.dispersive_taps(50, 4);
  CHECK(nd == doctest::Approx(4 * 2 * std::numbers::pi * 21.5 * 50 * 0.05 / 40));
  CHECK(c.fft_size_for(nd) == 256);  // 4 N_D = 135
  CHECK(c.fft_size_for(20) == 128);
  CHECK(c.fft_size_for(1) == 64);
  CHECK(c.fft_size_for(1000) == 4096);
}

TEST_CASE("prediction cost does not depend on distance") {
  const auto c = ComplexityModel::for_band(Band::kC);
  const auto rows = complexity_sweep(c, 20, 50, 40);
  REQUIRE(rows.size() == 40);
  for (const auto& r : rows) {
    CHECK(r.c_pred == rows.front().c_pred);
    CHECK(r.c_total_lstm == doctest::Approx(r.c_pred + r.c_fde));
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].distance_km > rows[i - 1].distance_km);
    CHECK(rows[i].c_dbp > rows[i - 1].c_dbp);
    CHECK(rows[i].c_fde >= rows[i - 1].c_fde * 0.5);
  }
}

TEST_CASE("crossover distances") {
  const auto c = crossover_distance(ComplexityModel::for_band(Band::kC), 20, 50);
  REQUIRE(c.has_value());
  CHECK(*c >= 800);
  CHECK(*c <= 1600);
  const auto o = crossover_distance(ComplexityModel::for_band(Band::kO), 20, 3);
  REQUIRE(o.has_value());
  CHECK(*o < 600);
  const auto never = crossover_spans(100, [](int) { return 1.0; }, [](int) { return 0.0; });
  CHECK(!never.has_value());
  const auto first = crossover_spans(100, [](int) { return 10.0; }, [](int n) { return 3.0 * n; });
  CHECK(first == 4);
}

TEST_CASE("complexity CSV") {
  std::ostringstream os;
  write_complexity_csv(os, complexity_sweep(ComplexityModel::for_band(Band::kO), 20, 3, 2));
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "distance_km,c_dbp,c_fde,c_pred,c_total_lstm,band,L,m");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);
}
