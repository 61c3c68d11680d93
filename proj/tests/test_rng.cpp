#include <doctest.h>

#include <numeric>
#include <set>

#include "fibereq/rng.hpp"

using namespace fibereq;

TEST_CASE("same seed reproduces the sequence") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs |= x != c.next_u64();
  }
  CHECK(differs);
}

TEST_CASE("derived seeds separate streams and indices") {
  std::set<std::uint64_t> seen;
  for (auto s : {Stream::kData, Stream::kNoise, Stream::kNeighbor, Stream::kInit, Stream::kShuffle,
                 Stream::kPoint, Stream::kTestFrame, Stream::kTrainFrame})
    for (std::uint64_t i = 0; i < 50; ++i) seen.insert(derive_seed(7, s, i));
  CHECK(seen.size() == 8 * 50);
  CHECK(derive_seed(7, Stream::kData, 3) == derive_seed(7, Stream::kData, 3));
  CHECK(derive_seed(7, Stream::kData) != derive_seed(8, Stream::kData));
}

TEST_CASE("uniform and normal moments") {
  Rng r(1);
  const int n = 200000;
  double su = 0, su2 = 0, sn = 0, sn2 = 0, sn4 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    su2 += u * u;
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
    sn4 += z * z * z * z;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(su2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
  CHECK(std::abs(sn / n) < 5.0 / std::sqrt(n));
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(sn4 / n == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("below covers the range without bias") {
  Rng r(9);
  std::vector<int> hist(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = r.below(7);
    REQUIRE(v < 7);
    ++hist[v];
  }
  double chi2 = 0;
  for (int h : hist) chi2 += (h - n / 7.0) * (h - n / 7.0) / (n / 7.0);
  CHECK(chi2 < 6 + 3 * std::sqrt(12.0));
}

TEST_CASE("shuffle is a permutation and seed-determined") {
  std::vector<int> a(100), b(100);
  std::iota(a.begin(), a.end(), 0);
  b = a;
  Rng r1(5), r2(5);
  r1.shuffle(a.begin(), a.end());
  r2.shuffle(b.begin(), b.end());
  CHECK(a == b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 100; ++i) CHECK(sorted[i] == i);
  int fixed = 0;
  for (int i = 0; i < 100; ++i) fixed += a[i] == i;
  CHECK(fixed < 10);
}
