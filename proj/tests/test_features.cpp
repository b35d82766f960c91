#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "ispu/error.hpp"
#include "ispu/features.hpp"
#include "oracles.hpp"

using namespace ispu;

namespace {

std::vector<std::int16_t> ramp() {
  std::vector<std::int16_t> w(32);
  std::iota(w.begin(), w.end(), std::int16_t{1});
  return w;
}

std::vector<std::int16_t> repeat(std::int16_t v, std::size_t n = 32) {
  return std::vector<std::int16_t>(n, v);
}

}  // namespace

TEST_CASE("window_mean") {
  CHECK(window_mean(repeat(100)) == 100.0);
  CHECK(window_mean(ramp()) == 16.5);
  auto w = repeat(-5, 16);
  w.resize(32, 5);
  CHECK(window_mean(w) == 0.0);
}

TEST_CASE("window_median") {
  CHECK(window_median(repeat(7)) == 7.0);
  CHECK(window_median(ramp()) == 16.5);
  auto w = repeat(0, 31);
  w.push_back(1000);
  CHECK(window_median(w) == 0.0);

  SUBCASE("caller's window is not reordered") {
    std::vector<std::int16_t> v = {5, 3, 9, 1};
    v.resize(32, 2);
    const auto before = v;
    (void)window_median(v);
    CHECK(v == before);
  }
}

TEST_CASE("window_variance") {
  CHECK(window_variance(repeat(-1234)) == 0.0);
  CHECK(window_variance(ramp()) == 85.25);
  auto w = repeat(-1, 16);
  w.resize(32, 1);
  CHECK(window_variance(w) == 1.0);
}

TEST_CASE("window_minmax") {
  CHECK(window_minmax(repeat(42)) == std::pair{42.0, 42.0});
  CHECK(window_minmax(ramp()) == std::pair{1.0, 32.0});
  auto w = repeat(0);
  w[3] = -32768;
  w[30] = 32767;
  CHECK(window_minmax(w) == std::pair{-32768.0, 32767.0});
}

TEST_CASE("window operations reject other lengths") {
  const auto short_w = repeat(1, 31);
  const auto long_w = repeat(1, 33);
  for (const auto* w : {&short_w, &long_w}) {
    CHECK_THROWS_AS(window_mean(*w), Error);
    CHECK_THROWS_AS(window_median(*w), Error);
    CHECK_THROWS_AS(window_variance(*w), Error);
    CHECK_THROWS_AS(window_minmax(*w), Error);
  }
  try {
    window_mean(short_w);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kContract);
  }
}

TEST_CASE("extreme 16-bit windows stay exact") {
  std::vector<std::int16_t> w;
  for (int i = 0; i < 32; ++i) w.push_back(i % 2 ? 32767 : -32768);
  const auto o = oracle::window_stats(w);
  CHECK(window_mean(w) == o.mean);
  CHECK(window_variance(w) == o.variance);
  CHECK(window_median(w) == o.median);
}

TEST_CASE("AxisBuffer keeps arrival order and evicts the oldest") {
  AxisBuffer b;
  for (int i = 0; i < 32; ++i) b.push(static_cast<std::int16_t>(i));
  CHECK(b.full());
  CHECK(b[0] == 0);
  CHECK(b[31] == 31);
  b.push(99);
  CHECK(b.size() == 32);
  CHECK(b[0] == 1);
  CHECK(b[31] == 99);
  const auto w = b.window();
  CHECK(w.front() == 1);
  CHECK(w.back() == 99);
}

TEST_CASE("extractor event schedule") {
  FeatureExtractor fx;
  int events = 0;
  for (int i = 1; i <= 63; ++i) {
    CHECK_FALSE(fx.push(Acquisition{i, 1, 2, 3}).has_value());
  }
  auto ready = fx.push(Acquisition{64, 1, 2, 3});
  REQUIRE(ready.has_value());
  CHECK(ready->features.size() == 30);
  CHECK(ready->acquisition_index == 64);
  CHECK(ready->window_index == 2);
  ++events;
  for (int i = 65; i <= 96; ++i) {
    if (fx.push(Acquisition{i, 0, 0, 0})) {
      ++events;
      CHECK(i == 96);
    }
  }
  CHECK(events == 2);
}

TEST_CASE("event count formula") {
  CHECK(expected_event_count(0) == 0);
  CHECK(expected_event_count(63) == 0);
  CHECK(expected_event_count(64) == 1);
  CHECK(expected_event_count(95) == 1);
  CHECK(expected_event_count(96) == 2);

  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = static_cast<int>(rng() % 700);
    FeatureExtractor fx;
    int events = 0;
    for (int i = 0; i < n; ++i) events += fx.push(Acquisition{i, 0, 0, 0}).has_value();
    CHECK(events == expected_event_count(n));
  }
}

TEST_CASE("feature vector order is [S_t | S_t-1], x,y,z, mean..min") {
  FeatureExtractor fx;
  std::optional<FeaturesReady> ready;
  // Window 1: x = 10, y = 20, z = 1..32. Window 2: x = -3, y = 7, z = 100.
  for (int i = 0; i < 64; ++i) {
    const bool first = i < 32;
    ready = fx.push(Acquisition{i, static_cast<std::int16_t>(first ? 10 : -3),
                                static_cast<std::int16_t>(first ? 20 : 7),
                                static_cast<std::int16_t>(first ? i + 1 : 100)});
  }
  REQUIRE(ready);
  const auto& f = ready->features;
  // S_t
  CHECK(f[0] == -3.0);   // x mean
  CHECK(f[5] == 7.0);    // y mean
  CHECK(f[10] == 100.0);  // z mean
  CHECK(f[12] == 0.0);   // z variance
  // S_t-1
  CHECK(f[15] == 10.0);
  CHECK(f[20] == 20.0);
  CHECK(f[25] == 16.5);   // z mean
  CHECK(f[26] == 16.5);   // z median
  CHECK(f[27] == 85.25);  // z variance
  CHECK(f[28] == 32.0);   // z max
  CHECK(f[29] == 1.0);    // z min
}

TEST_CASE("non-consecutive index is a stream discontinuity") {
  FeatureExtractor fx;
  fx.push(Acquisition{10, 0, 0, 0});
  try {
    fx.push(Acquisition{12, 0, 0, 0});
    FAIL("expected a discontinuity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kStreamDiscontinuity);
  }
  CHECK_THROWS(fx.push(Acquisition{10, 0, 0, 0}));
  fx.reset();
  CHECK_NOTHROW(fx.push(Acquisition{500, 0, 0, 0}));
}

TEST_CASE("streaming equals batch recomputation on random streams") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> sample(-32768, 32767);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 64 + static_cast<int>(rng() % 400);
    std::array<std::vector<std::int16_t>, 3> axes;
    FeatureExtractor fx;
    for (int i = 0; i < n; ++i) {
      Acquisition a{i, static_cast<std::int16_t>(sample(rng)), static_cast<std::int16_t>(sample(rng)),
                    static_cast<std::int16_t>(sample(rng))};
      axes[0].push_back(a.x);
      axes[1].push_back(a.y);
      axes[2].push_back(a.z);
      auto ready = fx.push(a);
      if (!ready) continue;
      for (int set = 0; set < 2; ++set) {
        const std::size_t end = static_cast<std::size_t>(i + 1) - 32 * set;
        for (int axis = 0; axis < 3; ++axis) {
          std::vector<std::int16_t> slice(axes[axis].begin() + static_cast<std::ptrdiff_t>(end - 32),
                                          axes[axis].begin() + static_cast<std::ptrdiff_t>(end));
          const auto o = oracle::window_stats(slice);
          const double* got = ready->features.data() + set * 15 + axis * 5;
          CHECK(got[0] == o.mean);
          CHECK(got[1] == o.median);
          CHECK(got[2] == doctest::Approx(o.variance).epsilon(1e-12));
          CHECK(got[3] == o.max);
          CHECK(got[4] == o.min);
        }
      }
    }
  }
}

TEST_CASE("scale equivariance") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> sample(-1000, 1000);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = static_cast<int>(rng() % 31) - 15;
    std::vector<std::int16_t> w(32);
    std::vector<std::int16_t> scaled(32);
    for (int i = 0; i < 32; ++i) {
      w[i] = static_cast<std::int16_t>(sample(rng));
      scaled[i] = static_cast<std::int16_t>(w[i] * k);
    }
    CHECK(window_mean(scaled) == doctest::Approx(k * window_mean(w)).epsilon(1e-12));
    CHECK(window_variance(scaled) ==
          doctest::Approx(static_cast<double>(k) * k * window_variance(w)).epsilon(1e-12));
    const auto [lo, hi] = window_minmax(w);
    const auto [slo, shi] = window_minmax(scaled);
    CHECK(slo == (k >= 0 ? k * lo : k * hi));
    CHECK(shi == (k >= 0 ? k * hi : k * lo));
    CHECK(window_median(scaled) == k * window_median(w));
  }
}

TEST_CASE("feature set invariants") {
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> sample(-32768, 32767);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::int16_t> w(32);
    for (auto& v : w) v = static_cast<std::int16_t>(sample(rng));
    const AxisFeatures f = axis_features(w);
    CHECK(f.min <= f.median);
    CHECK(f.median <= f.max);
    CHECK(f.min <= f.mean);
    CHECK(f.mean <= f.max);
    CHECK(f.variance >= 0.0);
  }
}
