#include <cmath>
#include <vector>

#include <doctest.h>

#include "floodtext/error.hpp"
#include "floodtext/rng.hpp"
#include "floodtext/schedule.hpp"

using namespace floodtext;

namespace {

// Closed form written out independently of the implementation; the two sides
// may differ by rounding order, hence the 1e-12 comparisons.
double stlr_oracle(long long t, const StlrConfig& cfg) {
  const double cut = std::floor(cfg.cut_frac * static_cast<double>(cfg.total_steps));
  double p;
  if (static_cast<double>(t) < cut) {
    p = static_cast<double>(t) / cut;
  } else {
    p = 1.0 - (static_cast<double>(t) - cut) / (cut * (1.0 / cfg.cut_frac - 1.0));
    // Flooring the cut can leave the decay fractionally negative at t = T;
    // the schedule is clamped at the lr_max/ratio floor there.
    p = std::max(0.0, p);
  }
  return (cfg.lr_max / cfg.ratio) * (1.0 + p * (cfg.ratio - 1.0));
}

}  // namespace

TEST_CASE("stlr pinned values") {
  const StlrConfig cfg{0.01, 0.1, 32.0, 100};
  REQUIRE(cfg.cut() == 10);

  CHECK(stlr(10, cfg) == 0.01);
  CHECK(stlr(0, cfg) == 0.0003125);
  CHECK(stlr(100, cfg) == 0.0003125);
  CHECK(stlr(55, cfg) == doctest::Approx(0.00515625).epsilon(1e-12));
}

TEST_CASE("stlr matches independent closed form at random steps") {
  const StlrConfig cfg{0.01, 0.1, 32.0, 100};
  RngStream rng(11, 1);
  for (int i = 0; i < 20; ++i) {
    const long long t = static_cast<long long>(rng.below(101));
    CHECK(std::abs(stlr(t, cfg) - stlr_oracle(t, cfg)) < 1e-12);
  }

  const StlrConfig odd{0.037, 0.23, 17.5, 311};
  for (int i = 0; i < 20; ++i) {
    const long long t = static_cast<long long>(rng.below(312));
    CHECK(std::abs(stlr(t, odd) - stlr_oracle(t, odd)) < 1e-12);
  }
}

TEST_CASE("stlr shape: single peak, monotone on both sides") {
  const StlrConfig cfg{0.02, 0.15, 20.0, 200};
  const long long cut = cfg.cut();
  CHECK(stlr(0, cfg) == cfg.lr_max / cfg.ratio);
  for (long long t = 1; t <= cut; ++t) CHECK(stlr(t, cfg) > stlr(t - 1, cfg));
  for (long long t = cut + 1; t <= cfg.total_steps; ++t) {
    CHECK(stlr(t, cfg) < stlr(t - 1, cfg));
  }
  for (long long t = 0; t <= cfg.total_steps; ++t) {
    CHECK(stlr(t, cfg) > 0.0);
    CHECK(stlr(t, cfg) <= cfg.lr_max);
  }
}

TEST_CASE("stlr rejects steps outside the schedule") {
  const StlrConfig cfg{0.01, 0.1, 32.0, 100};
  CHECK_THROWS_AS(stlr(-1, cfg), ConfigError);
  CHECK_THROWS_AS(stlr(101, cfg), ConfigError);
}

TEST_CASE("StlrConfig::validate rejects bad fields") {
  CHECK_THROWS_AS((StlrConfig{0.01, 0.0, 32.0, 100}.validate()), ConfigError);
  CHECK_THROWS_AS((StlrConfig{0.01, 1.0, 32.0, 100}.validate()), ConfigError);
  CHECK_THROWS_AS((StlrConfig{0.01, 0.1, 1.0, 100}.validate()), ConfigError);
  CHECK_THROWS_AS((StlrConfig{0.01, 0.1, 32.0, 0}.validate()), ConfigError);
  CHECK_THROWS_AS((StlrConfig{0.0, 0.1, 32.0, 100}.validate()), ConfigError);
  CHECK_NOTHROW((StlrConfig{0.01, 0.1, 32.0, 100}.validate()));
}

TEST_CASE("discriminative_lrs pinned values") {
  const std::vector<double> lrs = discriminative_lrs(0.01, 4, 2.6);
  REQUIRE(lrs.size() == 4);
  CHECK(lrs[0] == 0.01);
  CHECK(lrs[1] == doctest::Approx(0.0038462).epsilon(1e-4));
  CHECK(std::abs(lrs[1] - 0.0038461538461538) < 1e-7);
  CHECK(std::abs(lrs[2] - 0.0014793668639053) < 1e-7);
  CHECK(std::abs(lrs[3] - 0.0005689872553482) < 1e-7);

  CHECK(discriminative_lrs(0.3, 1, 5.0) == std::vector<double>{0.3});

  const std::vector<double> halves = discriminative_lrs(0.01, 3, 2.0);
  CHECK(halves[0] == 0.01);
  CHECK(halves[1] == 0.005);
  CHECK(halves[2] == 0.0025);
}

TEST_CASE("discriminative_lrs matches a repeated-division oracle") {
  RngStream rng(5, 2);
  for (int k = 0; k < 30; ++k) {
    const double base = rng.uniform(1e-4, 0.2);
    const double factor = rng.uniform(1.1, 4.0);
    const int n = 1 + static_cast<int>(rng.below(8));
    const std::vector<double> lrs = discriminative_lrs(base, n, factor);
    REQUIRE(static_cast<int>(lrs.size()) == n);
    double expect = base;
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(lrs[i] - expect) < 1e-12);
      if (i + 1 < n) CHECK(lrs[i + 1] < lrs[i]);
      expect /= factor;
    }
  }
}

TEST_CASE("discriminative_lrs rejects invalid inputs") {
  CHECK_THROWS_AS(discriminative_lrs(0.01, 0, 2.6), ConfigError);
  CHECK_THROWS_AS(discriminative_lrs(0.01, 4, 1.0), ConfigError);
  CHECK_THROWS_AS(discriminative_lrs(0.0, 4, 2.6), ConfigError);
}

TEST_CASE("LayerGroups lookup and partition checks") {
  LayerGroups groups;
  groups.groups = {{"emb", "l0"}, {"l1"}, {"head"}};

  CHECK(groups.size() == 3);
  CHECK(groups.group_of("emb") == 0);
  CHECK(groups.group_of("l1") == 1);
  CHECK(groups.group_of("head") == 2);
  CHECK(groups.group_of("nope") == -1);

  CHECK_NOTHROW(groups.check_partition({"l1", "head", "emb", "l0"}));
  CHECK_THROWS_AS(groups.check_partition({"emb", "l0", "l1"}), ConfigError);
  CHECK_THROWS_AS(groups.check_partition({"emb", "l0", "l1", "head", "extra"}),
                  ConfigError);
}
