#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <doctest.h>

#include "floodtext/error.hpp"
#include "floodtext/metrics.hpp"
#include "floodtext/rng.hpp"

using namespace floodtext;

namespace {

constexpr Label R = Label::related;
constexpr Label U = Label::unrelated;

// Threshold enumeration written from the definition: classify score >= s as
// Related for each distinct score s descending, and sum precision * delta
// recall wherever recall increases.
double ap_oracle(const std::vector<double>& scores, const std::vector<Label>& truths) {
  std::set<double, std::greater<double>> thresholds(scores.begin(), scores.end());
  long long positives = 0;
  for (Label t : truths) {
    if (t == R) ++positives;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (double s : thresholds) {
    long long tp = 0, fp = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= s) {
        (truths[i] == R ? tp : fp) += 1;
      }
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (recall > prev_recall) {
      ap += precision * (recall - prev_recall);
      prev_recall = recall;
    }
  }
  return ap;
}

}  // namespace

TEST_CASE("confusion pinned cases") {
  const ConfusionMatrix cm = confusion({R, R, U, U}, {R, U, R, U});
  CHECK(cm.tp == 1);
  CHECK(cm.fp == 1);
  CHECK(cm.fn == 1);
  CHECK(cm.tn == 1);
  CHECK(cm.total() == 4);

  const ConfusionMatrix perfect = confusion({R, U, U}, {R, U, U});
  CHECK(perfect.fp == 0);
  CHECK(perfect.fn == 0);

  CHECK_THROWS_AS(confusion({}, {}), DataError);
  CHECK_THROWS_AS(confusion({R}, {R, U}), DataError);
}

TEST_CASE("precision_recall_f1 pinned cases") {
  ConfusionMatrix cm;
  cm.tp = 3;
  cm.fp = 1;
  cm.fn = 1;
  cm.tn = 5;
  const MetricsSummary m = precision_recall_f1(cm);
  CHECK(m.related.precision == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(m.related.recall == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(m.related.f1 == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(m.accuracy == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(m.unrelated.precision == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(m.unrelated.recall == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(m.macro_f1 ==
        doctest::Approx((0.75 + 5.0 / 6.0) / 2.0).epsilon(1e-12));
  CHECK_FALSE(m.related.degenerate);
}

TEST_CASE("zero-denominator metrics report 0 with the degenerate flag") {
  const ConfusionMatrix cm = confusion({U, U, U}, {R, U, U});
  const MetricsSummary m = precision_recall_f1(cm);
  CHECK(m.related.precision == 0.0);
  CHECK(m.related.degenerate);
  CHECK(m.unrelated.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("metrics match a brute-force recount on random prediction lists") {
  RngStream rng(61, 1);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng.below(30);
    std::vector<Label> preds(n), truths(n);
    for (std::size_t i = 0; i < n; ++i) {
      preds[i] = rng.bernoulli(0.5) ? R : U;
      truths[i] = rng.bernoulli(0.5) ? R : U;
    }

    long long tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (preds[i] == R && truths[i] == R) ++tp;
      if (preds[i] == R && truths[i] == U) ++fp;
      if (preds[i] == U && truths[i] == R) ++fn;
      if (preds[i] == U && truths[i] == U) ++tn;
    }

    const ConfusionMatrix cm = confusion(preds, truths);
    REQUIRE(cm.tp == tp);
    REQUIRE(cm.fp == fp);
    REQUIRE(cm.fn == fn);
    REQUIRE(cm.tn == tn);

    const MetricsSummary m = precision_recall_f1(cm);
    const double acc = static_cast<double>(tp + tn) / static_cast<double>(n);
    CHECK(std::abs(m.accuracy - acc) < 1e-12);
    if (tp + fp > 0) {
      CHECK(std::abs(m.related.precision -
                     static_cast<double>(tp) / static_cast<double>(tp + fp)) < 1e-12);
    }
    if (tp + fn > 0) {
      CHECK(std::abs(m.related.recall -
                     static_cast<double>(tp) / static_cast<double>(tp + fn)) < 1e-12);
    }
    for (double v : {m.related.precision, m.related.recall, m.related.f1,
                     m.unrelated.precision, m.unrelated.recall, m.unrelated.f1,
                     m.accuracy, m.macro_f1}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("pr_curve pinned cases") {
  const PRCurve curve = pr_curve({0.9, 0.8, 0.7, 0.6}, {R, R, U, R});
  CHECK(curve.average_precision == doctest::Approx(11.0 / 12.0).epsilon(1e-12));
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    CHECK(curve.points[i].first >= curve.points[i - 1].first);
  }

  const PRCurve perfect = pr_curve({0.9, 0.8, 0.2, 0.1}, {R, R, U, U});
  CHECK(perfect.average_precision == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(pr_curve({0.5, 0.4}, {U, U}), DataError);
  CHECK_THROWS_AS(pr_curve({0.5}, {R, U}), DataError);
}

TEST_CASE("tied scores are grouped at one threshold") {
  // Both positives and one negative share a score; a per-item sweep would
  // give a different AP than the grouped threshold.
  const PRCurve curve = pr_curve({0.5, 0.5, 0.5, 0.1}, {R, R, U, U});
  CHECK(curve.average_precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("average precision matches the threshold-enumeration oracle") {
  RngStream rng(67, 2);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng.below(19);
    std::vector<double> scores(n);
    std::vector<Label> truths(n);
    bool any_pos = false;
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse grid so score ties actually occur.
      scores[i] = static_cast<double>(rng.below(8)) / 8.0;
      truths[i] = rng.bernoulli(0.5) ? R : U;
      any_pos = any_pos || truths[i] == R;
    }
    if (!any_pos) truths[0] = R;

    const PRCurve curve = pr_curve(scores, truths);
    CHECK(std::abs(curve.average_precision - ap_oracle(scores, truths)) < 1e-9);
    CHECK(curve.average_precision >= 0.0);
    CHECK(curve.average_precision <= 1.0);
  }
}
