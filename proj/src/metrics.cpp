#include "floodtext/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "floodtext/error.hpp"

namespace floodtext {

ConfusionMatrix confusion(const std::vector<Label>& predictions,
                          const std::vector<Label>& truths) {
  if (predictions.size() != truths.size()) {
    throw DataError("confusion: prediction and truth lists differ in length");
  }
  if (predictions.empty()) {
    throw DataError("confusion: empty input");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool pred_pos = predictions[i] == Label::related;
    const bool true_pos = truths[i] == Label::related;
    if (pred_pos && true_pos) ++cm.tp;
    else if (pred_pos && !true_pos) ++cm.fp;
    else if (!pred_pos && true_pos) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

namespace {

ClassMetrics class_metrics(long long tp, long long fp, long long fn) {
  ClassMetrics m;
  if (tp + fp == 0) {
    m.degenerate = true;
  } else {
    m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  if (tp + fn == 0) {
    m.degenerate = true;
  } else {
    m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

}  // namespace

MetricsSummary precision_recall_f1(const ConfusionMatrix& cm) {
  if (cm.total() <= 0) {
    throw DataError("precision_recall_f1: empty confusion matrix");
  }
  MetricsSummary s;
  s.related = class_metrics(cm.tp, cm.fp, cm.fn);
  // Unrelated is the positive class of the mirrored matrix.
  s.unrelated = class_metrics(cm.tn, cm.fn, cm.fp);
  s.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  s.macro_f1 = 0.5 * (s.related.f1 + s.unrelated.f1);
  return s;
}

PRCurve pr_curve(const std::vector<double>& scores, const std::vector<Label>& truths) {
  if (scores.size() != truths.size()) {
    throw DataError("pr_curve: score and truth lists differ in length");
  }
  if (scores.empty()) {
    throw DataError("pr_curve: empty input");
  }
  long long positives = 0;
  for (Label t : truths) {
    if (t == Label::related) ++positives;
  }
  if (positives == 0) {
    throw DataError("pr_curve: no positive ground-truth examples");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  PRCurve curve;
  long long tp = 0;
  long long fp = 0;
  double prev_recall = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    // Consume the whole tie group at this threshold.
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      if (truths[order[i]] == Label::related) ++tp;
      else ++fp;
      ++i;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    curve.points.emplace_back(recall, precision);
    if (recall > prev_recall) {
      curve.average_precision += precision * (recall - prev_recall);
      prev_recall = recall;
    }
  }
  return curve;
}

}  // namespace floodtext
