#pragma once

#include <utility>
#include <vector>

#include "floodtext/corpus.hpp"

namespace floodtext {

// Positive class is Related throughout.
struct ConfusionMatrix {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long tn = 0;

  long long total() const { return tp + fp + fn + tn; }
};

ConfusionMatrix confusion(const std::vector<Label>& predictions,
                          const std::vector<Label>& truths);

// `degenerate` marks a zero-denominator precision or recall, which is
// reported as 0.
struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate = false;
};

struct MetricsSummary {
  ClassMetrics related;
  ClassMetrics unrelated;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

MetricsSummary precision_recall_f1(const ConfusionMatrix& cm);

// Precision-recall curve swept over the distinct scores descending, with tied
// scores grouped at one threshold. average_precision uses step interpolation:
// sum of precision * delta-recall at the points where recall increases.
struct PRCurve {
  std::vector<std::pair<double, double>> points;  // (recall, precision)
  double average_precision = 0.0;
};

// scores[i] = predicted P(Related) for example i.
PRCurve pr_curve(const std::vector<double>& scores, const std::vector<Label>& truths);

}  // namespace floodtext
