#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "floodtext/checkpoint.hpp"
#include "floodtext/corpus.hpp"
#include "floodtext/metrics.hpp"
#include "floodtext/transfer.hpp"

namespace floodtext {

struct MetricsReport {
  MetricsSummary summary;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double seconds = 0.0;
};

struct AblationOptions {
  std::vector<double> fractions{5, 10, 20, 50, 80};  // percent of train labels
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double test_ratio = 0.3;
  std::uint64_t split_seed = 0;
  int head_hidden = 50;
  double dropout_multiplier = 0.4;
  FineTunePlan plan;  // classifier-stage template; seed is overridden per row
};

struct AblationRow {
  double fraction = 0.0;
  std::uint64_t seed = 0;
  MetricsSummary metrics;
  double seconds = 0.0;  // classifier stage wall clock, excluded from diffs
};

struct AblationTable {
  std::vector<AblationRow> rows;  // ordered by (fraction, seed)
  std::vector<std::string> test_ids;
};

// One full classifier run per (fraction, seed): subsample the training
// labels, build a fresh classifier on the encoder checkpoint, train, score
// on a stratified test split held fixed across every row. `on_row` fires
// after each completed row, so a failure part way leaves the finished rows
// with the caller before the error propagates.
AblationTable ablation_run(const std::vector<CleanTweet>& dataset,
                           const Checkpoint& encoder,
                           const AblationOptions& options,
                           const std::function<void(const AblationRow&)>& on_row = {});

// FNV-1a over the ids, used by the fixed-test-split invariant checks.
std::uint64_t split_digest(const std::vector<std::string>& ids);

// CSV schema shared by single-run reports and the ablation table:
// fraction,seed,class,precision,recall,f1,accuracy,seconds
void write_metrics_header(std::ostream& out);
void write_metrics_rows(std::ostream& out, double fraction, std::uint64_t seed,
                        const MetricsSummary& summary, double seconds);
void write_ablation_csv(const AblationTable& table, std::ostream& out);

void write_pr_curve_csv(const PRCurve& curve, std::ostream& out);

std::string metrics_report_json(const MetricsReport& report);

}  // namespace floodtext
