#include "floodtext/ablation.hpp"

#include <chrono>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "floodtext/classifier.hpp"
#include "floodtext/csv.hpp"
#include "floodtext/error.hpp"
#include "floodtext/split.hpp"

namespace floodtext {
namespace {

std::string fixed(double x, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

std::string fraction_text(double fraction) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g", fraction);
  return buf;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

AblationTable ablation_run(const std::vector<CleanTweet>& dataset,
                           const Checkpoint& encoder,
                           const AblationOptions& options,
                           const std::function<void(const AblationRow&)>& on_row) {
  if (dataset.empty()) throw DataError("ablation_run: empty dataset");
  for (const auto& tweet : dataset) {
    if (!tweet.label) {
      throw LabelError("ablation_run: unlabeled record " + tweet.id);
    }
  }
  if (options.fractions.empty()) {
    throw ConfigError("ablation_run: no fractions");
  }
  for (double f : options.fractions) {
    if (f <= 0.0 || f > 100.0) {
      throw ConfigError("ablation_run: fraction out of (0, 100]: " +
                        fraction_text(f));
    }
  }
  if (options.seeds.empty()) throw ConfigError("ablation_run: no seeds");
  if (options.test_ratio <= 0.0 || options.test_ratio >= 1.0) {
    throw ConfigError("ablation_run: test_ratio must be in (0, 1)");
  }
  if (options.plan.stage != PlanStage::classifier) {
    throw ConfigError("ablation_run: plan stage must be classifier");
  }

  const DatasetSplit parts = split(dataset, 1.0 - options.test_ratio,
                                   options.split_seed, /*stratified=*/true);
  if (parts.train.empty() || parts.test.empty()) {
    throw DataError("ablation_run: degenerate train/test split");
  }
  std::vector<Label> truths;
  truths.reserve(parts.test.size());
  for (const auto& tweet : parts.test) truths.push_back(*tweet.label);

  AblationTable table;
  table.test_ids.reserve(parts.test.size());
  for (const auto& tweet : parts.test) table.test_ids.push_back(tweet.id);

  for (double fraction : options.fractions) {
    for (std::uint64_t seed : options.seeds) {
      const auto sample = subsample_labels(parts.train, fraction, seed);

      const auto start = std::chrono::steady_clock::now();
      ClassifierModel model = build_classifier(
          encoder, options.head_hidden, seed, options.dropout_multiplier);
      FineTunePlan plan = options.plan;
      plan.seed = seed;
      train_classifier(model, sample, plan);
      const double seconds = elapsed_seconds(start);

      AblationRow row;
      row.fraction = fraction;
      row.seed = seed;
      row.seconds = seconds;
      row.metrics = precision_recall_f1(
          confusion(predict_labels(model, parts.test), truths));
      table.rows.push_back(row);
      if (on_row) on_row(row);
    }
  }
  return table;
}

std::uint64_t split_digest(const std::vector<std::string>& ids) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  const auto eat = [&hash](unsigned char c) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  };
  for (const auto& id : ids) {
    for (char c : id) eat(static_cast<unsigned char>(c));
    eat('\n');
  }
  return hash;
}

void write_metrics_header(std::ostream& out) {
  write_csv_row(out, {"fraction", "seed", "class", "precision", "recall", "f1",
                      "accuracy", "seconds"});
}

void write_metrics_rows(std::ostream& out, double fraction, std::uint64_t seed,
                        const MetricsSummary& summary, double seconds) {
  const auto row = [&](const char* name, const ClassMetrics& m) {
    write_csv_row(out, {fraction_text(fraction), std::to_string(seed), name,
                        fixed(m.precision, 6), fixed(m.recall, 6),
                        fixed(m.f1, 6), fixed(summary.accuracy, 6),
                        fixed(seconds, 3)});
  };
  row("related", summary.related);
  row("unrelated", summary.unrelated);
}

void write_ablation_csv(const AblationTable& table, std::ostream& out) {
  write_metrics_header(out);
  for (const auto& row : table.rows) {
    write_metrics_rows(out, row.fraction, row.seed, row.metrics, row.seconds);
  }
}

void write_pr_curve_csv(const PRCurve& curve, std::ostream& out) {
  write_csv_row(out, {"recall", "precision"});
  for (const auto& [recall, precision] : curve.points) {
    write_csv_row(out, {fixed(recall, 6), fixed(precision, 6)});
  }
}

std::string metrics_report_json(const MetricsReport& report) {
  const auto cls = [](const ClassMetrics& m) {
    return nlohmann::json{{"precision", m.precision},
                          {"recall", m.recall},
                          {"f1", m.f1},
                          {"degenerate", m.degenerate}};
  };
  nlohmann::json j{{"related", cls(report.summary.related)},
                   {"unrelated", cls(report.summary.unrelated)},
                   {"accuracy", report.summary.accuracy},
                   {"macro_f1", report.summary.macro_f1},
                   {"train_loss", report.train_loss},
                   {"test_loss", report.test_loss},
                   {"seconds", report.seconds}};
  return j.dump(2) + "\n";
}

}  // namespace floodtext
