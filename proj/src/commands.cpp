#include "floodtext/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "floodtext/ablation.hpp"
#include "floodtext/classifier.hpp"
#include "floodtext/csv.hpp"
#include "floodtext/error.hpp"
#include "floodtext/metrics.hpp"
#include "floodtext/split.hpp"
#include "floodtext/stats.hpp"
#include "floodtext/train_lm.hpp"
#include "floodtext/transfer.hpp"
#include "floodtext/vocab.hpp"

namespace floodtext {
namespace {

namespace fs = std::filesystem;

void ensure_dir(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw DataError("cannot create directory '" + path + "': " + ec.message());
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  if (!out) throw DataError("write failed for '" + path + "'");
}

void write_snapshot(const RunConfig& cfg, const std::string& dir) {
  ensure_dir(dir);
  write_text(dir + "/config.json", run_config_json(cfg));
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

void require_checkpoint(const std::string& path, const char* produced_by) {
  if (!fs::exists(path)) {
    throw ConfigError("missing prerequisite checkpoint '" + path + "' (run " +
                      produced_by + " first)");
  }
}

std::vector<RawTweet> load_raw(const RunConfig& cfg) {
  return load_tweets(cfg.paths.tweets);
}

// Continuous next-token stream for fine-tuning: each tweet contributes
// <bos> tokens <eos> under the checkpoint vocabulary.
std::vector<int> tweet_stream(const std::vector<CleanTweet>& tweets,
                              const Vocabulary& vocab) {
  std::vector<int> stream;
  for (const auto& tweet : tweets) {
    const std::vector<int> ids = numericalize(tweet, vocab, true);
    stream.insert(stream.end(), ids.begin(), ids.end());
  }
  return stream;
}

void write_epoch_log(const std::string& path,
                     const std::vector<TrainLogEntry>& log) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_csv_row(out, {"epoch", "train_loss", "valid_score"});
  for (const auto& entry : log) {
    write_csv_row(out, {std::to_string(entry.epoch),
                        fixed(entry.train_loss, 6),
                        fixed(entry.valid_score, 6)});
  }
}

void write_step_log(const std::string& path, const StepLog& log) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_csv_row(out, {"step", "group", "lr", "loss"});
  for (const auto& entry : log) {
    write_csv_row(out, {std::to_string(entry.step), std::to_string(entry.group),
                        fixed(entry.lr, 8), fixed(entry.loss, 6)});
  }
}

FineTunePlan classifier_plan(const RunConfig& cfg) {
  FineTunePlan plan;
  plan.stage = PlanStage::classifier;
  plan.stlr = StlrConfig{cfg.classifier.base_lr, cfg.classifier.cut_frac,
                         cfg.classifier.ratio, 0};
  plan.disc_factor = cfg.classifier.disc_factor;
  plan.epochs = cfg.classifier.epochs;
  const bool gradual = cfg.classifier.unfreeze == "gradual";
  plan.unfreeze_policy =
      gradual ? UnfreezePolicy::gradual : UnfreezePolicy::all_at_once;
  plan.frozen_groups_initial = gradual ? -1 : 0;
  plan.batch_size = cfg.classifier.batch_size;
  plan.seed = cfg.seed;
  return plan;
}

std::string encoder_path(const RunConfig& cfg) {
  const Stage stage = cfg.classifier.encoder == "pretrained"
                          ? Stage::pretrained
                          : Stage::lm_finetuned;
  return cfg.checkpoint_path(stage);
}

const char* encoder_command(const RunConfig& cfg) {
  return cfg.classifier.encoder == "pretrained" ? "pretrain" : "finetune-lm";
}

// No-transfer baseline: same layer sizes, random weights, vocabulary built
// from the labeled sample alone.
Checkpoint scratch_encoder(const RunConfig& cfg,
                           const std::vector<CleanTweet>& sample) {
  LMConfig config = cfg.lm.config;
  Vocabulary vocab = build_vocab(sample, /*min_freq=*/1, cfg.lm.max_vocab);
  config.vocab_size = static_cast<int>(vocab.size());
  config.validate();
  return checkpoint_from_model(init_lm(config, cfg.seed), vocab,
                               Stage::pretrained);
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

int cmd_stats(const RunConfig& cfg) {
  const std::vector<RawTweet> raw = load_raw(cfg);
  const CleanProfile profile = cfg.stats.cleaning == "model"
                                   ? CleanProfile::model
                                   : CleanProfile::stats;
  const std::vector<CleanTweet> clean = clean_corpus(raw, profile);

  const std::string dir = cfg.paths.out_dir + "/stats";
  write_snapshot(cfg, dir);

  const auto write_ngrams = [&](int n, const std::string& name) {
    const NGramStats stats = ngram_stats(clean, n, cfg.stats.top_k);
    std::ofstream out(dir + "/" + name, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + dir + "/" + name + "'");
    write_csv_row(out, {"ngram", "count"});
    for (const auto& [tokens, count] : stats.top()) {
      std::string joined;
      for (const auto& token : tokens) {
        if (!joined.empty()) joined += ' ';
        joined += token;
      }
      write_csv_row(out, {joined, std::to_string(count)});
    }
  };
  write_ngrams(1, "unigrams.csv");
  write_ngrams(2, "bigrams.csv");
  write_ngrams(3, "trigrams.csv");

  const LengthStats lengths = length_stats(raw);
  const auto write_hist = [&](const std::map<std::size_t, long long>& hist,
                              const std::string& name, const char* column) {
    std::ofstream out(dir + "/" + name, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + dir + "/" + name + "'");
    write_csv_row(out, {column, "count"});
    for (const auto& [value, count] : hist) {
      write_csv_row(out, {std::to_string(value), std::to_string(count)});
    }
  };
  write_hist(lengths.words, "hist_words.csv", "words");
  write_hist(lengths.chars, "hist_chars.csv", "chars");

  long long related = 0, unrelated = 0, unlabeled = 0;
  for (const auto& tweet : raw) {
    if (!tweet.label) {
      ++unlabeled;
    } else if (*tweet.label == Label::related) {
      ++related;
    } else {
      ++unrelated;
    }
  }
  {
    std::ofstream out(dir + "/class_counts.csv",
                      std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + dir + "/class_counts.csv'");
    write_csv_row(out, {"class", "count"});
    write_csv_row(out, {"related", std::to_string(related)});
    write_csv_row(out, {"unrelated", std::to_string(unrelated)});
    write_csv_row(out, {"unlabeled", std::to_string(unlabeled)});
  }

  std::cout << "tweets=" << raw.size() << " related=" << related
            << " unrelated=" << unrelated << " unlabeled=" << unlabeled
            << "\n"
            << "stats written to " << dir << "\n";
  return 0;
}

int cmd_pretrain(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const std::string text = read_text(cfg.paths.general_corpus);
  const std::vector<std::string> tokens =
      tokenize(clean_text(text, CleanProfile::model));
  if (tokens.empty()) {
    throw DataError("general corpus '" + cfg.paths.general_corpus +
                    "' has no tokens");
  }
  const Vocabulary vocab =
      build_vocab(tokens, cfg.lm.min_freq, cfg.lm.max_vocab);
  const std::vector<int> stream = numericalize(tokens, vocab, false);

  LMConfig lm_cfg = cfg.lm.config;
  lm_cfg.vocab_size = vocab.size();
  LanguageModel model = init_lm(lm_cfg, cfg.seed);

  const StlrConfig schedule{lm_cfg.base_lr, cfg.lm.cut_frac, cfg.lm.ratio, 0};

  ensure_dir(cfg.checkpoint_dir());
  const std::string ckpt_path = cfg.checkpoint_path(Stage::pretrained);
  TrainLmOptions opts;
  opts.seed = cfg.seed;
  opts.on_checkpoint = [&](const Checkpoint& snapshot) {
    save_checkpoint(snapshot, ckpt_path);
  };

  const Checkpoint ckpt = train_lm(model, stream, vocab, schedule, opts);

  const std::string dir = cfg.paths.out_dir + "/pretrain";
  write_snapshot(cfg, dir);
  write_snapshot(cfg, cfg.checkpoint_dir());
  write_epoch_log(dir + "/log.csv", ckpt.log);

  std::cout << "vocab=" << vocab.size() << " tokens=" << stream.size() << "\n";
  for (const auto& entry : ckpt.log) {
    if (entry.epoch == 0) continue;
    std::cout << "epoch " << entry.epoch << "/" << lm_cfg.epochs
              << " loss=" << fixed(entry.train_loss, 4)
              << " valid_ppl=" << fixed(entry.valid_score, 3) << "\n";
  }
  std::cout << "checkpoint " << ckpt_path << " ("
            << fixed(elapsed_seconds(start), 1) << "s)\n";
  return 0;
}

int cmd_finetune_lm(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const std::string in_path = cfg.checkpoint_path(Stage::pretrained);
  require_checkpoint(in_path, "pretrain");
  Checkpoint pretrained = load_checkpoint(in_path);
  pretrained.config.dropouts =
      DropoutProfile{}.scaled(cfg.finetune_lm.dropout_multiplier);

  const std::vector<CleanTweet> tweets =
      clean_corpus(load_raw(cfg), CleanProfile::model);
  const std::vector<int> stream = tweet_stream(tweets, pretrained.vocab);

  FineTunePlan plan;
  plan.stage = PlanStage::lm_finetune;
  plan.stlr = StlrConfig{cfg.finetune_lm.base_lr, cfg.finetune_lm.cut_frac,
                         cfg.finetune_lm.ratio, 0};
  plan.disc_factor = cfg.finetune_lm.disc_factor;
  plan.epochs = cfg.finetune_lm.epochs;
  plan.seed = cfg.seed;

  StepLog step_log;
  const Checkpoint tuned = finetune_lm(pretrained, stream, plan, &step_log);

  ensure_dir(cfg.checkpoint_dir());
  const std::string out_path = cfg.checkpoint_path(Stage::lm_finetuned);
  save_checkpoint(tuned, out_path);

  const std::string dir = cfg.paths.out_dir + "/finetune_lm";
  write_snapshot(cfg, dir);
  write_epoch_log(dir + "/log.csv", tuned.log);
  write_step_log(dir + "/step_log.csv", step_log);

  std::cout << "stream_tokens=" << stream.size() << "\n";
  for (const auto& entry : tuned.log) {
    if (entry.epoch == 0) continue;
    std::cout << "epoch " << entry.epoch << "/" << plan.epochs
              << " loss=" << fixed(entry.train_loss, 4)
              << " valid_ppl=" << fixed(entry.valid_score, 3) << "\n";
  }
  std::cout << "checkpoint " << out_path << " ("
            << fixed(elapsed_seconds(start), 1) << "s)\n";
  return 0;
}

int cmd_train_clf(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  std::string enc_path;
  if (cfg.classifier.encoder != "scratch") {
    enc_path = encoder_path(cfg);
    require_checkpoint(enc_path, encoder_command(cfg));
  }

  const std::vector<CleanTweet> tweets =
      clean_corpus(load_raw(cfg), CleanProfile::model);
  const DatasetSplit parts = split(tweets, 1.0 - cfg.classifier.test_ratio,
                                   cfg.seed, /*stratified=*/true);
  const std::vector<CleanTweet> sample =
      subsample_labels(parts.train, cfg.classifier.label_fraction, cfg.seed);

  const Checkpoint encoder = cfg.classifier.encoder == "scratch"
                                 ? scratch_encoder(cfg, sample)
                                 : load_checkpoint(enc_path);

  ClassifierModel model =
      build_classifier(encoder, cfg.classifier.head_hidden, cfg.seed,
                       cfg.classifier.dropout_multiplier);

  StepLog step_log;
  std::vector<TrainLogEntry> epoch_log;
  train_classifier(model, sample, classifier_plan(cfg), &step_log, &epoch_log);

  ensure_dir(cfg.checkpoint_dir());
  const std::string out_path = cfg.checkpoint_path(Stage::classifier);
  save_checkpoint(checkpoint_from_classifier(model, epoch_log), out_path);

  const std::string dir = cfg.paths.out_dir + "/train_clf";
  write_snapshot(cfg, dir);
  write_epoch_log(dir + "/log.csv", epoch_log);
  write_step_log(dir + "/step_log.csv", step_log);

  std::cout << "train_tweets=" << sample.size() << " (of " << parts.train.size()
            << ", " << fixed(cfg.classifier.label_fraction, 0) << "%)\n";
  for (const auto& entry : epoch_log) {
    std::cout << "epoch " << entry.epoch << "/" << cfg.classifier.epochs
              << " loss=" << fixed(entry.train_loss, 4)
              << " train_acc=" << fixed(entry.valid_score, 4) << "\n";
  }
  std::cout << "checkpoint " << out_path << " ("
            << fixed(elapsed_seconds(start), 1) << "s)\n";
  return 0;
}

int cmd_eval(const RunConfig& cfg) {
  const std::string clf_path = cfg.checkpoint_path(Stage::classifier);
  require_checkpoint(clf_path, "train-clf");
  const ClassifierModel model =
      classifier_from_checkpoint(load_checkpoint(clf_path));

  const std::vector<CleanTweet> tweets =
      clean_corpus(load_raw(cfg), CleanProfile::model);
  const DatasetSplit parts = split(tweets, 1.0 - cfg.classifier.test_ratio,
                                   cfg.seed, /*stratified=*/true);
  if (parts.test.empty()) throw DataError("empty test split");

  const auto start = std::chrono::steady_clock::now();
  const std::vector<double> scores = predict_scores(model, parts.test);

  std::vector<Label> preds;
  std::vector<Label> truths;
  preds.reserve(scores.size());
  truths.reserve(scores.size());
  double test_loss = 0.0;
  for (std::size_t i = 0; i < parts.test.size(); ++i) {
    if (!parts.test[i].label) {
      throw LabelError("unlabeled record '" + parts.test[i].id +
                       "' in test split");
    }
    preds.push_back(scores[i] >= 0.5 ? Label::related : Label::unrelated);
    truths.push_back(*parts.test[i].label);
    const double p = truths.back() == Label::related ? scores[i]
                                                     : 1.0 - scores[i];
    test_loss -= std::log(std::max(p, 1e-12));
  }
  test_loss /= static_cast<double>(parts.test.size());

  MetricsReport report;
  report.summary = precision_recall_f1(confusion(preds, truths));
  report.train_loss = classifier_loss(model, parts.train);
  report.test_loss = test_loss;
  const PRCurve curve = pr_curve(scores, truths);
  report.seconds = elapsed_seconds(start);

  const std::string dir = cfg.paths.out_dir + "/eval";
  write_snapshot(cfg, dir);
  {
    std::ofstream out(dir + "/metrics.csv", std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + dir + "/metrics.csv'");
    write_metrics_header(out);
    write_metrics_rows(out, cfg.classifier.label_fraction, cfg.seed,
                       report.summary, report.seconds);
  }
  write_text(dir + "/report.json", metrics_report_json(report));
  {
    std::ofstream out(dir + "/pr_curve.csv",
                      std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + dir + "/pr_curve.csv'");
    write_pr_curve_csv(curve, out);
  }
  {
    std::ofstream out(dir + "/predictions.csv",
                      std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + dir + "/predictions.csv'");
    write_csv_row(out, {"tweet_id", "p_related", "truth"});
    for (std::size_t i = 0; i < parts.test.size(); ++i) {
      write_csv_row(out, {parts.test[i].id, fixed(scores[i], 6),
                          label_name(truths[i])});
    }
  }

  std::cout << "accuracy=" << fixed(report.summary.accuracy, 4)
            << " macro_f1=" << fixed(report.summary.macro_f1, 4) << "\n"
            << "related precision=" << fixed(report.summary.related.precision, 4)
            << " recall=" << fixed(report.summary.related.recall, 4)
            << " f1=" << fixed(report.summary.related.f1, 4) << "\n"
            << "unrelated precision="
            << fixed(report.summary.unrelated.precision, 4)
            << " recall=" << fixed(report.summary.unrelated.recall, 4)
            << " f1=" << fixed(report.summary.unrelated.f1, 4) << "\n"
            << "train_loss=" << fixed(report.train_loss, 4)
            << " test_loss=" << fixed(report.test_loss, 4)
            << " average_precision=" << fixed(curve.average_precision, 4)
            << "\n"
            << "report written to " << dir << "\n";
  return 0;
}

int cmd_ablate(const RunConfig& cfg) {
  if (cfg.classifier.encoder == "scratch") {
    throw ConfigError("ablate requires a checkpoint encoder");
  }
  const std::string enc_path = encoder_path(cfg);
  require_checkpoint(enc_path, encoder_command(cfg));
  const Checkpoint encoder = load_checkpoint(enc_path);

  const std::vector<CleanTweet> tweets =
      clean_corpus(load_raw(cfg), CleanProfile::model);

  AblationOptions options;
  options.fractions = cfg.ablation.fractions;
  options.seeds = cfg.ablation.seeds;
  options.test_ratio = cfg.classifier.test_ratio;
  options.split_seed = cfg.seed;
  options.head_hidden = cfg.classifier.head_hidden;
  options.dropout_multiplier = cfg.classifier.dropout_multiplier;
  options.plan = classifier_plan(cfg);

  const std::string dir = cfg.paths.out_dir + "/ablation";
  write_snapshot(cfg, dir);
  std::ofstream out(dir + "/ablation.csv", std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + dir + "/ablation.csv'");
  write_metrics_header(out);

  const AblationTable table = ablation_run(
      tweets, encoder, options, [&](const AblationRow& row) {
        write_metrics_rows(out, row.fraction, row.seed, row.metrics,
                           row.seconds);
        out.flush();
        char line[160];
        std::snprintf(line, sizeof(line),
                      "fraction=%g seed=%llu accuracy=%.4f (%.1fs)",
                      row.fraction,
                      static_cast<unsigned long long>(row.seed),
                      row.metrics.accuracy, row.seconds);
        std::cout << line << std::endl;
      });

  char digest[32];
  std::snprintf(digest, sizeof(digest), "%016llx",
                static_cast<unsigned long long>(split_digest(table.test_ids)));
  std::cout << "rows=" << table.rows.size() << " test_size="
            << table.test_ids.size() << " test_digest=" << digest << "\n"
            << "table written to " << dir << "/ablation.csv\n";
  return 0;
}

int cmd_predict(const RunConfig& cfg, const std::vector<std::string>& texts) {
  const std::string clf_path = cfg.checkpoint_path(Stage::classifier);
  require_checkpoint(clf_path, "train-clf");
  const ClassifierModel model =
      classifier_from_checkpoint(load_checkpoint(clf_path));

  for (const auto& text : texts) {
    const Prediction p = predict(model, text);
    char line[96];
    std::snprintf(line, sizeof(line), "related=%.6f unrelated=%.6f%s",
                  p.related, p.unrelated, p.empty_input ? " empty_input" : "");
    std::cout << line << "\n";
  }
  return 0;
}

}  // namespace floodtext
