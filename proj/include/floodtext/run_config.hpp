#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "floodtext/checkpoint.hpp"
#include "floodtext/lm_config.hpp"

namespace floodtext {

// Resolved run settings: preset defaults, then the config file, then CLI
// flags, strongest last. Unknown keys anywhere in the file are rejected.

struct RunPaths {
  std::string general_corpus = "data/general_corpus.txt";
  std::string tweets = "data/synthetic_tweets.csv";
  std::string checkpoint_dir;  // empty: <out_dir>/checkpoints
  std::string out_dir = "out";
};

struct LmSection {
  std::string preset = "desk";
  LMConfig config;  // preset plus explicit overrides, vocab_size still 0
  double dropout_multiplier = 0.2;
  int min_freq = 2;
  int max_vocab = 60000;
  double cut_frac = 0.1;
  double ratio = 32.0;
};

struct FinetuneLmSection {
  int epochs = 8;
  double base_lr = 0.004;
  double cut_frac = 0.1;
  double ratio = 32.0;
  double disc_factor = 2.6;
  double dropout_multiplier = 0.2;
};

struct ClassifierSection {
  int epochs = 32;
  double base_lr = 0.01;
  double cut_frac = 0.1;
  double ratio = 32.0;
  double disc_factor = 2.6;
  int batch_size = 16;
  int head_hidden = 50;
  double dropout_multiplier = 0.4;
  double label_fraction = 100.0;
  std::string encoder = "lm_finetuned";  // or "pretrained", "scratch"
  std::string unfreeze = "gradual";      // or "all_at_once"
  double test_ratio = 0.3;
};

struct AblationSection {
  std::vector<double> fractions{5, 10, 20, 50, 80};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
};

struct StatsSection {
  int top_k = 25;
  std::string cleaning = "stats";  // or "model"
};

struct RunConfig {
  RunPaths paths;
  std::uint64_t seed = 42;
  LmSection lm;
  FinetuneLmSection finetune_lm;
  ClassifierSection classifier;
  AblationSection ablation;
  StatsSection stats;

  std::string checkpoint_dir() const;
  std::string checkpoint_path(Stage stage) const;
  void validate() const;
};

struct CliOverrides {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> preset;
  std::optional<std::string> fractions;  // comma-separated percents
  std::optional<std::string> out;
};

// Parses the JSON config text. `preset` beats the file's lm.preset; the
// file's other lm keys still apply on top of the chosen preset.
RunConfig parse_run_config(const std::string& json_text,
                           const std::optional<std::string>& preset = std::nullopt);

RunConfig resolve_run_config(const CliOverrides& overrides);

std::vector<double> parse_fraction_list(const std::string& text);

// Snapshot of the fully resolved config, written into each output directory.
std::string run_config_json(const RunConfig& config);

}  // namespace floodtext
