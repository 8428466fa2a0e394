#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "floodtext/lm.hpp"
#include "floodtext/lm_config.hpp"
#include "floodtext/tensor.hpp"
#include "floodtext/vocab.hpp"

namespace floodtext {

enum class Stage { pretrained, lm_finetuned, classifier };

std::string stage_name(Stage stage);
Stage parse_stage(const std::string& name);

struct TrainLogEntry {
  int epoch = 0;
  double train_loss = 0.0;
  // Held-out perplexity for LM stages, accuracy for the classifier stage.
  double valid_score = 0.0;
};

// On-disk model artifact. File layout: magic "ULMF", u32 format_version,
// then four length-prefixed sections (config JSON, vocab token list,
// named tensors, training log). Round-trips bit-exactly.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::uint32_t format_version = kVersion;
  Stage stage = Stage::pretrained;
  LMConfig config;
  int head_hidden = 0;        // classifier checkpoints only
  double head_dropout = 0.0;  // classifier checkpoints only
  Vocabulary vocab;
  std::vector<std::pair<std::string, Tensor>> tensors;
  std::vector<TrainLogEntry> log;

  const Tensor* find(const std::string& name) const;
};

Checkpoint checkpoint_from_model(const LanguageModel& model, const Vocabulary& vocab,
                                 Stage stage, std::vector<TrainLogEntry> log = {});

// ConfigError when required tensors are missing or shaped inconsistently
// with the stored config.
LanguageModel model_from_checkpoint(const Checkpoint& ckpt);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace floodtext
