#include "floodtext/transfer.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "floodtext/adam.hpp"
#include "floodtext/batchify.hpp"
#include "floodtext/error.hpp"
#include "floodtext/train_lm.hpp"

namespace floodtext {

void FineTunePlan::validate() const {
  if (!(disc_factor > 1.0)) throw ConfigError("disc_factor must be > 1");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (frozen_groups_initial < -1) {
    throw ConfigError("frozen_groups_initial must be >= 0 (or -1 for all but head)");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (!(clip_norm > 0.0)) throw ConfigError("clip_norm must be positive");
}

LayerGroups lm_layer_groups(const LMConfig& config) {
  LayerGroups g;
  std::vector<std::string> deepest = {"encoder.emb.weight", "encoder.lstm0.w_x",
                                      "encoder.lstm0.w_h", "encoder.lstm0.bias"};
  g.groups.push_back(std::move(deepest));
  for (int i = 1; i < config.n_layers; ++i) {
    const std::string base = "encoder.lstm" + std::to_string(i) + ".";
    g.groups.push_back({base + "w_x", base + "w_h", base + "bias"});
  }
  std::vector<std::string> head;
  if (!config.tie_weights) head.push_back("decoder.weight");
  head.push_back("decoder.bias");
  g.groups.push_back(std::move(head));
  return g;
}

int unfrozen_group_count(const FineTunePlan& plan, int n_groups, int epoch) {
  const int initial_frozen =
      plan.frozen_groups_initial < 0 ? n_groups - 1 : plan.frozen_groups_initial;
  if (initial_frozen >= n_groups) {
    throw ConfigError("frozen_groups_initial leaves no trainable group");
  }
  int count = n_groups - initial_frozen;
  if (plan.unfreeze_policy == UnfreezePolicy::gradual) count += epoch - 1;
  return std::min(count, n_groups);
}

Checkpoint finetune_lm(const Checkpoint& pretrained, const std::vector<int>& stream,
                       const FineTunePlan& plan, StepLog* step_log) {
  plan.validate();
  if (plan.stage != PlanStage::lm_finetune) {
    throw ConfigError("finetune_lm requires a plan with stage lm_finetune");
  }
  LanguageModel model = model_from_checkpoint(pretrained);
  const LMConfig& cfg = model.config;
  for (int id : stream) {
    if (id < 0 || id >= cfg.vocab_size) {
      throw ConfigError("target corpus contains token id " + std::to_string(id) +
                        " outside the checkpoint vocabulary");
    }
  }

  if (plan.epochs == 0) {
    return checkpoint_from_model(model, pretrained.vocab, Stage::lm_finetuned,
                                 pretrained.log);
  }

  const std::size_t min_valid = static_cast<std::size_t>(cfg.bptt_len) + 1;
  const std::size_t n_valid =
      std::max(min_valid, stream.size() / 20);
  if (stream.size() <= n_valid) {
    throw DataError("finetune_lm: stream too short to hold out validation tokens");
  }
  const std::vector<int> train_stream(stream.begin(),
                                      stream.end() - static_cast<std::ptrdiff_t>(n_valid));
  const std::vector<int> valid_stream(stream.end() - static_cast<std::ptrdiff_t>(n_valid),
                                      stream.end());

  const Batches batches = batchify(train_stream, cfg.batch_size, cfg.bptt_len);
  const std::size_t n_blocks = batches.n_blocks();

  StlrConfig schedule = plan.stlr;
  if (schedule.total_steps == 0) {
    schedule.total_steps =
        static_cast<long long>(plan.epochs) * static_cast<long long>(n_blocks);
  }
  schedule.validate();

  auto named = model.named_params();
  std::vector<Tensor*> param_ptrs;
  std::vector<std::string> names;
  for (auto& [name, t] : named) {
    param_ptrs.push_back(t);
    names.push_back(name);
  }
  const LayerGroups groups = lm_layer_groups(cfg);
  groups.check_partition(names);
  const int n_groups = groups.size();

  nn::AdamState adam;
  RngStream dropout_rng(plan.seed, rng_stream::kDropout);
  std::vector<TrainLogEntry> log;
  long long step = 0;

  for (int epoch = 1; epoch <= plan.epochs; ++epoch) {
    const int unfrozen = unfrozen_group_count(plan, n_groups, epoch);
    LmState state = initial_state(model, cfg.batch_size);
    double loss_sum = 0.0;
    for (std::size_t k = 0; k < n_blocks; ++k) {
      model.zero_grads();
      const auto masks = sample_lm_masks<float>(cfg, cfg.batch_size, dropout_rng);
      const double loss =
          lm_block_loss(model, batches.inputs[k], batches.targets[k], state, &masks);
      loss_sum += loss;
      nn::clip_global_norm(param_ptrs, plan.clip_norm);
      const double base = stlr(std::min(step, schedule.total_steps), schedule);
      const std::vector<double> lrs =
          discriminative_lrs(base, n_groups, plan.disc_factor);
      for (auto& [name, t] : named) {
        const int head_index = n_groups - 1 - groups.group_of(name);
        if (head_index >= unfrozen) continue;
        adam.step(name, *t, lrs[head_index]);
      }
      if (step_log) {
        for (int k_head = 0; k_head < unfrozen; ++k_head) {
          step_log->push_back({step, k_head, lrs[k_head], loss});
        }
      }
      ++step;
    }
    TrainLogEntry entry;
    entry.epoch = epoch;
    entry.train_loss = loss_sum / static_cast<double>(n_blocks);
    entry.valid_score = perplexity(model, valid_stream, cfg.bptt_len);
    log.push_back(entry);
  }

  return checkpoint_from_model(model, pretrained.vocab, Stage::lm_finetuned, log);
}

}  // namespace floodtext
