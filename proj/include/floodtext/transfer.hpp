#pragma once

#include <cstdint>
#include <vector>

#include "floodtext/checkpoint.hpp"
#include "floodtext/schedule.hpp"

namespace floodtext {

enum class PlanStage { lm_finetune, classifier };
enum class UnfreezePolicy { all_at_once, gradual };

struct FineTunePlan {
  PlanStage stage = PlanStage::lm_finetune;
  StlrConfig stlr;  // total_steps 0 is filled in as epochs * steps-per-epoch
  double disc_factor = 2.6;
  int epochs = 1;
  UnfreezePolicy unfreeze_policy = UnfreezePolicy::all_at_once;
  // Groups frozen at epoch 1, counted from the deepest. -1 means "all but
  // the head", the usual starting point for gradual unfreezing.
  int frozen_groups_initial = 0;
  int batch_size = 32;  // classifier stage only
  std::uint64_t seed = 0;
  double clip_norm = 0.25;

  void validate() const;
};

// One row per optimizer step and unfrozen group; `group` is indexed from the
// head (0) toward the embedding, matching the discriminative LR order.
struct StepLogEntry {
  long long step = 0;
  int group = 0;
  double lr = 0.0;
  double loss = 0.0;
};

using StepLog = std::vector<StepLogEntry>;

// {embedding + lstm0}, {lstm1}, ..., {lstm_{n-1}}, {decoder}.
LayerGroups lm_layer_groups(const LMConfig& config);

// Number of groups unfrozen at 1-based `epoch` under the plan, counted from
// the head.
int unfrozen_group_count(const FineTunePlan& plan, int n_groups, int epoch);

// Stage-2 fine-tuning: all-layer training with discriminative LRs under the
// STLR schedule. The stream must be numericalized with the checkpoint's own
// vocabulary (OOV mapped to <unk> upstream).
Checkpoint finetune_lm(const Checkpoint& pretrained, const std::vector<int>& stream,
                       const FineTunePlan& plan, StepLog* step_log = nullptr);

}  // namespace floodtext
