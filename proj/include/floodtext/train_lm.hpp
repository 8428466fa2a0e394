#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "floodtext/checkpoint.hpp"
#include "floodtext/lm.hpp"
#include "floodtext/schedule.hpp"
#include "floodtext/vocab.hpp"

namespace floodtext {

struct TrainLmOptions {
  double clip_norm = 0.25;
  // Tail share of the stream held out for the per-epoch perplexity log.
  double valid_fraction = 0.05;
  std::uint64_t seed = 0;
  // Receives the initial snapshot and one snapshot per completed epoch. A
  // NumericsError abort therefore always leaves the last good checkpoint
  // with the caller before the error propagates.
  std::function<void(const Checkpoint&)> on_checkpoint;
};

// Truncated-BPTT next-token training. `schedule.total_steps == 0` is filled
// in as epochs * blocks; `schedule.lr_max == 0` falls back to config.base_lr.
Checkpoint train_lm(LanguageModel& model, const std::vector<int>& stream,
                    const Vocabulary& vocab, StlrConfig schedule,
                    const TrainLmOptions& opts = {});

}  // namespace floodtext
