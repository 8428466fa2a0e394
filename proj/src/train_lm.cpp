#include "floodtext/train_lm.hpp"

#include <algorithm>
#include <vector>

#include "floodtext/adam.hpp"
#include "floodtext/batchify.hpp"
#include "floodtext/error.hpp"

namespace floodtext {

Checkpoint train_lm(LanguageModel& model, const std::vector<int>& stream,
                    const Vocabulary& vocab, StlrConfig schedule,
                    const TrainLmOptions& opts) {
  const LMConfig& cfg = model.config;
  cfg.validate();
  if (opts.valid_fraction <= 0.0 || opts.valid_fraction >= 1.0) {
    throw ConfigError("valid_fraction must lie in (0,1)");
  }

  const std::size_t min_valid = static_cast<std::size_t>(cfg.bptt_len) + 1;
  const std::size_t n_valid = std::max(
      min_valid,
      static_cast<std::size_t>(static_cast<double>(stream.size()) * opts.valid_fraction));
  if (stream.size() <= n_valid) {
    throw DataError("train_lm: stream too short to hold out validation tokens");
  }
  const std::vector<int> train_stream(stream.begin(),
                                      stream.end() - static_cast<std::ptrdiff_t>(n_valid));
  const std::vector<int> valid_stream(stream.end() - static_cast<std::ptrdiff_t>(n_valid),
                                      stream.end());

  const Batches batches = batchify(train_stream, cfg.batch_size, cfg.bptt_len);
  const std::size_t n_blocks = batches.n_blocks();

  std::vector<TrainLogEntry> log;
  Checkpoint last = checkpoint_from_model(model, vocab, Stage::pretrained, log);
  if (opts.on_checkpoint) opts.on_checkpoint(last);
  if (cfg.epochs == 0) return last;

  if (schedule.lr_max == 0.0) schedule.lr_max = cfg.base_lr;
  if (schedule.total_steps == 0) {
    schedule.total_steps = static_cast<long long>(cfg.epochs) *
                           static_cast<long long>(n_blocks);
  }
  schedule.validate();

  auto named = model.named_params();
  std::vector<Tensor*> param_ptrs;
  for (auto& [name, t] : named) param_ptrs.push_back(t);

  nn::AdamState adam;
  RngStream dropout_rng(opts.seed, rng_stream::kDropout);
  long long step = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    LmState state = initial_state(model, cfg.batch_size);
    double loss_sum = 0.0;
    for (std::size_t k = 0; k < n_blocks; ++k) {
      model.zero_grads();
      const auto masks = sample_lm_masks<float>(cfg, cfg.batch_size, dropout_rng);
      loss_sum += lm_block_loss(model, batches.inputs[k], batches.targets[k], state,
                                &masks);
      nn::clip_global_norm(param_ptrs, opts.clip_norm);
      const double lr = stlr(std::min(step, schedule.total_steps), schedule);
      for (auto& [name, t] : named) adam.step(name, *t, lr);
      ++step;
    }
    TrainLogEntry entry;
    entry.epoch = epoch;
    entry.train_loss = loss_sum / static_cast<double>(n_blocks);
    entry.valid_score = perplexity(model, valid_stream, cfg.bptt_len);
    log.push_back(entry);
    last = checkpoint_from_model(model, vocab, Stage::pretrained, log);
    if (opts.on_checkpoint) opts.on_checkpoint(last);
  }
  return last;
}

}  // namespace floodtext
