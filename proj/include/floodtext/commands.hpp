#pragma once

#include <string>
#include <vector>

#include "floodtext/run_config.hpp"

namespace floodtext {

// Subcommand bodies. Each returns the process exit code on success and
// throws floodtext::Error on failure; the CLI maps ErrorKind onto the exit
// code and prints a one-line machine-parseable message.
int cmd_stats(const RunConfig& cfg);
int cmd_pretrain(const RunConfig& cfg);
int cmd_finetune_lm(const RunConfig& cfg);
int cmd_train_clf(const RunConfig& cfg);
int cmd_eval(const RunConfig& cfg);
int cmd_ablate(const RunConfig& cfg);
int cmd_predict(const RunConfig& cfg, const std::vector<std::string>& texts);

}  // namespace floodtext
