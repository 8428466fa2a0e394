#pragma once

#include <string>

namespace floodtext {

// Per-site dropout probabilities. The presets start from one base profile and
// scale every site by a single multiplier, because the training recipes give
// one dropout number that has to cover five sites.
struct DropoutProfile {
  double output = 0.4;
  double hidden = 0.3;
  double input = 0.6;
  double embedding_row = 0.1;
  double weight_drop = 0.5;

  DropoutProfile scaled(double multiplier) const;
  void validate() const;
  bool all_zero() const;
};

DropoutProfile no_dropout();

struct LMConfig {
  int vocab_size = 0;
  int emb_dim = 64;
  int hidden_dim = 128;
  int n_layers = 3;
  int bptt_len = 35;
  int batch_size = 32;
  DropoutProfile dropouts;
  bool tie_weights = false;
  int epochs = 4;
  double base_lr = 0.004;

  // Layer i maps layer_in(i) -> hidden_dim. Tying the decoder to the
  // embedding therefore requires hidden_dim == emb_dim.
  int layer_in(int i) const { return i == 0 ? emb_dim : hidden_dim; }
  int top_dim() const { return hidden_dim; }

  void validate() const;
};

// Desk-scale default: small enough to pretrain on a laptop-class CPU.
LMConfig desk_lm_config();

// Dimensions from the reproduced training setup (embedding 400, 3 layers,
// 1150 hidden units, batch 70). BPTT length and epoch count were never
// published; the values here are conventional ones.
LMConfig paper_lm_config();

}  // namespace floodtext
