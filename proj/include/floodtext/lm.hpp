#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "floodtext/lm_config.hpp"
#include "floodtext/ops.hpp"
#include "floodtext/rng.hpp"
#include "floodtext/tensor.hpp"

namespace floodtext {

// Stacked-LSTM language model. Parameter names:
//   encoder.emb.weight            [V, E]
//   encoder.lstm{i}.w_x           [in_i, 4H]
//   encoder.lstm{i}.w_h           [H, 4H]
//   encoder.lstm{i}.bias          [4H]
//   decoder.weight (untied only)  [H, V]
//   decoder.bias                  [V]
// With tie_weights the decoder reuses encoder.emb.weight transposed and no
// decoder.weight tensor exists.
template <class T>
struct LanguageModelT {
  LMConfig config;
  TensorT<T> emb;
  std::vector<nn::LstmParamsT<T>> lstm;
  TensorT<T> decoder_w;
  TensorT<T> decoder_b;

  std::vector<std::pair<std::string, TensorT<T>*>> named_params();
  std::vector<std::pair<std::string, const TensorT<T>*>> named_params() const;
  void zero_grads();
};

using LanguageModel = LanguageModelT<float>;

template <class T>
LanguageModelT<T> init_lm_t(const LMConfig& config, std::uint64_t seed);

inline LanguageModel init_lm(const LMConfig& config, std::uint64_t seed) {
  return init_lm_t<float>(config, seed);
}

// Recurrent state, one (h, c) pair per layer, each [B, H]. Values only; the
// state is detached from gradient history between blocks by construction.
template <class T>
struct LmStateT {
  std::vector<TensorT<T>> h;
  std::vector<TensorT<T>> c;
};

using LmState = LmStateT<float>;

template <class T>
LmStateT<T> initial_state(const LanguageModelT<T>& model, std::size_t batch);

// Masks drawn once per block: locked masks are reused across the block's time
// steps, the weight-drop masks are applied functionally to each w_h.
template <class T>
struct LmDropoutMasksT {
  TensorT<T> emb_rows;                    // [V, E]
  TensorT<T> input_locked;                // [B, E]
  std::vector<TensorT<T>> hidden_locked;  // per layer below the top, [B, H]
  TensorT<T> output_locked;               // [B, H]
  std::vector<TensorT<T>> weight_drop;    // per layer, shape of w_h
  bool active = false;
};

template <class T>
LmDropoutMasksT<T> sample_lm_masks(const LMConfig& config, std::size_t batch,
                                   RngStream& rng);

// Next-token logits for one block. Dropout applies only when `masks` is
// given. The state is advanced in place.
template <class T>
TensorT<T> lm_forward(const LanguageModelT<T>& model, const IntMatrix& input,
                      LmStateT<T>& state,
                      const LmDropoutMasksT<T>* masks = nullptr);

// Forward + mean cross entropy + backward for one (input, target) block.
// Accumulates parameter gradients and advances the state.
template <class T>
double lm_block_loss(LanguageModelT<T>& model, const IntMatrix& input,
                     const IntMatrix& target, LmStateT<T>& state,
                     const LmDropoutMasksT<T>* masks);

// exp(mean next-token cross entropy) over the stream, dropout off.
template <class T>
double perplexity_t(const LanguageModelT<T>& model, const std::vector<int>& stream,
                    int bptt_len);

double perplexity(const LanguageModel& model, const std::vector<int>& stream,
                  int bptt_len);

}  // namespace floodtext
