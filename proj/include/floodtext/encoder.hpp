#pragma once

#include <vector>

#include "floodtext/lm.hpp"
#include "floodtext/tensor.hpp"

namespace floodtext {

// Forward-pass record for one block of the embedding + LSTM stack, kept so
// the matching backward call can replay it. Shared by the language-model
// decoder path and the classifier head path.
template <class T>
struct EncoderCaches {
  TensorT<T> emb_used;  // the table lookups actually read (row mask folded in)
  std::vector<std::vector<TensorT<T>>> x;  // [layer][t], post-mask inputs
  std::vector<std::vector<TensorT<T>>> h;  // [layer][t]
  std::vector<std::vector<TensorT<T>>> c;  // [layer][t]
  std::vector<std::vector<nn::LstmCellCache<T>>> cell;
  std::vector<TensorT<T>> h0, c0;
  TensorT<T> top_flat;  // [B*L, H], top-layer output after the output mask
};

template <class T>
LmStateT<T> zero_state(const LMConfig& config, std::size_t batch);

// Returns the top-layer hidden sequence as [B*L, H] (row b*L + t), with the
// locked output mask applied when masks are given. Advances `state` in place.
template <class T>
TensorT<T> encoder_forward(const LMConfig& config, const TensorT<T>& emb,
                           const std::vector<nn::LstmParamsT<T>>& lstm,
                           const IntMatrix& input, LmStateT<T>& state,
                           const LmDropoutMasksT<T>* masks, EncoderCaches<T>* cc);

// `dtop.values` holds the gradient wrt the tensor encoder_forward returned.
// Accumulates into emb.grad and the lstm parameter grads.
template <class T>
void encoder_backward(const LMConfig& config, TensorT<T>& emb,
                      std::vector<nn::LstmParamsT<T>>& lstm, const IntMatrix& input,
                      const LmDropoutMasksT<T>* masks, EncoderCaches<T>& cc,
                      const TensorT<T>& dtop);

}  // namespace floodtext
