#include "floodtext/lm.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "floodtext/encoder.hpp"
#include "floodtext/error.hpp"

namespace floodtext {

DropoutProfile DropoutProfile::scaled(double multiplier) const {
  if (multiplier < 0.0) {
    throw ConfigError("dropout multiplier must be >= 0");
  }
  DropoutProfile p;
  p.output = output * multiplier;
  p.hidden = hidden * multiplier;
  p.input = input * multiplier;
  p.embedding_row = embedding_row * multiplier;
  p.weight_drop = weight_drop * multiplier;
  p.validate();
  return p;
}

void DropoutProfile::validate() const {
  for (double v : {output, hidden, input, embedding_row, weight_drop}) {
    if (v < 0.0 || v >= 1.0) {
      throw ConfigError("dropout probabilities must lie in [0,1)");
    }
  }
}

bool DropoutProfile::all_zero() const {
  return output == 0.0 && hidden == 0.0 && input == 0.0 &&
         embedding_row == 0.0 && weight_drop == 0.0;
}

DropoutProfile no_dropout() {
  DropoutProfile p;
  p.output = p.hidden = p.input = p.embedding_row = p.weight_drop = 0.0;
  return p;
}

void LMConfig::validate() const {
  if (vocab_size < 2) throw ConfigError("vocab_size must be at least 2");
  if (emb_dim < 1 || hidden_dim < 1) {
    throw ConfigError("embedding and hidden dims must be positive");
  }
  if (n_layers < 1) throw ConfigError("n_layers must be at least 1");
  if (bptt_len < 1) throw ConfigError("bptt_len must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(base_lr > 0.0)) throw ConfigError("base_lr must be positive");
  dropouts.validate();
  if (tie_weights && emb_dim != hidden_dim) {
    throw ConfigError("tie_weights requires emb_dim == hidden_dim, got " +
                      std::to_string(emb_dim) + " vs " + std::to_string(hidden_dim));
  }
}

LMConfig desk_lm_config() {
  LMConfig c;
  c.dropouts = DropoutProfile{}.scaled(0.2);
  c.epochs = 8;
  return c;
}

LMConfig paper_lm_config() {
  LMConfig c;
  c.emb_dim = 400;
  c.hidden_dim = 1150;
  c.n_layers = 3;
  c.bptt_len = 70;
  c.batch_size = 70;
  c.dropouts = DropoutProfile{}.scaled(0.7);
  c.epochs = 10;
  return c;
}

template <class T>
std::vector<std::pair<std::string, TensorT<T>*>> LanguageModelT<T>::named_params() {
  std::vector<std::pair<std::string, TensorT<T>*>> out;
  out.emplace_back("encoder.emb.weight", &emb);
  for (std::size_t i = 0; i < lstm.size(); ++i) {
    const std::string base = "encoder.lstm" + std::to_string(i) + ".";
    out.emplace_back(base + "w_x", &lstm[i].w_x);
    out.emplace_back(base + "w_h", &lstm[i].w_h);
    out.emplace_back(base + "bias", &lstm[i].bias);
  }
  if (!config.tie_weights) out.emplace_back("decoder.weight", &decoder_w);
  out.emplace_back("decoder.bias", &decoder_b);
  return out;
}

template <class T>
std::vector<std::pair<std::string, const TensorT<T>*>> LanguageModelT<T>::named_params()
    const {
  std::vector<std::pair<std::string, const TensorT<T>*>> out;
  for (auto& [name, tensor] : const_cast<LanguageModelT<T>*>(this)->named_params()) {
    out.emplace_back(name, tensor);
  }
  return out;
}

template <class T>
void LanguageModelT<T>::zero_grads() {
  for (auto& [name, tensor] : named_params()) tensor->zero_grad();
}

template <class T>
LanguageModelT<T> init_lm_t(const LMConfig& config, std::uint64_t seed) {
  config.validate();
  LanguageModelT<T> m;
  m.config = config;
  const std::size_t v = config.vocab_size;
  const std::size_t e = config.emb_dim;
  const std::size_t h = config.hidden_dim;

  m.emb = TensorT<T>({v, e});
  RngStream emb_rng(seed, rng_stream::kEmbeddingInit);
  for (auto& w : m.emb.values) w = static_cast<T>(emb_rng.uniform(-0.1, 0.1));

  RngStream lstm_rng(seed, rng_stream::kLstmInit);
  const double bound = 1.0 / std::sqrt(static_cast<double>(h));
  m.lstm.resize(config.n_layers);
  for (int i = 0; i < config.n_layers; ++i) {
    const std::size_t in = config.layer_in(i);
    auto& p = m.lstm[i];
    p.w_x = TensorT<T>({in, 4 * h});
    p.w_h = TensorT<T>({h, 4 * h});
    p.bias = TensorT<T>({4 * h});
    for (auto& w : p.w_x.values) w = static_cast<T>(lstm_rng.uniform(-bound, bound));
    for (auto& w : p.w_h.values) w = static_cast<T>(lstm_rng.uniform(-bound, bound));
  }

  m.decoder_b = TensorT<T>({v});
  if (!config.tie_weights) {
    m.decoder_w = TensorT<T>({h, v});
    RngStream head_rng(seed, rng_stream::kHeadInit);
    for (auto& w : m.decoder_w.values) w = static_cast<T>(head_rng.uniform(-bound, bound));
  }
  return m;
}

template <class T>
LmStateT<T> zero_state(const LMConfig& config, std::size_t batch) {
  LmStateT<T> s;
  const std::size_t h = config.hidden_dim;
  for (int l = 0; l < config.n_layers; ++l) {
    s.h.emplace_back(std::vector<std::size_t>{batch, h});
    s.c.emplace_back(std::vector<std::size_t>{batch, h});
  }
  return s;
}

template <class T>
LmStateT<T> initial_state(const LanguageModelT<T>& model, std::size_t batch) {
  return zero_state<T>(model.config, batch);
}

template <class T>
LmDropoutMasksT<T> sample_lm_masks(const LMConfig& config, std::size_t batch,
                                   RngStream& rng) {
  const auto& d = config.dropouts;
  const std::size_t v = config.vocab_size;
  const std::size_t e = config.emb_dim;
  const std::size_t h = config.hidden_dim;
  LmDropoutMasksT<T> mk;
  mk.emb_rows = nn::dropout_mask<T>(nn::DropoutKind::embedding_row, d.embedding_row,
                                    {v, e}, rng);
  mk.input_locked = nn::dropout_mask<T>(nn::DropoutKind::locked, d.input, {batch, e}, rng);
  for (int i = 0; i + 1 < config.n_layers; ++i) {
    mk.hidden_locked.push_back(
        nn::dropout_mask<T>(nn::DropoutKind::locked, d.hidden, {batch, h}, rng));
  }
  mk.output_locked = nn::dropout_mask<T>(nn::DropoutKind::locked, d.output, {batch, h}, rng);
  for (int i = 0; i < config.n_layers; ++i) {
    mk.weight_drop.push_back(
        nn::dropout_mask<T>(nn::DropoutKind::weight_drop, d.weight_drop, {h, 4 * h}, rng));
  }
  mk.active = !d.all_zero();
  return mk;
}

namespace {

template <class T>
TensorT<T> slice_step(const TensorT<T>& bld, std::size_t t) {
  const std::size_t batch = bld.dim(0), len = bld.dim(1), dim = bld.dim(2);
  TensorT<T> out({batch, dim});
  for (std::size_t b = 0; b < batch; ++b) {
    const T* src = bld.values.data() + (b * len + t) * dim;
    std::copy(src, src + dim, out.values.data() + b * dim);
  }
  return out;
}

}  // namespace

template <class T>
TensorT<T> encoder_forward(const LMConfig& config, const TensorT<T>& emb,
                           const std::vector<nn::LstmParamsT<T>>& lstm,
                           const IntMatrix& input, LmStateT<T>& state,
                           const LmDropoutMasksT<T>* masks, EncoderCaches<T>* cc) {
  const std::size_t batch = input.rows, len = input.cols;
  const std::size_t h = config.hidden_dim;
  if (batch == 0 || len == 0) throw ShapeError("encoder_forward: empty input block");
  if (state.h.size() != static_cast<std::size_t>(config.n_layers) ||
      state.h[0].dim(0) != batch) {
    throw ShapeError("encoder_forward: state does not match model/batch");
  }

  if (cc) {
    cc->h0 = state.h;
    cc->c0 = state.c;
    cc->x.assign(config.n_layers, {});
    cc->h.assign(config.n_layers, {});
    cc->c.assign(config.n_layers, {});
    cc->cell.assign(config.n_layers, {});
  }

  TensorT<T> emb_out;
  if (cc) {
    cc->emb_used = emb;
    cc->emb_used.grad.clear();
    if (masks) nn::apply_mask(cc->emb_used, masks->emb_rows);
    emb_out = nn::embedding_lookup(input, cc->emb_used);
  } else if (masks) {
    TensorT<T> table = emb;
    nn::apply_mask(table, masks->emb_rows);
    emb_out = nn::embedding_lookup(input, table);
  } else {
    emb_out = nn::embedding_lookup(input, emb);
  }

  std::vector<TensorT<T>> below;
  for (int l = 0; l < config.n_layers; ++l) {
    const TensorT<T>* wh_mask = masks ? &masks->weight_drop[l] : nullptr;
    TensorT<T> h_prev = state.h[l];
    TensorT<T> c_prev = state.c[l];
    std::vector<TensorT<T>> outs(len);
    for (std::size_t t = 0; t < len; ++t) {
      TensorT<T> x_t = l == 0 ? slice_step(emb_out, t) : std::move(below[t]);
      if (masks) {
        nn::apply_mask(x_t, l == 0 ? masks->input_locked : masks->hidden_locked[l - 1]);
      }
      TensorT<T> h_out, c_out;
      nn::LstmCellCache<T> cell;
      nn::lstm_cell(x_t, h_prev, c_prev, lstm[l], wh_mask, h_out, c_out,
                    cc ? &cell : nullptr);
      if (cc) {
        cc->x[l].push_back(std::move(x_t));
        cc->h[l].push_back(h_out);
        cc->c[l].push_back(c_out);
        cc->cell[l].push_back(std::move(cell));
      }
      outs[t] = h_out;
      h_prev = std::move(h_out);
      c_prev = std::move(c_out);
    }
    state.h[l] = std::move(h_prev);
    state.c[l] = std::move(c_prev);
    below = std::move(outs);
  }

  TensorT<T> flat({batch * len, h});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < len; ++t) {
      T* dst = flat.values.data() + (b * len + t) * h;
      const T* src = below[t].values.data() + b * h;
      if (masks) {
        const T* mv = masks->output_locked.values.data() + b * h;
        for (std::size_t j = 0; j < h; ++j) dst[j] = src[j] * mv[j];
      } else {
        std::copy(src, src + h, dst);
      }
    }
  }
  if (cc) cc->top_flat = flat;
  return flat;
}

template <class T>
void encoder_backward(const LMConfig& config, TensorT<T>& emb,
                      std::vector<nn::LstmParamsT<T>>& lstm, const IntMatrix& input,
                      const LmDropoutMasksT<T>* masks, EncoderCaches<T>& cc,
                      const TensorT<T>& dtop) {
  const std::size_t batch = input.rows, len = input.cols;
  const std::size_t h = config.hidden_dim;
  const std::size_t e = config.emb_dim;
  if (dtop.rank() != 2 || dtop.dim(0) != batch * len || dtop.dim(1) != h) {
    throw ShapeError("encoder_backward: bad upstream gradient shape " + dtop.shape_str());
  }

  // Per-step gradient flowing into the current layer's h outputs from above.
  std::vector<TensorT<T>> dh_above(len);
  for (std::size_t t = 0; t < len; ++t) {
    TensorT<T> g({batch, h});
    for (std::size_t b = 0; b < batch; ++b) {
      const T* src = dtop.values.data() + (b * len + t) * h;
      const T* mv = masks ? masks->output_locked.values.data() + b * h : nullptr;
      T* dst = g.values.data() + b * h;
      for (std::size_t j = 0; j < h; ++j) dst[j] = mv ? src[j] * mv[j] : src[j];
    }
    dh_above[t] = std::move(g);
  }

  for (int l = config.n_layers - 1; l >= 0; --l) {
    const TensorT<T>* wh_mask = masks ? &masks->weight_drop[l] : nullptr;
    for (int t = static_cast<int>(len) - 1; t >= 0; --t) {
      TensorT<T> hg = dh_above[t];
      if (cc.h[l][t].has_grad()) {
        for (std::size_t i = 0; i < hg.numel(); ++i) hg.values[i] += cc.h[l][t].grad[i];
      }
      TensorT<T> cg({batch, h});
      if (cc.c[l][t].has_grad()) cg.values = cc.c[l][t].grad;
      TensorT<T>& h_prev = t == 0 ? cc.h0[l] : cc.h[l][t - 1];
      TensorT<T>& c_prev = t == 0 ? cc.c0[l] : cc.c[l][t - 1];
      nn::lstm_cell_backward(cc.x[l][t], h_prev, c_prev, lstm[l], wh_mask,
                             cc.cell[l][t], hg, cg);
    }
    if (l > 0) {
      for (std::size_t t = 0; t < len; ++t) {
        TensorT<T>& xg = cc.x[l][t];
        TensorT<T> g({batch, h});
        for (std::size_t i = 0; i < g.numel(); ++i) {
          g.values[i] = xg.grad[i];
          if (masks) g.values[i] *= masks->hidden_locked[l - 1].values[i];
        }
        dh_above[t] = std::move(g);
      }
    } else {
      TensorT<T> demb({batch, len, e});
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t t = 0; t < len; ++t) {
          const T* src = cc.x[0][t].grad.data() + b * e;
          const T* mv = masks ? masks->input_locked.values.data() + b * e : nullptr;
          T* dst = demb.values.data() + (b * len + t) * e;
          for (std::size_t j = 0; j < e; ++j) dst[j] = mv ? src[j] * mv[j] : src[j];
        }
      }
      nn::embedding_backward(input, cc.emb_used, demb);
      emb.ensure_grad();
      for (std::size_t i = 0; i < emb.numel(); ++i) {
        T g = cc.emb_used.grad[i];
        if (masks) g *= masks->emb_rows.values[i];
        emb.grad[i] += g;
      }
    }
  }
}

namespace {

// Projects the encoder output to vocabulary logits, [B*L, V].
template <class T>
TensorT<T> decoder_forward(const LanguageModelT<T>& model, const TensorT<T>& top) {
  const LMConfig& cfg = model.config;
  const std::size_t rows = top.dim(0);
  const std::size_t v = cfg.vocab_size, e = cfg.emb_dim;
  if (cfg.tie_weights) {
    TensorT<T> logits({rows, v});
    nn::as_matrix(logits, rows, v).noalias() =
        nn::as_matrix(top, rows, e) * nn::as_matrix(model.emb, v, e).transpose();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < v; ++c) logits.at(r, c) += model.decoder_b.at(c);
    }
    return logits;
  }
  return nn::affine(top, model.decoder_w, model.decoder_b);
}

// Consumes logits.grad, returns the gradient wrt the encoder output.
template <class T>
TensorT<T> decoder_backward(LanguageModelT<T>& model, const TensorT<T>& top,
                            const TensorT<T>& logits) {
  const LMConfig& cfg = model.config;
  const std::size_t rows = top.dim(0);
  const std::size_t v = cfg.vocab_size, e = cfg.emb_dim, h = cfg.hidden_dim;

  nn::ConstMatMap<T> dlog(logits.grad.data(), rows, v);
  TensorT<T> dtop({rows, h});
  if (cfg.tie_weights) {
    nn::as_matrix(dtop, rows, h).noalias() = dlog * nn::as_matrix(model.emb, v, e);
    model.emb.ensure_grad();
    nn::MatMap<T>(model.emb.grad.data(), v, e).noalias() +=
        dlog.transpose() * nn::as_matrix(top, rows, e);
  } else {
    nn::as_matrix(dtop, rows, h).noalias() =
        dlog * nn::as_matrix(model.decoder_w, h, v).transpose();
    model.decoder_w.ensure_grad();
    nn::MatMap<T>(model.decoder_w.grad.data(), h, v).noalias() +=
        nn::as_matrix(top, rows, h).transpose() * dlog;
  }
  model.decoder_b.ensure_grad();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < v; ++c) {
      model.decoder_b.grad[c] += logits.grad[r * v + c];
    }
  }
  return dtop;
}

}  // namespace

template <class T>
TensorT<T> lm_forward(const LanguageModelT<T>& model, const IntMatrix& input,
                      LmStateT<T>& state, const LmDropoutMasksT<T>* masks) {
  TensorT<T> top = encoder_forward(model.config, model.emb, model.lstm, input, state,
                                   masks, static_cast<EncoderCaches<T>*>(nullptr));
  TensorT<T> logits = decoder_forward(model, top);
  logits.shape = {input.rows, input.cols,
                  static_cast<std::size_t>(model.config.vocab_size)};
  return logits;
}

template <class T>
double lm_block_loss(LanguageModelT<T>& model, const IntMatrix& input,
                     const IntMatrix& target, LmStateT<T>& state,
                     const LmDropoutMasksT<T>* masks) {
  if (target.rows != input.rows || target.cols != input.cols) {
    throw ShapeError("lm_block_loss: target block shape differs from input");
  }
  EncoderCaches<T> cc;
  TensorT<T> top = encoder_forward(model.config, model.emb, model.lstm, input, state,
                                   masks, &cc);
  TensorT<T> logits = decoder_forward(model, top);
  std::vector<int> targets(target.numel());
  for (std::size_t b = 0; b < target.rows; ++b) {
    for (std::size_t t = 0; t < target.cols; ++t) {
      targets[b * target.cols + t] = target.at(b, t);
    }
  }
  auto sm = nn::softmax_cross_entropy(logits, targets);
  nn::softmax_cross_entropy_backward(logits, targets, sm);
  TensorT<T> dtop = decoder_backward(model, cc.top_flat, logits);
  encoder_backward(model.config, model.emb, model.lstm, input, masks, cc, dtop);
  return sm.loss;
}

template <class T>
double perplexity_t(const LanguageModelT<T>& model, const std::vector<int>& stream,
                    int bptt_len) {
  if (bptt_len < 1) throw ConfigError("bptt_len must be positive");
  if (stream.size() < 2) throw DataError("perplexity needs at least two tokens");
  LmStateT<T> state = initial_state(model, 1);
  const std::size_t n = stream.size();
  double total = 0.0;
  std::size_t pos = 0;
  while (pos + 1 < n) {
    const std::size_t len = std::min<std::size_t>(bptt_len, n - 1 - pos);
    IntMatrix input(1, len);
    std::vector<int> targets(len);
    for (std::size_t i = 0; i < len; ++i) {
      input.at(0, i) = stream[pos + i];
      targets[i] = stream[pos + 1 + i];
    }
    TensorT<T> top =
        encoder_forward(model.config, model.emb, model.lstm, input, state,
                        static_cast<const LmDropoutMasksT<T>*>(nullptr),
                        static_cast<EncoderCaches<T>*>(nullptr));
    TensorT<T> logits = decoder_forward(model, top);
    total += nn::softmax_cross_entropy(logits, targets).loss * static_cast<double>(len);
    pos += len;
  }
  return std::exp(total / static_cast<double>(n - 1));
}

double perplexity(const LanguageModel& model, const std::vector<int>& stream,
                  int bptt_len) {
  return perplexity_t<float>(model, stream, bptt_len);
}

template struct LanguageModelT<float>;
template struct LanguageModelT<double>;

template LmStateT<float> zero_state<float>(const LMConfig&, std::size_t);
template LmStateT<double> zero_state<double>(const LMConfig&, std::size_t);
template LanguageModelT<float> init_lm_t<float>(const LMConfig&, std::uint64_t);
template LanguageModelT<double> init_lm_t<double>(const LMConfig&, std::uint64_t);
template LmStateT<float> initial_state<float>(const LanguageModelT<float>&, std::size_t);
template LmStateT<double> initial_state<double>(const LanguageModelT<double>&, std::size_t);
template LmDropoutMasksT<float> sample_lm_masks<float>(const LMConfig&, std::size_t,
                                                       RngStream&);
template LmDropoutMasksT<double> sample_lm_masks<double>(const LMConfig&, std::size_t,
                                                         RngStream&);
template TensorT<float> encoder_forward<float>(const LMConfig&, const TensorT<float>&,
                                               const std::vector<nn::LstmParamsT<float>>&,
                                               const IntMatrix&, LmStateT<float>&,
                                               const LmDropoutMasksT<float>*,
                                               EncoderCaches<float>*);
template TensorT<double> encoder_forward<double>(
    const LMConfig&, const TensorT<double>&, const std::vector<nn::LstmParamsT<double>>&,
    const IntMatrix&, LmStateT<double>&, const LmDropoutMasksT<double>*,
    EncoderCaches<double>*);
template void encoder_backward<float>(const LMConfig&, TensorT<float>&,
                                      std::vector<nn::LstmParamsT<float>>&,
                                      const IntMatrix&, const LmDropoutMasksT<float>*,
                                      EncoderCaches<float>&, const TensorT<float>&);
template void encoder_backward<double>(const LMConfig&, TensorT<double>&,
                                       std::vector<nn::LstmParamsT<double>>&,
                                       const IntMatrix&, const LmDropoutMasksT<double>*,
                                       EncoderCaches<double>&, const TensorT<double>&);
template TensorT<float> lm_forward<float>(const LanguageModelT<float>&, const IntMatrix&,
                                          LmStateT<float>&, const LmDropoutMasksT<float>*);
template TensorT<double> lm_forward<double>(const LanguageModelT<double>&,
                                            const IntMatrix&, LmStateT<double>&,
                                            const LmDropoutMasksT<double>*);
template double lm_block_loss<float>(LanguageModelT<float>&, const IntMatrix&,
                                     const IntMatrix&, LmStateT<float>&,
                                     const LmDropoutMasksT<float>*);
template double lm_block_loss<double>(LanguageModelT<double>&, const IntMatrix&,
                                      const IntMatrix&, LmStateT<double>&,
                                      const LmDropoutMasksT<double>*);
template double perplexity_t<float>(const LanguageModelT<float>&, const std::vector<int>&,
                                    int);
template double perplexity_t<double>(const LanguageModelT<double>&,
                                     const std::vector<int>&, int);

}  // namespace floodtext
