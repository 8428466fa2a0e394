#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "floodtext/error.hpp"
#include "floodtext/rng.hpp"
#include "floodtext/tensor.hpp"

// Forward/backward pairs for every operation the language model and the
// classifier are composed of. Templated on the scalar so the gradient tests
// can replay everything at 64-bit; training runs the float instantiation.
namespace floodtext::nn {

template <class T>
using EigenMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MatMap = Eigen::Map<EigenMatrix<T>>;
template <class T>
using ConstMatMap = Eigen::Map<const EigenMatrix<T>>;

template <class T>
ConstMatMap<T> as_matrix(const TensorT<T>& t, std::size_t rows, std::size_t cols) {
  return ConstMatMap<T>(t.values.data(), static_cast<Eigen::Index>(rows),
                        static_cast<Eigen::Index>(cols));
}

template <class T>
MatMap<T> as_matrix(TensorT<T>& t, std::size_t rows, std::size_t cols) {
  return MatMap<T>(t.values.data(), static_cast<Eigen::Index>(rows),
                   static_cast<Eigen::Index>(cols));
}

template <class T>
MatMap<T> grad_matrix(TensorT<T>& t, std::size_t rows, std::size_t cols) {
  t.ensure_grad();
  return MatMap<T>(t.grad.data(), static_cast<Eigen::Index>(rows),
                   static_cast<Eigen::Index>(cols));
}

// ---------------------------------------------------------------- affine

// y = x W + b with x:[B,I], W:[I,O], b:[O].
template <class T>
TensorT<T> affine(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b) {
  if (x.rank() != 2 || w.rank() != 2 || b.rank() != 1 || x.dim(1) != w.dim(0) ||
      b.dim(0) != w.dim(1)) {
    throw ShapeError("affine: incompatible shapes x" + x.shape_str() + " W" +
                     w.shape_str() + " b" + b.shape_str());
  }
  const std::size_t rows = x.dim(0), inner = x.dim(1), cols = w.dim(1);
  TensorT<T> y({rows, cols});
  as_matrix(y, rows, cols).noalias() = as_matrix(x, rows, inner) * as_matrix(w, inner, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) y.at(r, c) += b.at(c);
  }
  return y;
}

// Accumulates into x.grad, w.grad, b.grad.
template <class T>
void affine_backward(TensorT<T>& x, TensorT<T>& w, TensorT<T>& b,
                     const TensorT<T>& y_grad) {
  const std::size_t rows = x.dim(0), inner = x.dim(1), cols = w.dim(1);
  if (y_grad.rank() != 2 || y_grad.dim(0) != rows || y_grad.dim(1) != cols) {
    throw ShapeError("affine_backward: bad upstream gradient shape " + y_grad.shape_str());
  }
  auto dy = as_matrix(y_grad, rows, cols);
  grad_matrix(x, rows, inner).noalias() += dy * as_matrix(w, inner, cols).transpose();
  grad_matrix(w, inner, cols).noalias() += as_matrix(x, rows, inner).transpose() * dy;
  b.ensure_grad();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) b.grad[c] += y_grad.at(r, c);
  }
}

// ------------------------------------------------------------- embedding

// ids:[B,L], E:[V,D] -> [B,L,D].
template <class T>
TensorT<T> embedding_lookup(const IntMatrix& ids, const TensorT<T>& table) {
  if (table.rank() != 2) {
    throw ShapeError("embedding_lookup: table must be [V,D]");
  }
  const std::size_t vocab = table.dim(0), dim = table.dim(1);
  TensorT<T> out({ids.rows, ids.cols, dim});
  for (std::size_t i = 0; i < ids.numel(); ++i) {
    const int id = ids.values[i];
    if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
      throw IndexError("embedding_lookup: id " + std::to_string(id) +
                       " outside table of " + std::to_string(vocab) + " rows");
    }
    const T* src = table.values.data() + static_cast<std::size_t>(id) * dim;
    T* dst = out.values.data() + i * dim;
    for (std::size_t d = 0; d < dim; ++d) dst[d] = src[d];
  }
  return out;
}

// Scatter-adds the upstream gradient into the looked-up rows of table.grad.
template <class T>
void embedding_backward(const IntMatrix& ids, TensorT<T>& table,
                        const TensorT<T>& out_grad) {
  const std::size_t dim = table.dim(1);
  if (out_grad.numel() != ids.numel() * dim) {
    throw ShapeError("embedding_backward: bad upstream gradient shape " + out_grad.shape_str());
  }
  table.ensure_grad();
  for (std::size_t i = 0; i < ids.numel(); ++i) {
    T* dst = table.grad.data() + static_cast<std::size_t>(ids.values[i]) * dim;
    const T* src = out_grad.values.data() + i * dim;
    for (std::size_t d = 0; d < dim; ++d) dst[d] += src[d];
  }
}

// ------------------------------------------------------------- LSTM cell

// Fused gate layout along the last axis: input, forget, candidate, output.
template <class T>
struct LstmParamsT {
  TensorT<T> w_x;   // [D, 4H]
  TensorT<T> w_h;   // [H, 4H]
  TensorT<T> bias;  // [4H]

  std::size_t input_dim() const { return w_x.dim(0); }
  std::size_t hidden_dim() const { return w_h.dim(0); }
};

using LstmParams = LstmParamsT<float>;

template <class T>
struct LstmCellCache {
  TensorT<T> gates;   // [B,4H], post-activation
  TensorT<T> tanh_c;  // [B,H], tanh of the new cell state
};

template <class T>
T sigmoid(T z) {
  if (z >= T{0}) {
    const T e = std::exp(-z);
    return T{1} / (T{1} + e);
  }
  const T e = std::exp(z);
  return e / (T{1} + e);
}

// One step. `wh_mask`, when given, is applied to w_h functionally (the stored
// recurrent weights are never modified); this is what weight-drop uses.
template <class T>
void lstm_cell(const TensorT<T>& x, const TensorT<T>& h_prev, const TensorT<T>& c_prev,
               const LstmParamsT<T>& p, const TensorT<T>* wh_mask, TensorT<T>& h_out,
               TensorT<T>& c_out, LstmCellCache<T>* cache) {
  const std::size_t batch = x.dim(0);
  const std::size_t in_dim = p.input_dim();
  const std::size_t hidden = p.hidden_dim();
  if (x.rank() != 2 || x.dim(1) != in_dim || h_prev.dim(0) != batch ||
      h_prev.dim(1) != hidden || !c_prev.same_shape(h_prev)) {
    throw ShapeError("lstm_cell: incompatible shapes x" + x.shape_str() + " h" +
                     h_prev.shape_str() + " c" + c_prev.shape_str());
  }
  if (wh_mask && !wh_mask->same_shape(p.w_h)) {
    throw ShapeError("lstm_cell: weight mask shape " + wh_mask->shape_str());
  }

  TensorT<T> z({batch, 4 * hidden});
  auto zm = as_matrix(z, batch, 4 * hidden);
  zm.noalias() = as_matrix(x, batch, in_dim) * as_matrix(p.w_x, in_dim, 4 * hidden);
  if (wh_mask) {
    EigenMatrix<T> masked = as_matrix(p.w_h, hidden, 4 * hidden).cwiseProduct(
        as_matrix(*wh_mask, hidden, 4 * hidden));
    zm.noalias() += as_matrix(h_prev, batch, hidden) * masked;
  } else {
    zm.noalias() += as_matrix(h_prev, batch, hidden) * as_matrix(p.w_h, hidden, 4 * hidden);
  }
  for (std::size_t r = 0; r < batch; ++r) {
    for (std::size_t c = 0; c < 4 * hidden; ++c) z.at(r, c) += p.bias.at(c);
  }

  h_out = TensorT<T>({batch, hidden});
  c_out = TensorT<T>({batch, hidden});
  TensorT<T> gates({batch, 4 * hidden});
  TensorT<T> tanh_c({batch, hidden});

  for (std::size_t r = 0; r < batch; ++r) {
    for (std::size_t j = 0; j < hidden; ++j) {
      const T zi = z.at(r, j);
      const T zf = z.at(r, hidden + j);
      const T zg = z.at(r, 2 * hidden + j);
      const T zo = z.at(r, 3 * hidden + j);
      const T gi = sigmoid(zi);
      const T gf = sigmoid(zf);
      const T gg = std::tanh(zg);
      const T go = sigmoid(zo);
      const T c_new = gf * c_prev.at(r, j) + gi * gg;
      const T tc = std::tanh(c_new);
      gates.at(r, j) = gi;
      gates.at(r, hidden + j) = gf;
      gates.at(r, 2 * hidden + j) = gg;
      gates.at(r, 3 * hidden + j) = go;
      c_out.at(r, j) = c_new;
      h_out.at(r, j) = go * tc;
      tanh_c.at(r, j) = tc;
    }
  }

  if (cache) {
    cache->gates = std::move(gates);
    cache->tanh_c = std::move(tanh_c);
  }
}

// Accumulates into x.grad, h_prev.grad, c_prev.grad and the parameter grads.
// The gradient wrt the stored w_h honors the same mask the forward used.
template <class T>
void lstm_cell_backward(TensorT<T>& x, TensorT<T>& h_prev, TensorT<T>& c_prev,
                        LstmParamsT<T>& p, const TensorT<T>* wh_mask,
                        const LstmCellCache<T>& cache, const TensorT<T>& h_grad,
                        const TensorT<T>& c_grad) {
  const std::size_t batch = x.dim(0);
  const std::size_t in_dim = p.input_dim();
  const std::size_t hidden = p.hidden_dim();

  TensorT<T> dz({batch, 4 * hidden});
  c_prev.ensure_grad();
  for (std::size_t r = 0; r < batch; ++r) {
    for (std::size_t j = 0; j < hidden; ++j) {
      const T gi = cache.gates.at(r, j);
      const T gf = cache.gates.at(r, hidden + j);
      const T gg = cache.gates.at(r, 2 * hidden + j);
      const T go = cache.gates.at(r, 3 * hidden + j);
      const T tc = cache.tanh_c.at(r, j);
      const T dh = h_grad.at(r, j);
      const T dc_total = c_grad.at(r, j) + dh * go * (T{1} - tc * tc);

      dz.at(r, j) = dc_total * gg * gi * (T{1} - gi);
      dz.at(r, hidden + j) = dc_total * c_prev.at(r, j) * gf * (T{1} - gf);
      dz.at(r, 2 * hidden + j) = dc_total * gi * (T{1} - gg * gg);
      dz.at(r, 3 * hidden + j) = dh * tc * go * (T{1} - go);
      c_prev.grad[r * hidden + j] += dc_total * gf;
    }
  }

  auto dzm = as_matrix(dz, batch, 4 * hidden);
  grad_matrix(x, batch, in_dim).noalias() +=
      dzm * as_matrix(p.w_x, in_dim, 4 * hidden).transpose();
  if (wh_mask) {
    EigenMatrix<T> masked = as_matrix(p.w_h, hidden, 4 * hidden).cwiseProduct(
        as_matrix(*wh_mask, hidden, 4 * hidden));
    grad_matrix(h_prev, batch, hidden).noalias() += dzm * masked.transpose();
    grad_matrix(p.w_h, hidden, 4 * hidden).noalias() +=
        (as_matrix(h_prev, batch, hidden).transpose() * dzm)
            .cwiseProduct(as_matrix(*wh_mask, hidden, 4 * hidden));
  } else {
    grad_matrix(h_prev, batch, hidden).noalias() +=
        dzm * as_matrix(p.w_h, hidden, 4 * hidden).transpose();
    grad_matrix(p.w_h, hidden, 4 * hidden).noalias() +=
        as_matrix(h_prev, batch, hidden).transpose() * dzm;
  }
  grad_matrix(p.w_x, in_dim, 4 * hidden).noalias() +=
      as_matrix(x, batch, in_dim).transpose() * dzm;
  p.bias.ensure_grad();
  for (std::size_t r = 0; r < batch; ++r) {
    for (std::size_t c = 0; c < 4 * hidden; ++c) p.bias.grad[c] += dz.at(r, c);
  }
}

// --------------------------------------------------- softmax cross entropy

template <class T>
struct SoftmaxLoss {
  double loss = 0.0;        // mean over rows
  TensorT<T> probs;         // [N,C]
};

// Max-subtraction stabilized; the loss is computed in log space so extreme
// logits cannot overflow.
template <class T>
SoftmaxLoss<T> softmax_cross_entropy(const TensorT<T>& logits,
                                     const std::vector<int>& targets) {
  if (logits.rank() != 2 || logits.dim(0) != targets.size()) {
    throw ShapeError("softmax_cross_entropy: logits " + logits.shape_str() + " vs " +
                     std::to_string(targets.size()) + " targets");
  }
  const std::size_t n = logits.dim(0), classes = logits.dim(1);
  SoftmaxLoss<T> out;
  out.probs = TensorT<T>({n, classes});
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const int target = targets[r];
    if (target < 0 || static_cast<std::size_t>(target) >= classes) {
      throw IndexError("softmax_cross_entropy: target " + std::to_string(target) +
                       " outside " + std::to_string(classes) + " classes");
    }
    T max_logit = logits.at(r, 0);
    for (std::size_t c = 1; c < classes; ++c) max_logit = std::max(max_logit, logits.at(r, c));
    double sum_exp = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      const T e = std::exp(logits.at(r, c) - max_logit);
      out.probs.at(r, c) = e;
      sum_exp += static_cast<double>(e);
    }
    const double inv = 1.0 / sum_exp;
    for (std::size_t c = 0; c < classes; ++c) {
      out.probs.at(r, c) = static_cast<T>(out.probs.at(r, c) * inv);
    }
    total += std::log(sum_exp) -
             static_cast<double>(logits.at(r, target) - max_logit);
  }
  out.loss = total / static_cast<double>(n);
  if (!std::isfinite(out.loss)) {
    throw NumericsError("softmax_cross_entropy produced a non-finite loss");
  }
  return out;
}

// d(mean loss)/d(logits) = (probs - onehot)/N, scaled by `upstream`.
template <class T>
void softmax_cross_entropy_backward(TensorT<T>& logits, const std::vector<int>& targets,
                                    const SoftmaxLoss<T>& fwd, double upstream = 1.0) {
  const std::size_t n = logits.dim(0), classes = logits.dim(1);
  logits.ensure_grad();
  const T scale = static_cast<T>(upstream / static_cast<double>(n));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < classes; ++c) {
      T g = fwd.probs.at(r, c);
      if (static_cast<std::size_t>(targets[r]) == c) g -= T{1};
      logits.grad[r * classes + c] += g * scale;
    }
  }
}

// ---------------------------------------------------------------- dropout

enum class DropoutKind { standard, locked, embedding_row, weight_drop };

// Bernoulli keep-mask scaled by 1/(1-p). `embedding_row` draws one keep
// decision per row of a [V,D] shape. `locked` and `weight_drop` masks are
// structurally plain masks; their once-per-sequence / once-per-forward reuse
// is the caller's contract.
template <class T>
TensorT<T> dropout_mask(DropoutKind kind, double p,
                        const std::vector<std::size_t>& shape, RngStream& rng) {
  if (p < 0.0 || p >= 1.0) {
    throw ConfigError("dropout probability must lie in [0,1)");
  }
  TensorT<T> mask(shape);
  if (p == 0.0) {
    mask.values.assign(mask.numel(), T{1});
    return mask;
  }
  const T keep_value = static_cast<T>(1.0 / (1.0 - p));
  if (kind == DropoutKind::embedding_row) {
    if (mask.rank() != 2) {
      throw ShapeError("embedding_row dropout mask must be [V,D]");
    }
    const std::size_t rows = mask.dim(0), cols = mask.dim(1);
    for (std::size_t r = 0; r < rows; ++r) {
      const T v = rng.uniform() >= p ? keep_value : T{0};
      for (std::size_t c = 0; c < cols; ++c) mask.at(r, c) = v;
    }
  } else {
    for (std::size_t i = 0; i < mask.numel(); ++i) {
      mask.values[i] = rng.uniform() >= p ? keep_value : T{0};
    }
  }
  return mask;
}

template <class T>
void apply_mask(TensorT<T>& t, const TensorT<T>& mask) {
  if (!t.same_shape(mask)) {
    throw ShapeError("apply_mask: " + t.shape_str() + " vs " + mask.shape_str());
  }
  for (std::size_t i = 0; i < t.numel(); ++i) t.values[i] *= mask.values[i];
}

}  // namespace floodtext::nn
