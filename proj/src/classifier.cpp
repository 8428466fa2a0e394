#include "floodtext/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "floodtext/adam.hpp"
#include "floodtext/encoder.hpp"
#include "floodtext/error.hpp"

namespace floodtext {

namespace {

int class_of(Label label) { return label == Label::related ? 0 : 1; }

}  // namespace

template <class T>
std::vector<std::pair<std::string, TensorT<T>*>> ClassifierModelT<T>::named_params() {
  std::vector<std::pair<std::string, TensorT<T>*>> out;
  out.emplace_back("encoder.emb.weight", &emb);
  for (std::size_t i = 0; i < lstm.size(); ++i) {
    const std::string base = "encoder.lstm" + std::to_string(i) + ".";
    out.emplace_back(base + "w_x", &lstm[i].w_x);
    out.emplace_back(base + "w_h", &lstm[i].w_h);
    out.emplace_back(base + "bias", &lstm[i].bias);
  }
  out.emplace_back("head.hidden.weight", &w1);
  out.emplace_back("head.hidden.bias", &b1);
  out.emplace_back("head.out.weight", &w2);
  out.emplace_back("head.out.bias", &b2);
  return out;
}

template <class T>
void ClassifierModelT<T>::zero_grads() {
  for (auto& [name, tensor] : named_params()) tensor->zero_grad();
}

LayerGroups classifier_layer_groups(const LMConfig& config) {
  LayerGroups g = lm_layer_groups(config);
  g.groups.back() = {"head.hidden.weight", "head.hidden.bias", "head.out.weight",
                     "head.out.bias"};
  return g;
}

ClassifierModel build_classifier(const Checkpoint& encoder, int head_hidden,
                                 std::uint64_t seed, double dropout_multiplier) {
  if (encoder.stage == Stage::classifier) {
    throw ConfigError("build_classifier needs a pretrained or lm_finetuned checkpoint");
  }
  if (head_hidden < 1) throw ConfigError("head_hidden must be positive");

  LanguageModel lm = model_from_checkpoint(encoder);

  ClassifierModel m;
  m.config = lm.config;
  m.config.dropouts = DropoutProfile{}.scaled(dropout_multiplier);
  m.head_hidden = head_hidden;
  m.head_dropout = 0.4 * dropout_multiplier;
  m.vocab = encoder.vocab;
  m.emb = std::move(lm.emb);
  m.lstm = std::move(lm.lstm);

  const std::size_t h = m.config.hidden_dim;
  const std::size_t feat_dim = 3 * h;
  const std::size_t hh = head_hidden;
  m.w1 = Tensor({feat_dim, hh});
  m.b1 = Tensor({hh});
  m.w2 = Tensor({hh, 2});
  m.b2 = Tensor({2});
  RngStream rng(seed, rng_stream::kHeadInit);
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(feat_dim));
  for (auto& w : m.w1.values) w = static_cast<float>(rng.uniform(-bound1, bound1));
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(hh));
  for (auto& w : m.w2.values) w = static_cast<float>(rng.uniform(-bound2, bound2));
  return m;
}

Checkpoint checkpoint_from_classifier(const ClassifierModel& model,
                                      std::vector<TrainLogEntry> log) {
  Checkpoint c;
  c.stage = Stage::classifier;
  c.config = model.config;
  c.head_hidden = model.head_hidden;
  c.head_dropout = model.head_dropout;
  c.vocab = model.vocab;
  c.log = std::move(log);
  ClassifierModel& m = const_cast<ClassifierModel&>(model);
  for (const auto& [name, tensor] : m.named_params()) {
    Tensor copy = *tensor;
    copy.grad.clear();
    c.tensors.emplace_back(name, std::move(copy));
  }
  return c;
}

ClassifierModel classifier_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.stage != Stage::classifier) {
    throw ConfigError("checkpoint stage is " + stage_name(ckpt.stage) +
                      ", expected classifier");
  }
  ckpt.config.validate();
  ClassifierModel m;
  m.config = ckpt.config;
  m.head_hidden = ckpt.head_hidden;
  m.head_dropout = ckpt.head_dropout;
  m.vocab = ckpt.vocab;
  m.lstm.resize(ckpt.config.n_layers);
  for (auto& [name, tensor] : m.named_params()) {
    const Tensor* stored = ckpt.find(name);
    if (!stored) throw ConfigError("checkpoint lacks required tensor '" + name + "'");
    *tensor = *stored;
  }
  const std::size_t h = m.config.hidden_dim;
  if (m.w1.shape != std::vector<std::size_t>{3 * h, static_cast<std::size_t>(m.head_hidden)}) {
    throw ConfigError("checkpoint head shapes do not match config");
  }
  return m;
}

namespace {

struct PaddedBatch {
  IntMatrix ids;
  std::vector<int> lengths;
  std::vector<int> classes;  // -1 when unlabeled
};

PaddedBatch pad_batch(const std::vector<std::vector<int>>& seqs,
                      const std::vector<int>& classes) {
  std::size_t max_len = 0;
  for (const auto& s : seqs) max_len = std::max(max_len, s.size());
  PaddedBatch b;
  b.ids = IntMatrix(seqs.size(), max_len);
  b.classes = classes;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const std::size_t len = seqs[i].size();
    const std::size_t pad = max_len - len;
    b.lengths.push_back(static_cast<int>(len));
    for (std::size_t t = 0; t < max_len; ++t) {
      b.ids.at(i, t) =
          t < pad ? Vocabulary::kPad : seqs[i][t - pad];
    }
  }
  return b;
}

template <class T>
struct ClfCaches {
  EncoderCaches<T> enc;
  TensorT<T> feat;  // [B, 3H]
  TensorT<T> z1;    // [B, Hh], pre-ReLU
  TensorT<T> a1;    // [B, Hh], post-ReLU and post head mask
  std::vector<std::size_t> argmax;  // B*H flat, winning time step per channel
};

// Concat pooling over the top-layer sequence: [last | max | mean], pads
// (always on the left) excluded from max and mean.
template <class T>
TensorT<T> concat_pool(const TensorT<T>& top, const PaddedBatch& batch,
                       std::vector<std::size_t>* argmax) {
  const std::size_t batch_n = batch.ids.rows, len = batch.ids.cols;
  const std::size_t h = top.dim(1);
  TensorT<T> feat({batch_n, 3 * h});
  if (argmax) argmax->assign(batch_n * h, 0);
  for (std::size_t b = 0; b < batch_n; ++b) {
    const std::size_t true_len = batch.lengths[b];
    const std::size_t first = len - true_len;
    for (std::size_t j = 0; j < h; ++j) {
      const T last = top.at((b * len + len - 1), j);
      T mx = top.at(b * len + first, j);
      std::size_t mx_t = first;
      T sum{0};
      for (std::size_t t = first; t < len; ++t) {
        const T v = top.at(b * len + t, j);
        sum += v;
        if (v > mx) {
          mx = v;
          mx_t = t;
        }
      }
      feat.at(b, j) = last;
      feat.at(b, h + j) = mx;
      feat.at(b, 2 * h + j) = sum / static_cast<T>(true_len);
      if (argmax) (*argmax)[b * h + j] = mx_t;
    }
  }
  return feat;
}

template <class T>
TensorT<T> clf_forward(const ClassifierModelT<T>& model, const PaddedBatch& batch,
                       const LmDropoutMasksT<T>* enc_masks,
                       const TensorT<T>* head_mask, ClfCaches<T>* cc) {
  LmStateT<T> state = zero_state<T>(model.config, batch.ids.rows);
  TensorT<T> top = encoder_forward(model.config, model.emb, model.lstm, batch.ids,
                                   state, enc_masks, cc ? &cc->enc : nullptr);
  TensorT<T> feat = concat_pool(top, batch, cc ? &cc->argmax : nullptr);
  TensorT<T> z1 = nn::affine(feat, model.w1, model.b1);
  TensorT<T> a1 = z1;
  for (auto& v : a1.values) v = std::max(v, T{0});
  if (head_mask) nn::apply_mask(a1, *head_mask);
  TensorT<T> logits = nn::affine(a1, model.w2, model.b2);
  if (cc) {
    cc->feat = std::move(feat);
    cc->z1 = std::move(z1);
    cc->a1 = std::move(a1);
  }
  return logits;
}

// Consumes logits.grad.
template <class T>
void clf_backward(ClassifierModelT<T>& model, const PaddedBatch& batch,
                  const LmDropoutMasksT<T>* enc_masks, const TensorT<T>* head_mask,
                  ClfCaches<T>& cc, const TensorT<T>& logits) {
  const std::size_t batch_n = batch.ids.rows, len = batch.ids.cols;
  const std::size_t h = model.config.hidden_dim;
  const std::size_t hh = model.head_hidden;

  TensorT<T> dlogits({batch_n, 2}, logits.grad);
  nn::affine_backward(cc.a1, model.w2, model.b2, dlogits);

  TensorT<T> dz1({batch_n, hh});
  for (std::size_t i = 0; i < dz1.numel(); ++i) {
    T g = cc.a1.grad[i];
    if (head_mask) g *= head_mask->values[i];
    dz1.values[i] = cc.z1.values[i] > T{0} ? g : T{0};
  }
  nn::affine_backward(cc.feat, model.w1, model.b1, dz1);

  TensorT<T> dtop({batch_n * len, h});
  for (std::size_t b = 0; b < batch_n; ++b) {
    const std::size_t true_len = batch.lengths[b];
    const std::size_t first = len - true_len;
    for (std::size_t j = 0; j < h; ++j) {
      dtop.at(b * len + len - 1, j) += cc.feat.grad[b * 3 * h + j];
      dtop.at(b * len + cc.argmax[b * h + j], j) += cc.feat.grad[b * 3 * h + h + j];
      const T mean_g = cc.feat.grad[b * 3 * h + 2 * h + j] / static_cast<T>(true_len);
      for (std::size_t t = first; t < len; ++t) dtop.at(b * len + t, j) += mean_g;
    }
  }
  encoder_backward(model.config, model.emb, model.lstm, batch.ids, enc_masks, cc.enc,
                   dtop);
}

std::vector<std::vector<int>> numericalize_all(const std::vector<CleanTweet>& tweets,
                                               const Vocabulary& vocab) {
  std::vector<std::vector<int>> seqs;
  seqs.reserve(tweets.size());
  for (const auto& t : tweets) seqs.push_back(numericalize(t, vocab, true));
  return seqs;
}

// P(class 0) per row from a [B,2] logit block.
template <class T>
std::vector<double> softmax_scores(const TensorT<T>& logits) {
  std::vector<double> scores(logits.dim(0));
  for (std::size_t r = 0; r < logits.dim(0); ++r) {
    const double a = logits.at(r, 0), b = logits.at(r, 1);
    const double m = std::max(a, b);
    const double ea = std::exp(a - m), eb = std::exp(b - m);
    scores[r] = ea / (ea + eb);
  }
  return scores;
}

std::vector<double> eval_scores(const ClassifierModel& model,
                                const std::vector<std::vector<int>>& seqs) {
  std::vector<double> scores;
  scores.reserve(seqs.size());
  const std::size_t chunk = 64;
  for (std::size_t start = 0; start < seqs.size(); start += chunk) {
    const std::size_t n = std::min(chunk, seqs.size() - start);
    std::vector<std::vector<int>> part(seqs.begin() + start, seqs.begin() + start + n);
    PaddedBatch batch = pad_batch(part, std::vector<int>(n, -1));
    Tensor logits = clf_forward<float>(model, batch, nullptr, nullptr, nullptr);
    for (double s : softmax_scores(logits)) scores.push_back(s);
  }
  return scores;
}

}  // namespace

Prediction predict(const ClassifierModel& model, const std::string& text) {
  const std::vector<std::string> tokens =
      tokenize(clean_text(text, CleanProfile::model));
  Prediction p;
  p.empty_input = tokens.empty();
  std::vector<int> ids = numericalize(tokens, model.vocab, true);
  PaddedBatch batch = pad_batch({ids}, {-1});
  Tensor logits = clf_forward<float>(model, batch, nullptr, nullptr, nullptr);
  p.related = softmax_scores(logits)[0];
  p.unrelated = 1.0 - p.related;
  return p;
}

std::vector<double> predict_scores(const ClassifierModel& model,
                                   const std::vector<CleanTweet>& tweets) {
  return eval_scores(model, numericalize_all(tweets, model.vocab));
}

std::vector<Label> predict_labels(const ClassifierModel& model,
                                  const std::vector<CleanTweet>& tweets) {
  std::vector<Label> labels;
  for (double s : predict_scores(model, tweets)) {
    labels.push_back(s >= 0.5 ? Label::related : Label::unrelated);
  }
  return labels;
}

double classifier_loss(const ClassifierModel& model,
                       const std::vector<CleanTweet>& tweets) {
  if (tweets.empty()) throw DataError("classifier_loss: empty set");
  const std::vector<double> scores = predict_scores(model, tweets);
  double total = 0.0;
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    if (!tweets[i].label) {
      throw LabelError("unlabeled record '" + tweets[i].id + "' in loss set");
    }
    const double p =
        *tweets[i].label == Label::related ? scores[i] : 1.0 - scores[i];
    total -= std::log(std::max(p, 1e-12));
  }
  return total / static_cast<double>(tweets.size());
}

void train_classifier(ClassifierModel& model, const std::vector<CleanTweet>& train,
                      const FineTunePlan& plan, StepLog* step_log,
                      std::vector<TrainLogEntry>* epoch_log) {
  plan.validate();
  if (plan.stage != PlanStage::classifier) {
    throw ConfigError("train_classifier requires a plan with stage classifier");
  }
  if (train.empty()) throw DataError("train_classifier: empty training set");
  std::vector<int> classes;
  for (const auto& t : train) {
    if (!t.label) {
      throw LabelError("unlabeled record '" + t.id + "' in classifier training set");
    }
    classes.push_back(class_of(*t.label));
  }
  const std::vector<std::vector<int>> seqs = numericalize_all(train, model.vocab);

  const std::size_t batch_size = plan.batch_size;
  const std::size_t n = seqs.size();
  const std::size_t steps_per_epoch = (n + batch_size - 1) / batch_size;

  StlrConfig schedule = plan.stlr;
  if (schedule.total_steps == 0) {
    schedule.total_steps =
        static_cast<long long>(plan.epochs) * static_cast<long long>(steps_per_epoch);
  }
  if (plan.epochs > 0) schedule.validate();

  auto named = model.named_params();
  std::vector<Tensor*> param_ptrs;
  std::vector<std::string> names;
  for (auto& [name, t] : named) {
    param_ptrs.push_back(t);
    names.push_back(name);
  }
  const LayerGroups groups = classifier_layer_groups(model.config);
  groups.check_partition(names);
  const int n_groups = groups.size();

  nn::AdamState adam;
  RngStream order_rng(plan.seed, rng_stream::kBatchOrder);
  RngStream dropout_rng(plan.seed, rng_stream::kDropout);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  long long step = 0;

  for (int epoch = 1; epoch <= plan.epochs; ++epoch) {
    const int unfrozen = unfrozen_group_count(plan, n_groups, epoch);
    order_rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t count = std::min(batch_size, n - start);
      std::vector<std::vector<int>> part;
      std::vector<int> part_classes;
      for (std::size_t i = 0; i < count; ++i) {
        part.push_back(seqs[order[start + i]]);
        part_classes.push_back(classes[order[start + i]]);
      }
      PaddedBatch batch = pad_batch(part, part_classes);

      model.zero_grads();
      const auto enc_masks = sample_lm_masks<float>(model.config, count, dropout_rng);
      const Tensor head_mask = nn::dropout_mask<float>(
          nn::DropoutKind::standard, model.head_dropout,
          {count, static_cast<std::size_t>(model.head_hidden)}, dropout_rng);
      ClfCaches<float> cc;
      Tensor logits = clf_forward(model, batch, &enc_masks, &head_mask, &cc);
      auto sm = nn::softmax_cross_entropy(logits, batch.classes);
      nn::softmax_cross_entropy_backward(logits, batch.classes, sm);
      clf_backward(model, batch, &enc_masks, &head_mask, cc, logits);
      loss_sum += sm.loss;

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
        for (int k = 0; k < unfrozen; ++k) {
          step_log->push_back({step, k, lrs[k], sm.loss});
        }
      }
      ++step;
    }
    if (epoch_log) {
      std::vector<double> scores = eval_scores(model, seqs);
      long long correct = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const int pred = scores[i] >= 0.5 ? 0 : 1;
        if (pred == classes[i]) ++correct;
      }
      TrainLogEntry entry;
      entry.epoch = epoch;
      entry.train_loss = loss_sum / static_cast<double>(steps_per_epoch);
      entry.valid_score = static_cast<double>(correct) / static_cast<double>(n);
      epoch_log->push_back(entry);
    }
  }
}

std::vector<std::pair<double, double>> lr_range_test(const ClassifierModel& model,
                                                     const std::vector<CleanTweet>& data,
                                                     double lr_min, double lr_max,
                                                     int n_points, int batch_size,
                                                     std::uint64_t seed) {
  if (!(lr_min > 0.0) || !(lr_min < lr_max)) {
    throw ConfigError("lr_range_test requires 0 < lr_min < lr_max");
  }
  if (n_points < 2) throw ConfigError("lr_range_test needs at least two points");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (data.empty()) throw DataError("lr_range_test: empty data");

  std::vector<int> classes;
  for (const auto& t : data) {
    if (!t.label) {
      throw LabelError("unlabeled record '" + t.id + "' in lr_range_test data");
    }
    classes.push_back(class_of(*t.label));
  }
  const auto seqs = numericalize_all(data, model.vocab);

  ClassifierModel probe = model;
  auto named = probe.named_params();
  nn::AdamState adam;
  RngStream dropout_rng(seed, rng_stream::kDropout);

  std::vector<std::pair<double, double>> out;
  const double ratio = lr_max / lr_min;
  const double beta = 0.98;
  double smoothed = 0.0;
  std::size_t cursor = 0;
  for (int i = 0; i < n_points; ++i) {
    const double lr =
        lr_min * std::pow(ratio, static_cast<double>(i) / static_cast<double>(n_points - 1));
    std::vector<std::vector<int>> part;
    std::vector<int> part_classes;
    for (int k = 0; k < batch_size; ++k) {
      part.push_back(seqs[cursor]);
      part_classes.push_back(classes[cursor]);
      cursor = (cursor + 1) % seqs.size();
    }
    PaddedBatch batch = pad_batch(part, part_classes);
    probe.zero_grads();
    const auto enc_masks =
        sample_lm_masks<float>(probe.config, batch.ids.rows, dropout_rng);
    const Tensor head_mask = nn::dropout_mask<float>(
        nn::DropoutKind::standard, probe.head_dropout,
        {batch.ids.rows, static_cast<std::size_t>(probe.head_hidden)}, dropout_rng);
    ClfCaches<float> cc;
    Tensor logits = clf_forward(probe, batch, &enc_masks, &head_mask, &cc);
    double loss;
    try {
      auto sm = nn::softmax_cross_entropy(logits, batch.classes);
      nn::softmax_cross_entropy_backward(logits, batch.classes, sm);
      clf_backward(probe, batch, &enc_masks, &head_mask, cc, logits);
      loss = sm.loss;
      for (auto& [name, t] : named) adam.step(name, *t, lr);
    } catch (const NumericsError&) {
      // Diverged; record a spike above the running level and keep sweeping.
      const double level =
          i == 0 ? 10.0 : smoothed / (1.0 - std::pow(beta, static_cast<double>(i)));
      loss = level * 4.0 + 1.0;
    }
    smoothed = beta * smoothed + (1.0 - beta) * loss;
    const double corrected = smoothed / (1.0 - std::pow(beta, static_cast<double>(i + 1)));
    out.emplace_back(lr, corrected);
  }
  return out;
}

template struct ClassifierModelT<float>;
template struct ClassifierModelT<double>;

}  // namespace floodtext
