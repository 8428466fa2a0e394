#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "floodtext/checkpoint.hpp"
#include "floodtext/corpus.hpp"
#include "floodtext/lm.hpp"
#include "floodtext/transfer.hpp"
#include "floodtext/vocab.hpp"

namespace floodtext {

// Encoder (LM minus decoder) plus a two-class head over the concat-pooled
// top-layer states: [last h | max pool | mean pool] -> Linear -> ReLU ->
// dropout -> Linear(2). Class index 0 is Related.
template <class T>
struct ClassifierModelT {
  LMConfig config;  // encoder dims; dropouts hold the classifier-time profile
  int head_hidden = 50;
  double head_dropout = 0.0;
  Vocabulary vocab;

  TensorT<T> emb;
  std::vector<nn::LstmParamsT<T>> lstm;
  TensorT<T> w1, b1;  // [3H, head_hidden], [head_hidden]
  TensorT<T> w2, b2;  // [head_hidden, 2], [2]

  std::vector<std::pair<std::string, TensorT<T>*>> named_params();
  void zero_grads();
};

using ClassifierModel = ClassifierModelT<float>;

// Copies the encoder out of a pretrained or lm_finetuned checkpoint and
// initializes a fresh head. `dropout_multiplier` rescales the base dropout
// profile for classifier-time training (encoder sites and the head).
ClassifierModel build_classifier(const Checkpoint& encoder, int head_hidden,
                                 std::uint64_t seed, double dropout_multiplier = 1.0);

// Encoder groups as in the LM plus the head group.
LayerGroups classifier_layer_groups(const LMConfig& config);

Checkpoint checkpoint_from_classifier(const ClassifierModel& model,
                                      std::vector<TrainLogEntry> log = {});
ClassifierModel classifier_from_checkpoint(const Checkpoint& ckpt);

struct Prediction {
  double related = 0.0;
  double unrelated = 0.0;
  bool empty_input = false;
};

// Cleans with the `model` profile, numericalizes, classifies. Dropout off.
Prediction predict(const ClassifierModel& model, const std::string& text);

// P(Related) per tweet, dropout off.
std::vector<double> predict_scores(const ClassifierModel& model,
                                   const std::vector<CleanTweet>& tweets);

// Mean cross-entropy on a labeled set, dropout off.
double classifier_loss(const ClassifierModel& model,
                       const std::vector<CleanTweet>& tweets);
std::vector<Label> predict_labels(const ClassifierModel& model,
                                  const std::vector<CleanTweet>& tweets);

// Gradual-unfreezing classifier fine-tuning with STLR + discriminative LRs.
// All records must be labeled. Epoch entries report mean train loss and
// train accuracy.
void train_classifier(ClassifierModel& model, const std::vector<CleanTweet>& train,
                      const FineTunePlan& plan, StepLog* step_log = nullptr,
                      std::vector<TrainLogEntry>* epoch_log = nullptr);

// Geometric LR sweep on a throwaway copy; returns (lr, smoothed loss) pairs.
// The model passed in is never modified.
std::vector<std::pair<double, double>> lr_range_test(const ClassifierModel& model,
                                                     const std::vector<CleanTweet>& data,
                                                     double lr_min, double lr_max,
                                                     int n_points, int batch_size = 32,
                                                     std::uint64_t seed = 0);

}  // namespace floodtext
