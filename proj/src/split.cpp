#include "floodtext/split.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "floodtext/error.hpp"
#include "floodtext/rng.hpp"

namespace floodtext {

namespace {

std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

// Indices of records per class, in input order. Related first.
std::array<std::vector<std::size_t>, 2> by_class(const std::vector<CleanTweet>& data,
                                                 const char* op_name) {
  std::array<std::vector<std::size_t>, 2> classes;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!data[i].label) {
      throw LabelError(std::string(op_name) + ": record '" + data[i].id + "' has no label");
    }
    classes[*data[i].label == Label::related ? 0 : 1].push_back(i);
  }
  return classes;
}

std::vector<CleanTweet> gather(const std::vector<CleanTweet>& data,
                               std::vector<std::size_t> idx) {
  std::sort(idx.begin(), idx.end());
  std::vector<CleanTweet> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(data[i]);
  return out;
}

}  // namespace

DatasetSplit split(const std::vector<CleanTweet>& data, double ratio,
                   std::uint64_t seed, bool stratified) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ConfigError("split ratio must lie in (0,1)");
  }

  RngStream rng(seed, rng_stream::kSplit);
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;

  if (stratified) {
    for (auto& cls : by_class(data, "split")) {
      rng.shuffle(cls);
      const std::size_t n_train = round_half_up(ratio * static_cast<double>(cls.size()));
      train_idx.insert(train_idx.end(), cls.begin(), cls.begin() + n_train);
      test_idx.insert(test_idx.end(), cls.begin() + n_train, cls.end());
    }
  } else {
    std::vector<std::size_t> idx(data.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng.shuffle(idx);
    const std::size_t n_train = round_half_up(ratio * static_cast<double>(data.size()));
    train_idx.assign(idx.begin(), idx.begin() + n_train);
    test_idx.assign(idx.begin() + n_train, idx.end());
  }

  DatasetSplit out;
  out.train = gather(data, std::move(train_idx));
  out.test = gather(data, std::move(test_idx));
  out.ratio = ratio;
  out.seed = seed;
  out.stratified = stratified;
  return out;
}

std::vector<CleanTweet> subsample_labels(const std::vector<CleanTweet>& train,
                                         double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 100.0)) {
    throw ConfigError("label fraction must lie in (0,100]");
  }
  auto classes = by_class(train, "subsample_labels");
  if (fraction == 100.0) {
    return train;
  }

  const std::size_t total = round_half_up(fraction * static_cast<double>(train.size()) / 100.0);

  // Largest-remainder apportionment so the class counts sum to `total`.
  std::array<std::size_t, 2> take{};
  std::array<double, 2> remainder{};
  std::size_t assigned = 0;
  for (int c = 0; c < 2; ++c) {
    const double want = fraction * static_cast<double>(classes[c].size()) / 100.0;
    take[c] = static_cast<std::size_t>(std::floor(want));
    take[c] = std::min(take[c], classes[c].size());
    remainder[c] = want - std::floor(want);
    assigned += take[c];
  }
  while (assigned < total) {
    const int c = (remainder[0] >= remainder[1] && take[0] < classes[0].size()) ? 0 : 1;
    if (take[c] >= classes[c].size()) break;
    ++take[c];
    remainder[c] = -1.0;
    ++assigned;
  }

  RngStream rng(seed, rng_stream::kSubsample);
  std::vector<std::size_t> chosen;
  for (int c = 0; c < 2; ++c) {
    rng.shuffle(classes[c]);
    chosen.insert(chosen.end(), classes[c].begin(), classes[c].begin() + take[c]);
  }
  return gather(train, std::move(chosen));
}

}  // namespace floodtext
