#pragma once

#include <cstdint>
#include <vector>

#include "floodtext/corpus.hpp"

namespace floodtext {

struct DatasetSplit {
  std::vector<CleanTweet> train;
  std::vector<CleanTweet> test;
  double ratio = 0.0;
  std::uint64_t seed = 0;
  bool stratified = false;
};

// Deterministic per (seed, input order). |train| = round-half-up(ratio * N),
// +-1 when stratified rounding per class disagrees with the total.
DatasetSplit split(const std::vector<CleanTweet>& data, double ratio,
                   std::uint64_t seed, bool stratified);

// Stratified subset of round-half-up(fraction * N / 100) records, preserving
// input order. fraction = 100 returns the input unchanged.
std::vector<CleanTweet> subsample_labels(const std::vector<CleanTweet>& train,
                                         double fraction, std::uint64_t seed);

}  // namespace floodtext
