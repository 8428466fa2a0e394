#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "floodtext/corpus.hpp"

namespace floodtext {

struct NGramStats {
  int n = 1;
  int top_k = 0;
  std::map<std::vector<std::string>, long long> counts;

  // (count desc, tokens asc), truncated to top_k.
  std::vector<std::pair<std::vector<std::string>, long long>> top() const;
};

// Sliding-window counts per tweet; n-grams never cross tweet boundaries.
NGramStats ngram_stats(const std::vector<CleanTweet>& corpus, int n, int top_k);

// Unit-width histograms of words per tweet (model-profile tokens) and
// characters per tweet (UTF-8 code points of the raw text).
struct LengthStats {
  std::map<std::size_t, long long> words;
  std::map<std::size_t, long long> chars;
};

LengthStats length_stats(const std::vector<RawTweet>& corpus);

std::size_t utf8_length(const std::string& text);

}  // namespace floodtext
