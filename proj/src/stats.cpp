#include "floodtext/stats.hpp"

#include <algorithm>

#include "floodtext/error.hpp"

namespace floodtext {

std::vector<std::pair<std::vector<std::string>, long long>> NGramStats::top() const {
  std::vector<std::pair<std::vector<std::string>, long long>> ranked(counts.begin(),
                                                                     counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > static_cast<std::size_t>(top_k)) {
    ranked.resize(static_cast<std::size_t>(top_k));
  }
  return ranked;
}

NGramStats ngram_stats(const std::vector<CleanTweet>& corpus, int n, int top_k) {
  if (n < 1 || n > 3) {
    throw ConfigError("n-gram order must be 1, 2 or 3");
  }
  if (top_k < 1) {
    throw ConfigError("top_k must be >= 1");
  }
  NGramStats stats;
  stats.n = n;
  stats.top_k = top_k;
  for (const auto& tweet : corpus) {
    if (tweet.tokens.size() < static_cast<std::size_t>(n)) continue;
    for (std::size_t i = 0; i + n <= tweet.tokens.size(); ++i) {
      std::vector<std::string> gram(tweet.tokens.begin() + i, tweet.tokens.begin() + i + n);
      ++stats.counts[std::move(gram)];
    }
  }
  return stats;
}

std::size_t utf8_length(const std::string& text) {
  std::size_t n = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++n;  // skip continuation bytes
  }
  return n;
}

LengthStats length_stats(const std::vector<RawTweet>& corpus) {
  LengthStats stats;
  for (const auto& tweet : corpus) {
    const auto tokens = tokenize(clean_text(tweet.text, CleanProfile::model));
    ++stats.words[tokens.size()];
    ++stats.chars[utf8_length(tweet.text)];
  }
  return stats;
}

}  // namespace floodtext
