#include "floodtext/vocab.hpp"

#include <algorithm>

#include "floodtext/error.hpp"

namespace floodtext {

const std::array<std::string, 4>& Vocabulary::specials() {
  static const std::array<std::string, 4> s = {"<unk>", "<pad>", "<bos>", "<eos>"};
  return s;
}

namespace {

Vocabulary from_counts(std::unordered_map<std::string, long long> counts,
                       int min_freq, std::optional<int> max_size) {
  if (min_freq < 1) {
    throw ConfigError("min_freq must be >= 1");
  }
  if (max_size && *max_size < 0) {
    throw ConfigError("max_size must be >= 0");
  }

  std::vector<std::pair<std::string, long long>> ranked;
  ranked.reserve(counts.size());
  for (auto& kv : counts) {
    if (kv.second >= min_freq) ranked.emplace_back(kv.first, kv.second);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (max_size && ranked.size() > static_cast<std::size_t>(*max_size)) {
    ranked.resize(static_cast<std::size_t>(*max_size));
  }

  Vocabulary vocab;
  vocab.min_freq = min_freq;
  vocab.max_size = max_size;
  for (const auto& s : Vocabulary::specials()) {
    vocab.id_of.emplace(s, static_cast<int>(vocab.token_of.size()));
    vocab.token_of.push_back(s);
  }
  for (auto& kv : ranked) {
    vocab.id_of.emplace(kv.first, static_cast<int>(vocab.token_of.size()));
    vocab.token_of.push_back(std::move(kv.first));
  }
  return vocab;
}

}  // namespace

Vocabulary build_vocab(const std::vector<CleanTweet>& corpus, int min_freq,
                       std::optional<int> max_size) {
  if (corpus.empty()) {
    throw DataError("cannot build a vocabulary from an empty corpus");
  }
  std::unordered_map<std::string, long long> counts;
  for (const auto& tweet : corpus) {
    for (const auto& tok : tweet.tokens) ++counts[tok];
  }
  return from_counts(std::move(counts), min_freq, max_size);
}

Vocabulary build_vocab(const std::vector<std::string>& token_stream, int min_freq,
                       std::optional<int> max_size) {
  if (token_stream.empty()) {
    throw DataError("cannot build a vocabulary from an empty token stream");
  }
  std::unordered_map<std::string, long long> counts;
  for (const auto& tok : token_stream) ++counts[tok];
  return from_counts(std::move(counts), min_freq, max_size);
}

Vocabulary vocab_from_token_list(std::vector<std::string> tokens, int min_freq,
                                 std::optional<int> max_size) {
  const auto& specials = Vocabulary::specials();
  if (tokens.size() < specials.size() ||
      !std::equal(specials.begin(), specials.end(), tokens.begin())) {
    throw FormatError("vocabulary token list does not start with the special tokens");
  }
  Vocabulary vocab;
  vocab.min_freq = min_freq;
  vocab.max_size = max_size;
  vocab.token_of = std::move(tokens);
  for (std::size_t i = 0; i < vocab.token_of.size(); ++i) {
    if (!vocab.id_of.emplace(vocab.token_of[i], static_cast<int>(i)).second) {
      throw FormatError("duplicate token in stored vocabulary: " + vocab.token_of[i]);
    }
  }
  return vocab;
}

std::vector<int> numericalize(const std::vector<std::string>& tokens,
                              const Vocabulary& vocab, bool add_bounds) {
  std::vector<int> ids;
  ids.reserve(tokens.size() + (add_bounds ? 2 : 0));
  if (add_bounds) ids.push_back(Vocabulary::kBos);
  for (const auto& tok : tokens) ids.push_back(vocab.id(tok));
  if (add_bounds) ids.push_back(Vocabulary::kEos);
  return ids;
}

std::vector<int> numericalize(const CleanTweet& tweet, const Vocabulary& vocab,
                              bool add_bounds) {
  return numericalize(tweet.tokens, vocab, add_bounds);
}

std::vector<std::string> denumericalize(const std::vector<int>& ids,
                                        const Vocabulary& vocab) {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (int id : ids) {
    if (id < 0 || id >= vocab.size()) {
      throw IndexError("token id " + std::to_string(id) + " outside vocabulary of size " +
                       std::to_string(vocab.size()));
    }
    tokens.push_back(vocab.token(id));
  }
  return tokens;
}

}  // namespace floodtext
