#pragma once

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "floodtext/corpus.hpp"

namespace floodtext {

// Token <-> id mapping. Ids 0..3 are reserved for the special tokens below;
// real tokens are ranked by (count desc, token asc) when built.
struct Vocabulary {
  static constexpr int kUnk = 0;
  static constexpr int kPad = 1;
  static constexpr int kBos = 2;
  static constexpr int kEos = 3;

  static const std::array<std::string, 4>& specials();

  std::unordered_map<std::string, int> id_of;
  std::vector<std::string> token_of;
  int min_freq = 1;
  std::optional<int> max_size;

  int size() const { return static_cast<int>(token_of.size()); }

  // <unk> for out-of-vocabulary tokens.
  int id(const std::string& token) const {
    auto it = id_of.find(token);
    return it == id_of.end() ? kUnk : it->second;
  }

  const std::string& token(int id) const { return token_of.at(static_cast<std::size_t>(id)); }
};

Vocabulary build_vocab(const std::vector<CleanTweet>& corpus, int min_freq,
                       std::optional<int> max_size = std::nullopt);
Vocabulary build_vocab(const std::vector<std::string>& token_stream, int min_freq,
                       std::optional<int> max_size = std::nullopt);

// Rebuilds the lookup structures from a stored token list (checkpoint load).
Vocabulary vocab_from_token_list(std::vector<std::string> tokens, int min_freq,
                                 std::optional<int> max_size);

std::vector<int> numericalize(const CleanTweet& tweet, const Vocabulary& vocab,
                              bool add_bounds);
std::vector<int> numericalize(const std::vector<std::string>& tokens,
                              const Vocabulary& vocab, bool add_bounds);
std::vector<std::string> denumericalize(const std::vector<int>& ids,
                                        const Vocabulary& vocab);

}  // namespace floodtext
