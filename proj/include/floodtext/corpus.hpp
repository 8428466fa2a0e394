#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace floodtext {

enum class Label { related, unrelated };

const char* label_name(Label label);

// Case-insensitive; empty cell means "no label".
std::optional<Label> parse_label(const std::string& cell, std::size_t line);

struct RawTweet {
  std::string id;
  std::string text;
  std::optional<Label> label;
};

struct CleanTweet {
  std::string id;
  std::vector<std::string> tokens;
  std::optional<Label> label;
};

// `stats` additionally drops stop words and is what the descriptive
// statistics use; `model` keeps them, which the language model needs.
enum class CleanProfile { stats, model };

// Normalizes raw tweet text: lowercase, URLs/mentions/digits/punctuation
// removed, `#word` -> `word`, single stray letters (except a/i) dropped,
// whitespace collapsed. Idempotent. Every emitted token matches [a-z][a-z']*.
std::string clean_text(const std::string& text, CleanProfile profile);

// Splits the output of clean_text on single spaces.
std::vector<std::string> tokenize(const std::string& clean);

const std::unordered_set<std::string>& stop_words();

CleanTweet clean_tweet(const RawTweet& raw, CleanProfile profile);
std::vector<CleanTweet> clean_corpus(const std::vector<RawTweet>& raw,
                                     CleanProfile profile);

// Reads a tweet CSV with header `tweet_id,text,label`.
std::vector<RawTweet> load_tweets(const std::string& path);
std::vector<RawTweet> load_tweets(std::istream& in, const std::string& name);

}  // namespace floodtext
