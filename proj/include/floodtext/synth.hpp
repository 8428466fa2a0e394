#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "floodtext/corpus.hpp"

namespace floodtext {

// Template-grammar text generators behind the bundled fixtures in data/.
// Everything is keyed off RngStream(seed, kSynth), so the checked-in files
// can be regenerated byte-for-byte with tools/floodtext-synth.

// Plain-text pretraining corpus: lowercase sentences, one per line, blank
// line between paragraphs. Paragraphs alternate between everyday topics,
// flood/weather topics, and tweet-style sentences, so the vocabulary of
// synth_tweets is covered in full. Stops at the first paragraph boundary
// past min_tokens.
std::string synth_general_text(std::size_t min_tokens, std::uint64_t seed);

struct SynthTweetOptions {
  int count = 2000;
  double related_fraction = 0.5;
  std::uint64_t seed = 7;
  // Twitter-style clutter in the raw text: mentions, urls, hashtags, digits,
  // stray uppercase. All of it is removed or folded by clean_text.
  bool noise = true;
};

// Labeled tweets, separable by construction: Related rows draw their content
// words from the flood lexicon, Unrelated rows from the everyday lexicon,
// with function words shared.
std::vector<RawTweet> synth_tweets(const SynthTweetOptions& options);

// Writes the `tweet_id,text,label` CSV that load_tweets reads back.
void write_tweet_csv(const std::vector<RawTweet>& tweets, std::ostream& out);

}  // namespace floodtext
