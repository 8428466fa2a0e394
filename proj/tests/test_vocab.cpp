#include <string>
#include <vector>

#include <doctest.h>

#include "floodtext/corpus.hpp"
#include "floodtext/error.hpp"
#include "floodtext/rng.hpp"
#include "floodtext/vocab.hpp"

using namespace floodtext;

namespace {

std::vector<CleanTweet> two_tweet_corpus() {
  return {{"1", {"flood", "water"}, Label::related},
          {"2", {"flood", "road"}, Label::related}};
}

}  // namespace

TEST_CASE("build_vocab ranks by count then token") {
  const Vocabulary v = build_vocab(two_tweet_corpus(), 1);
  CHECK(v.size() == 7);
  CHECK(v.token_of[Vocabulary::kUnk] == "<unk>");
  CHECK(v.token_of[Vocabulary::kPad] == "<pad>");
  CHECK(v.token_of[Vocabulary::kBos] == "<bos>");
  CHECK(v.token_of[Vocabulary::kEos] == "<eos>");
  CHECK(v.id("flood") == 4);
  CHECK(v.id("road") == 5);   // count tie with water, lexicographic order
  CHECK(v.id("water") == 6);
}

TEST_CASE("build_vocab honors min_freq and max_size") {
  CHECK(build_vocab(two_tweet_corpus(), 2).size() == 5);

  const Vocabulary capped = build_vocab(two_tweet_corpus(), 1, 2);
  CHECK(capped.size() == 6);
  CHECK(capped.id("flood") == 4);
  CHECK(capped.id("road") == 5);
  CHECK(capped.id("water") == Vocabulary::kUnk);

  CHECK_THROWS_AS(build_vocab(two_tweet_corpus(), 0), ConfigError);
}

TEST_CASE("numericalize pinned examples") {
  const Vocabulary v = build_vocab(two_tweet_corpus(), 1);

  const CleanTweet with_oov{"x", {"flood", "zzz"}, std::nullopt};
  CHECK(numericalize(with_oov, v, false) ==
        std::vector<int>{v.id("flood"), Vocabulary::kUnk});

  const CleanTweet empty{"y", {}, std::nullopt};
  CHECK(numericalize(empty, v, true) ==
        std::vector<int>{Vocabulary::kBos, Vocabulary::kEos});

  const CleanTweet in_vocab{"z", {"flood", "road"}, std::nullopt};
  CHECK(denumericalize(numericalize(in_vocab, v, false), v) ==
        std::vector<std::string>{"flood", "road"});
}

TEST_CASE("round trip replaces out-of-vocabulary tokens with <unk>") {
  const Vocabulary v = build_vocab(two_tweet_corpus(), 1);
  const std::vector<std::string> tokens{"flood", "zzz", "water"};
  CHECK(denumericalize(numericalize(tokens, v, false), v) ==
        std::vector<std::string>{"flood", "<unk>", "water"});
}

TEST_CASE("vocab_from_token_list rebuilds the same mapping") {
  const Vocabulary v = build_vocab(two_tweet_corpus(), 1, 100);
  const Vocabulary rebuilt = vocab_from_token_list(v.token_of, v.min_freq, v.max_size);
  CHECK(rebuilt.token_of == v.token_of);
  CHECK(rebuilt.id_of == v.id_of);
  CHECK(rebuilt.min_freq == v.min_freq);
  CHECK(rebuilt.max_size == v.max_size);
}

TEST_CASE("ids are dense and invertible on random corpora") {
  RngStream rng(73, 1);
  const std::vector<std::string> pool{"a", "bb", "ccc", "dd", "e'e",
                                      "ff", "g", "hh", "iii", "jj"};
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<CleanTweet> corpus;
    const std::size_t n = 1 + rng.below(10);
    for (std::size_t i = 0; i < n; ++i) {
      CleanTweet t;
      t.id = std::to_string(i);
      const std::size_t len = 1 + rng.below(8);
      for (std::size_t k = 0; k < len; ++k) t.tokens.push_back(pool[rng.below(pool.size())]);
      corpus.push_back(std::move(t));
    }
    const Vocabulary v = build_vocab(corpus, 1);
    REQUIRE(v.size() >= 4);
    for (int id = 0; id < v.size(); ++id) {
      CHECK(v.id(v.token(id)) == id);
    }
    for (const auto& [token, id] : v.id_of) {
      CHECK(v.token(id) == token);
    }
  }
}
