#include <map>
#include <string>
#include <vector>

#include <doctest.h>

#include "floodtext/corpus.hpp"
#include "floodtext/error.hpp"
#include "floodtext/rng.hpp"
#include "floodtext/stats.hpp"

using namespace floodtext;

namespace {

std::vector<CleanTweet> ab_corpus() {
  return {{"1", {"a", "b", "a"}, std::nullopt}, {"2", {"b", "a"}, std::nullopt}};
}

using Gram = std::vector<std::string>;

}  // namespace

TEST_CASE("ngram_stats pinned counts") {
  const NGramStats uni = ngram_stats(ab_corpus(), 1, 10);
  CHECK(uni.counts.at(Gram{"a"}) == 3);
  CHECK(uni.counts.at(Gram{"b"}) == 2);
  CHECK(uni.counts.size() == 2);

  const NGramStats bi = ngram_stats(ab_corpus(), 2, 10);
  CHECK(bi.counts.at(Gram{"b", "a"}) == 2);
  CHECK(bi.counts.at(Gram{"a", "b"}) == 1);
  CHECK(bi.counts.size() == 2);

  const NGramStats tri = ngram_stats(ab_corpus(), 3, 10);
  CHECK(tri.counts.at(Gram{"a", "b", "a"}) == 1);
  CHECK(tri.counts.size() == 1);
}

TEST_CASE("ngram_stats never crosses tweet boundaries") {
  const std::vector<CleanTweet> corpus{{"1", {"x", "y"}, std::nullopt},
                                       {"2", {"y", "z"}, std::nullopt}};
  const NGramStats bi = ngram_stats(corpus, 2, 10);
  CHECK(bi.counts.count(Gram{"y", "y"}) == 0);
  CHECK(bi.counts.at(Gram{"x", "y"}) == 1);
  CHECK(bi.counts.at(Gram{"y", "z"}) == 1);
}

TEST_CASE("ngram_stats validates n") {
  CHECK_THROWS_AS(ngram_stats(ab_corpus(), 0, 10), ConfigError);
  CHECK_THROWS_AS(ngram_stats(ab_corpus(), 4, 10), ConfigError);
}

TEST_CASE("top() orders by count desc then tokens asc and truncates") {
  const std::vector<CleanTweet> corpus{
      {"1", {"b", "b", "c", "c", "a", "a", "d"}, std::nullopt}};
  const NGramStats uni = ngram_stats(corpus, 1, 3);
  const auto top = uni.top();
  REQUIRE(top.size() == 3);
  CHECK(top[0].first == Gram{"a"});
  CHECK(top[1].first == Gram{"b"});
  CHECK(top[2].first == Gram{"c"});
  CHECK(top[0].second == 2);
}

TEST_CASE("ngram counts match a brute-force sliding window") {
  RngStream rng(79, 1);
  const std::vector<std::string> pool{"a", "b", "c", "d"};
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<CleanTweet> corpus;
    const std::size_t tweets = 1 + rng.below(6);
    for (std::size_t i = 0; i < tweets; ++i) {
      CleanTweet t;
      t.id = std::to_string(i);
      const std::size_t len = rng.below(8);
      for (std::size_t k = 0; k < len; ++k) t.tokens.push_back(pool[rng.below(4)]);
      corpus.push_back(std::move(t));
    }
    for (int n = 1; n <= 3; ++n) {
      std::map<Gram, long long> expect;
      for (const auto& t : corpus) {
        if (t.tokens.size() < static_cast<std::size_t>(n)) continue;
        for (std::size_t s = 0; s + n <= t.tokens.size(); ++s) {
          expect[Gram(t.tokens.begin() + s, t.tokens.begin() + s + n)] += 1;
        }
      }
      CHECK(ngram_stats(corpus, n, 1000).counts == expect);
    }
  }
}

TEST_CASE("length_stats pinned examples") {
  const LengthStats one = length_stats({{"1", "flood in qld", std::nullopt}});
  CHECK(one.words == std::map<std::size_t, long long>{{3, 1}});
  CHECK(one.chars == std::map<std::size_t, long long>{{12, 1}});

  const LengthStats empty = length_stats({});
  CHECK(empty.words.empty());
  CHECK(empty.chars.empty());

  const LengthStats two = length_stats({{"1", "flood in qld", std::nullopt},
                                        {"2", "rain on roof", std::nullopt}});
  CHECK(two.words.at(3) == 2);
}

TEST_CASE("character counts are UTF-8 code points of the raw text") {
  CHECK(utf8_length("agua") == 4);
  CHECK(utf8_length("\xc3\xa1gua") == 4);
  CHECK(utf8_length("") == 0);
  const LengthStats s = length_stats({{"1", "\xc3\xa1gua", std::nullopt}});
  CHECK(s.chars.at(4) == 1);
}
