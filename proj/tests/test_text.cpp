#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "floodtext/corpus.hpp"
#include "floodtext/error.hpp"
#include "floodtext/rng.hpp"

using namespace floodtext;

namespace {

std::string random_raw_text(RngStream& rng) {
  static const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
      " \t\n.,;:!?#@'\"-_/\\()[]{}<>~`$%^&*+=|";
  std::string out;
  const std::size_t len = rng.below(120);
  for (std::size_t i = 0; i < len; ++i) {
    if (rng.bernoulli(0.04)) {
      out += "http://t.co/";
      for (int k = 0; k < 4; ++k) out += alphabet[rng.below(26)];
    } else if (rng.bernoulli(0.03)) {
      out += "\xc3\xa9";  // multi-byte character
    } else {
      out += alphabet[rng.below(alphabet.size())];
    }
  }
  return out;
}

}  // namespace

TEST_CASE("clean_text pinned examples") {
  const std::string raw = "RT @abc: Flood in QLD!! http://t.co/xyz #qldfloods 123";
  CHECK(clean_text(raw, CleanProfile::model) == "rt flood in qld qldfloods");

  REQUIRE(stop_words().count("in") == 1);
  CHECK(clean_text(raw, CleanProfile::stats) == "rt flood qld qldfloods");

  CHECK(clean_text("", CleanProfile::model) == "");
  CHECK(clean_text("", CleanProfile::stats) == "");
}

TEST_CASE("clean_text removes urls, mentions, digits, and stray letters") {
  CHECK(clean_text("visit www.example.com/x?y=1 now", CleanProfile::model) ==
        "visit now");
  CHECK(clean_text("@user1 @user2 hello", CleanProfile::model) == "hello");
  CHECK(clean_text("#flood warning", CleanProfile::model) == "flood warning");
  CHECK(clean_text("b flood a i z", CleanProfile::model) == "flood a i");
  CHECK(clean_text("water   \t rising\n\nfast", CleanProfile::model) ==
        "water rising fast");
  CHECK(clean_text("it's e'rywhere", CleanProfile::model) == "it's e'rywhere");
}

TEST_CASE("clean_text is idempotent and emits only [a-z'] tokens") {
  RngStream rng(71, 1);
  for (int rep = 0; rep < 200; ++rep) {
    const std::string raw = random_raw_text(rng);
    for (CleanProfile profile : {CleanProfile::model, CleanProfile::stats}) {
      const std::string once = clean_text(raw, profile);
      CHECK(clean_text(once, profile) == once);
      for (const std::string& token : tokenize(once)) {
        REQUIRE_FALSE(token.empty());
        CHECK((token[0] >= 'a' && token[0] <= 'z'));
        for (char c : token) {
          CHECK(((c >= 'a' && c <= 'z') || c == '\''));
        }
      }
    }
  }
}

TEST_CASE("tokenize pinned examples") {
  CHECK(tokenize("flood qld") == std::vector<std::string>{"flood", "qld"});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("a'hoy water") == std::vector<std::string>{"a'hoy", "water"});
}

TEST_CASE("labels parse case-insensitively and empty means unlabeled") {
  CHECK(parse_label("Related", 1) == Label::related);
  CHECK(parse_label("UNRELATED", 2) == Label::unrelated);
  CHECK(parse_label("", 4) == std::nullopt);
  CHECK_THROWS_AS(parse_label("maybe", 5), LabelError);
  CHECK(std::string(label_name(Label::related)) == "Related");
  CHECK(std::string(label_name(Label::unrelated)) == "Unrelated");
}

TEST_CASE("clean_tweet keeps id and label") {
  RawTweet raw{"42", "Flood in #QLD", Label::related};
  const CleanTweet clean = clean_tweet(raw, CleanProfile::model);
  CHECK(clean.id == "42");
  CHECK(clean.tokens == std::vector<std::string>{"flood", "in", "qld"});
  CHECK(clean.label == Label::related);
}

TEST_CASE("load_tweets reads the tweet_id,text,label schema") {
  std::istringstream in(
      "tweet_id,text,label\n"
      "1,\"flood, big flood\",related\n"
      "2,sunny day,unrelated\n"
      "3,no label here,\n");
  const std::vector<RawTweet> tweets = load_tweets(in, "mem");
  REQUIRE(tweets.size() == 3);
  CHECK(tweets[0].id == "1");
  CHECK(tweets[0].text == "flood, big flood");
  CHECK(tweets[0].label == Label::related);
  CHECK(tweets[1].label == Label::unrelated);
  CHECK_FALSE(tweets[2].label.has_value());
}

TEST_CASE("load_tweets rejects malformed input") {
  {
    std::istringstream in("id,body\n1,x\n");
    CHECK_THROWS_AS(load_tweets(in, "mem"), FormatError);
  }
  {
    std::istringstream in("tweet_id,text,label\n1,too,many,fields\n");
    CHECK_THROWS_AS(load_tweets(in, "mem"), RowError);
  }
  {
    std::istringstream in("tweet_id,text,label\n,empty id,related\n");
    CHECK_THROWS_AS(load_tweets(in, "mem"), RowError);
  }
  {
    std::istringstream in("tweet_id,text,label\n1,x,sideways\n");
    CHECK_THROWS_AS(load_tweets(in, "mem"), LabelError);
  }
  CHECK_THROWS_AS(load_tweets("/nonexistent/path.csv"), DataError);
}

TEST_CASE("row errors carry the physical line number") {
  std::istringstream in("tweet_id,text,label\n1,ok,related\n2,bad,related,x\n");
  try {
    load_tweets(in, "mem");
    FAIL("expected RowError");
  } catch (const RowError& e) {
    CHECK(e.line() == 3);
  }
}
