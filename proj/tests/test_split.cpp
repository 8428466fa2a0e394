#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "floodtext/error.hpp"
#include "floodtext/split.hpp"

using namespace floodtext;

namespace {

std::vector<CleanTweet> make_corpus(std::size_t related, std::size_t unrelated) {
  std::vector<CleanTweet> out;
  for (std::size_t i = 0; i < related + unrelated; ++i) {
    CleanTweet t;
    t.id = "t" + std::to_string(i);
    t.tokens = {"w"};
    t.label = i < related ? Label::related : Label::unrelated;
    out.push_back(std::move(t));
  }
  return out;
}

std::set<std::string> ids_of(const std::vector<CleanTweet>& v) {
  std::set<std::string> out;
  for (const auto& t : v) out.insert(t.id);
  return out;
}

std::size_t count_related(const std::vector<CleanTweet>& v) {
  std::size_t n = 0;
  for (const auto& t : v) {
    if (t.label == Label::related) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("split sizes follow round-half-up") {
  const auto data = make_corpus(5, 5);
  const DatasetSplit parts = split(data, 0.7, 1, false);
  CHECK(parts.train.size() == 7);
  CHECK(parts.test.size() == 3);

  CHECK(split(data, 0.75, 1, false).train.size() == 8);
  CHECK(split(data, 0.25, 1, false).train.size() == 3);
}

TEST_CASE("split partitions the ids") {
  const auto data = make_corpus(6, 4);
  const DatasetSplit parts = split(data, 0.6, 9, false);
  auto train_ids = ids_of(parts.train);
  auto test_ids = ids_of(parts.test);
  CHECK(train_ids.size() + test_ids.size() == data.size());
  for (const auto& id : test_ids) CHECK(train_ids.count(id) == 0);
  std::set<std::string> all = train_ids;
  all.insert(test_ids.begin(), test_ids.end());
  CHECK(all == ids_of(data));
}

TEST_CASE("split is deterministic per seed") {
  const auto data = make_corpus(30, 30);
  const DatasetSplit a = split(data, 0.7, 5, true);
  const DatasetSplit b = split(data, 0.7, 5, true);
  CHECK(ids_of(a.train) == ids_of(b.train));
  CHECK(ids_of(a.test) == ids_of(b.test));

  const DatasetSplit c = split(data, 0.7, 6, true);
  CHECK(ids_of(c.train) != ids_of(a.train));
}

TEST_CASE("stratified split balances classes within one item") {
  const auto data = make_corpus(60, 40);
  const DatasetSplit parts = split(data, 0.7, 3, true);
  const std::size_t related_train = count_related(parts.train);
  const std::size_t unrelated_train = parts.train.size() - related_train;
  CHECK(related_train >= 41);
  CHECK(related_train <= 43);
  CHECK(unrelated_train >= 27);
  CHECK(unrelated_train <= 29);
}

TEST_CASE("stratified split rejects unlabeled records") {
  auto data = make_corpus(4, 4);
  data[2].label = std::nullopt;
  CHECK_THROWS_AS(split(data, 0.5, 1, true), LabelError);
  CHECK_NOTHROW(split(data, 0.5, 1, false));
}

TEST_CASE("split rejects out-of-range ratios") {
  const auto data = make_corpus(5, 5);
  CHECK_THROWS_AS(split(data, 0.0, 1, false), ConfigError);
  CHECK_THROWS_AS(split(data, 1.0, 1, false), ConfigError);
}

TEST_CASE("subsample_labels pinned examples") {
  const auto data = make_corpus(50, 50);

  const auto five = subsample_labels(data, 5.0, 1);
  CHECK(five.size() == 5);
  const std::size_t rel = count_related(five);
  CHECK((rel == 2 || rel == 3));

  const auto all = subsample_labels(data, 100.0, 1);
  CHECK(ids_of(all) == ids_of(data));
  CHECK(all.size() == data.size());

  CHECK(ids_of(subsample_labels(data, 20.0, 7)) ==
        ids_of(subsample_labels(data, 20.0, 7)));
  CHECK(ids_of(subsample_labels(data, 20.0, 7)) !=
        ids_of(subsample_labels(data, 20.0, 8)));
}

TEST_CASE("subsample_labels preserves input order") {
  const auto data = make_corpus(20, 20);
  const auto sample = subsample_labels(data, 30.0, 4);
  std::vector<std::string> positions;
  for (const auto& t : sample) positions.push_back(t.id);
  std::vector<std::string> sorted_by_input;
  for (const auto& t : data) {
    if (ids_of(sample).count(t.id)) sorted_by_input.push_back(t.id);
  }
  CHECK(positions == sorted_by_input);
}

TEST_CASE("subsample_labels validates the fraction") {
  const auto data = make_corpus(5, 5);
  CHECK_THROWS_AS(subsample_labels(data, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(subsample_labels(data, -5.0, 1), ConfigError);
  CHECK_THROWS_AS(subsample_labels(data, 100.5, 1), ConfigError);
}

TEST_CASE("subsample_labels rejects unlabeled records") {
  auto data = make_corpus(4, 4);
  data[0].label = std::nullopt;
  CHECK_THROWS_AS(subsample_labels(data, 50.0, 1), LabelError);
}
