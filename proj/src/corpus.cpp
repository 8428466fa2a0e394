#include "floodtext/corpus.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "floodtext/csv.hpp"
#include "floodtext/error.hpp"

namespace floodtext {

namespace {

bool starts_with(const std::string& s, const char* prefix) {
  return s.rfind(prefix, 0) == 0;
}

// URL remnants are filtered both at the raw-run stage and again on final
// tokens, so re-cleaning cleaned text is a no-op.
bool looks_like_url(const std::string& token) {
  return starts_with(token, "http") || starts_with(token, "www");
}

}  // namespace

const char* label_name(Label label) {
  return label == Label::related ? "Related" : "Unrelated";
}

std::optional<Label> parse_label(const std::string& cell, std::size_t line) {
  if (cell.empty()) return std::nullopt;
  std::string lower;
  lower.reserve(cell.size());
  for (char c : cell) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "related") return Label::related;
  if (lower == "unrelated") return Label::unrelated;
  throw LabelError("line " + std::to_string(line) + ": unknown label '" + cell + "'");
}

std::string clean_text(const std::string& text, CleanProfile profile) {
  // Lowercase ASCII, then split into whitespace-delimited runs.
  std::string lower;
  lower.reserve(text.size());
  for (char c : text) {
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }

  std::vector<std::string> runs;
  {
    std::string cur;
    for (char c : lower) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) runs.push_back(std::move(cur)), cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) runs.push_back(std::move(cur));
  }

  std::string filtered;
  for (auto& run : runs) {
    if (looks_like_url(run)) continue;
    if (run[0] == '@') continue;
    std::size_t start = 0;
    while (start < run.size() && run[start] == '#') ++start;
    // Keep letters and in-word apostrophes; everything else separates.
    for (std::size_t i = start; i < run.size(); ++i) {
      const char c = run[i];
      filtered.push_back((c >= 'a' && c <= 'z') || c == '\'' ? c : ' ');
    }
    filtered.push_back(' ');
  }

  const bool drop_stops = profile == CleanProfile::stats;
  std::string out;
  std::string token;
  auto flush = [&] {
    std::size_t lead = 0;
    while (lead < token.size() && token[lead] == '\'') ++lead;
    token.erase(0, lead);
    if (token.empty()) return;
    if (looks_like_url(token)) return;
    if (token.size() == 1 && token != "a" && token != "i") return;
    if (drop_stops && stop_words().count(token)) return;
    if (!out.empty()) out.push_back(' ');
    out += token;
  };
  for (char c : filtered) {
    if (c == ' ') {
      flush();
      token.clear();
    } else {
      token.push_back(c);
    }
  }
  flush();
  return out;
}

std::vector<std::string> tokenize(const std::string& clean) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : clean) {
    if (c == ' ') {
      if (!cur.empty()) tokens.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

CleanTweet clean_tweet(const RawTweet& raw, CleanProfile profile) {
  return CleanTweet{raw.id, tokenize(clean_text(raw.text, profile)), raw.label};
}

std::vector<CleanTweet> clean_corpus(const std::vector<RawTweet>& raw,
                                     CleanProfile profile) {
  std::vector<CleanTweet> out;
  out.reserve(raw.size());
  for (const auto& t : raw) out.push_back(clean_tweet(t, profile));
  return out;
}

std::vector<RawTweet> load_tweets(std::istream& in, const std::string& name) {
  CsvReader reader(in);
  CsvRecord rec;

  if (!reader.next(rec) || rec.fields != std::vector<std::string>{"tweet_id", "text", "label"}) {
    throw FormatError(name + ": missing header 'tweet_id,text,label'");
  }

  std::vector<RawTweet> tweets;
  while (reader.next(rec)) {
    if (rec.fields.size() != 3) {
      throw RowError(rec.line, "expected 3 columns, got " + std::to_string(rec.fields.size()));
    }
    RawTweet t;
    t.id = rec.fields[0];
    t.text = rec.fields[1];
    t.label = parse_label(rec.fields[2], rec.line);
    if (t.id.empty()) {
      throw RowError(rec.line, "empty tweet_id");
    }
    tweets.push_back(std::move(t));
  }
  return tweets;
}

std::vector<RawTweet> load_tweets(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open corpus file: " + path);
  }
  return load_tweets(in, path);
}

}  // namespace floodtext
