#include "floodtext/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "floodtext/csv.hpp"
#include "floodtext/error.hpp"
#include "floodtext/rng.hpp"

namespace floodtext {
namespace {

struct Lexicon {
  std::vector<const char*> noun;     // N
  std::vector<const char*> nouns;    // Ns
  std::vector<const char*> verb_d;   // Vd
  std::vector<const char*> verb_g;   // Vg
  std::vector<const char*> verb_s;   // Vs
  std::vector<const char*> adj;      // A
};

const Lexicon& flood_lexicon() {
  static const Lexicon lex{
      {"flood", "river", "creek", "storm", "water", "rain", "dam", "levee",
       "bridge", "road", "warning", "shelter", "highway", "street", "house",
       "surge", "downpour", "thunderstorm", "basement", "suburb", "council",
       "rescue", "evacuation", "damage", "mud", "debris", "catchment", "bank",
       "rainfall", "current"},
      {"floods", "rivers", "creeks", "storms", "roads", "streets", "houses",
       "shelters", "warnings", "crews", "residents", "victims", "authorities",
       "sandbags", "suburbs", "banks", "rescuers", "evacuations", "cars",
       "bridges", "paddocks"},
      {"flooded", "overflowed", "evacuated", "rescued", "submerged", "swept",
       "surged", "poured", "drenched", "closed", "blocked", "stranded",
       "trapped", "warned", "receded", "burst", "soaked", "damaged",
       "destroyed", "inundated", "rose", "issued"},
      {"rising", "flooding", "evacuating", "pouring", "surging", "spreading",
       "receding", "overflowing", "sinking", "bursting"},
      {"rises", "overflows", "floods", "spreads", "warns", "recedes"},
      {"heavy", "severe", "major", "flash", "swollen", "dangerous",
       "torrential", "widespread", "extreme", "muddy", "impassable",
       "flooded", "low", "wet"},
  };
  return lex;
}

const Lexicon& everyday_lexicon() {
  static const Lexicon lex{
      {"coffee", "pizza", "movie", "football", "game", "book", "school",
       "dog", "party", "beach", "music", "cake", "breakfast", "lunch",
       "dinner", "chocolate", "recipe", "kitchen", "restaurant", "film",
       "song", "album", "band", "concert", "guitar", "soccer", "cricket",
       "tennis", "match", "team", "player", "season", "score", "goal",
       "novel", "story", "author", "class", "teacher", "student", "exam",
       "homework", "office", "job", "meeting", "project", "weekend",
       "holiday", "park", "garden", "cat", "puppy", "kitten", "birthday",
       "wedding", "market", "store", "phone", "laptop", "computer", "photo",
       "picture", "morning", "evening", "friend", "sister", "brother", "fun"},
      {"friends", "flowers", "clothes", "shoes", "books", "games", "players",
       "teams", "students", "photos", "songs", "movies", "snacks", "cookies",
       "tickets", "holidays", "kids", "mates"},
      {"watched", "played", "ate", "cooked", "baked", "read", "wrote", "sang",
       "danced", "laughed", "smiled", "enjoyed", "loved", "liked", "visited",
       "bought", "met", "walked", "ran", "studied", "finished", "started",
       "won", "lost", "shared", "posted", "chased"},
      {"watching", "playing", "eating", "cooking", "baking", "reading",
       "writing", "singing", "dancing", "laughing", "shopping", "walking",
       "running", "studying", "celebrating", "sleeping"},
      {"plays", "loves", "likes", "enjoys", "wins", "reads", "cooks",
       "sings"},
      {"happy", "funny", "lovely", "beautiful", "amazing", "awesome", "great",
       "nice", "sweet", "delicious", "boring", "tired", "busy", "excited",
       "proud", "lucky", "cozy", "sunny", "bright", "quiet", "perfect",
       "favorite", "new"},
  };
  return lex;
}

const std::vector<const char*>& places() {
  static const std::vector<const char*> p{
      "brisbane", "queensland", "ipswich",   "logan",    "toowoomba",
      "gatton",   "riverside",  "northside", "westside", "rocklea",
      "goodna",   "fairfield"};
  return p;
}

// Topic-agnostic sentence skeletons. Uppercase markers are slots, everything
// else is a literal token.
const std::vector<const char*>& prose_patterns() {
  static const std::vector<const char*> p{
      "the A N Vd in P",
      "the N is Vg near the N",
      "a A N Vd the N",
      "Ns Vd the Ns in P",
      "the Ns are Vg again",
      "we Vd the A N before the N",
      "my N Vd after the A N",
      "the N near the N Vd",
      "A Ns and A Ns everywhere",
      "they Vd Ns from the N",
      "the N in P is A",
      "no N for the Ns this week",
      "the A N and the A N",
      "i Vd the N with my Ns",
      "it was a A N for the Ns",
      "the N Vs when the N Vs",
      "more Ns Vd near P",
      "the N was A and the N was A",
      "Ns in P Vd the N",
      "after the A N the Ns Vd",
      "the A N Vd and the Ns Vd",
      "this N is more A than the last N",
      "every N in P has a A N",
      "the Ns Vd before the N Vd",
      "some Ns Vd while the N was Vg",
      "there is a A N near the N today",
      "the N Vd all day and the Ns Vd all night",
  };
  return p;
}

// Tweet sentences are an opener chunk plus a closer chunk, so the chunk
// pools recombine freely and a small labeled sample still covers every
// chunk even when a particular combination is unseen.
const std::vector<const char*>& related_openers() {
  static const std::vector<const char*> p{
      "the P N is Vg fast",
      "flash flooding on the N",
      "A rain all night",
      "the N burst its banks",
      "water over the N at P",
      "evacuation warning issued for P",
      "our N is flooded",
      "the N is overflowing",
      "major flooding in P",
      "Ns ready at P",
      "the A surge hits P",
      "Ns closed near P",
      "the water is rising in the N",
      "rescue crews Vg people from A houses",
      "emergency crews Vd Ns from the N",
      "A N at P",
      "another A downpour near P",
      "the N Vd after A rain",
      "the N at P just Vd",
      "A water is Vg over the N",
      "they Vd the N at P",
      "our N Vd in the A rain",
      "the N near the N is A",
      "N levels Vg at P",
      "Ns Vd by the A N",
      "A flooding Vs across P",
  };
  return p;
}

const std::vector<const char*>& related_closers() {
  static const std::vector<const char*> p{
      "stay away from the N",
      "please avoid the A Ns",
      "we are moving to the N",
      "Ns stranded everywhere",
      "Ns evacuated to higher ground",
      "send help to the N",
      "the N is too dangerous",
      "more A rain on the way",
      "the N is closed today",
      "power is out across the N",
      "crews are out along the N",
      "the A warning is still in place",
      "Ns under water",
      "the rain has not stopped since yesterday",
      "the damage is A",
      "A Ns everywhere",
      "keep clear of the N",
      "the N may burst tonight",
      "Ns are Vg the area",
      "watch for A Ns",
      "the N rose overnight",
      "do not cross the N",
      "half the N is under A water",
      "the N has Vd again",
  };
  return p;
}

const std::vector<const char*>& unrelated_openers() {
  static const std::vector<const char*> p{
      "watched the A N",
      "this A N recipe",
      "the new N from the N",
      "N and a N in the park",
      "my N chased the N",
      "N week at the N",
      "great win for the N",
      "shopping for Ns at the N",
      "N night with N",
      "the N is sleeping on my N",
      "lazy A morning in the N",
      "N party at the N",
      "a A N for dinner",
      "we Vd A Ns at the beach",
      "my N Vd the funniest thing",
      "finally finished the A N",
      "new Ns from the holiday",
      "the A N went to extra time",
      "Vg a new N tonight",
      "my N Vs this A N",
      "we are Vg N at the N",
      "the N made a A N",
      "N with Ns after the N",
      "trying the new N near the N",
      "our N won the A N",
      "Vd a A N with the Ns",
  };
  return p;
}

const std::vector<const char*>& unrelated_closers() {
  static const std::vector<const char*> p{
      "with my Ns tonight",
      "so much fun at the N",
      "it was A",
      "cannot wait for the N",
      "best N ever",
      "such a A N",
      "we Vd all night",
      "what a A evening",
      "hope you like the N",
      "see you at the N",
      "time for more N",
      "my N loved it",
      "the kids enjoyed the N",
      "at the N in P today",
      "more N again this morning",
      "feeling A and happy",
      "the N was A tonight",
      "everyone Vd the N",
      "my Ns want more N",
      "such a A way to spend the N",
      "the N tasted A",
      "off to the N soon",
      "we Vd until late",
      "a A N for the whole family",
  };
  return p;
}

std::string pick(const std::vector<const char*>& words, RngStream& rng) {
  return words[rng.below(words.size())];
}

std::vector<const char*> head_of(const std::vector<const char*>& words,
                                 std::size_t n) {
  return {words.begin(), words.begin() + std::min(n, words.size())};
}

// Tweets draw slots from the front of each list. A 5% label subsample has to
// cover the tweet vocabulary, so the tweet side stays narrow while the
// pretraining corpus uses the full lists.
const Lexicon& tweet_lexicon(Label label) {
  static const Lexicon flood = [] {
    const Lexicon& full = flood_lexicon();
    return Lexicon{head_of(full.noun, 24),   head_of(full.nouns, 16),
                   head_of(full.verb_d, 16), head_of(full.verb_g, 8),
                   head_of(full.verb_s, 6),  head_of(full.adj, 12)};
  }();
  static const Lexicon everyday = [] {
    const Lexicon& full = everyday_lexicon();
    return Lexicon{head_of(full.noun, 24),   head_of(full.nouns, 16),
                   head_of(full.verb_d, 16), head_of(full.verb_g, 8),
                   head_of(full.verb_s, 6),  head_of(full.adj, 12)};
  }();
  return label == Label::related ? flood : everyday;
}

std::string fill_pattern(const char* pattern, const Lexicon& lex,
                         RngStream& rng, std::size_t* token_count) {
  std::istringstream in(pattern);
  std::string marker;
  std::string out;
  while (in >> marker) {
    std::string word;
    if (marker == "N") {
      word = pick(lex.noun, rng);
    } else if (marker == "Ns") {
      word = pick(lex.nouns, rng);
    } else if (marker == "Vd") {
      word = pick(lex.verb_d, rng);
    } else if (marker == "Vg") {
      word = pick(lex.verb_g, rng);
    } else if (marker == "Vs") {
      word = pick(lex.verb_s, rng);
    } else if (marker == "A") {
      word = pick(lex.adj, rng);
    } else if (marker == "P") {
      word = pick(places(), rng);
    } else {
      word = marker;
    }
    if (!out.empty()) out += ' ';
    out += word;
    if (token_count != nullptr) ++*token_count;
  }
  return out;
}

std::string tweet_sentence(Label label, const Lexicon& lex, RngStream& rng,
                           std::size_t* token_count) {
  const auto& openers =
      label == Label::related ? related_openers() : unrelated_openers();
  const auto& closers =
      label == Label::related ? related_closers() : unrelated_closers();
  std::string text =
      fill_pattern(openers[rng.below(openers.size())], lex, rng, token_count);
  text += ' ';
  text +=
      fill_pattern(closers[rng.below(closers.size())], lex, rng, token_count);
  return text;
}

std::string tweet_body(Label label, RngStream& rng) {
  return tweet_sentence(label, tweet_lexicon(label), rng, nullptr);
}

const std::vector<const char*>& handles() {
  static const std::vector<const char*> h{"news_qld", "bne_updates",
                                          "weather_watch", "daily_buzz",
                                          "my_mate_sam"};
  return h;
}

std::string hashtag(Label label, RngStream& rng) {
  static const std::vector<const char*> rel{"#flood", "#rain", "#storm",
                                            "#brisbane", "#queensland"};
  static const std::vector<const char*> unrel{"#weekend", "#coffee",
                                              "#football", "#fun", "#happy"};
  return pick(label == Label::related ? rel : unrel, rng);
}

// Clutter that clean_text is specified to strip or fold.
std::string decorate(std::string text, Label label, RngStream& rng) {
  if (rng.bernoulli(0.15)) {
    std::size_t start = 0;
    std::size_t word = rng.below(8);
    for (std::size_t i = 0; i < word && start != std::string::npos; ++i) {
      start = text.find(' ', start);
      if (start != std::string::npos) ++start;
    }
    if (start != std::string::npos) {
      std::size_t end = text.find(' ', start);
      if (end == std::string::npos) end = text.size();
      for (std::size_t i = start; i < end; ++i) {
        text[i] = static_cast<char>(std::toupper(
            static_cast<unsigned char>(text[i])));
      }
    }
  }
  if (rng.bernoulli(0.3)) {
    text = "@" + pick(handles(), rng) + " " + text;
  }
  if (rng.bernoulli(0.4)) {
    text += " " + hashtag(label, rng);
  }
  if (rng.bernoulli(0.1)) {
    text += " " + std::to_string(1 + rng.below(2030));
  }
  if (rng.bernoulli(0.25)) {
    static const char* alnum = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::string url = " http://t.co/";
    for (int i = 0; i < 6; ++i) url += alnum[rng.below(36)];
    text += url;
  }
  return text;
}

}  // namespace

std::string synth_general_text(std::size_t min_tokens, std::uint64_t seed) {
  RngStream rng(seed, rng_stream::kSynth);
  std::string out;
  std::size_t tokens = 0;
  bool first = true;
  while (tokens < min_tokens) {
    if (!first) out += '\n';
    first = false;
    const double kind = rng.uniform();
    const std::size_t n_sentences = 3 + rng.below(5);
    for (std::size_t s = 0; s < n_sentences; ++s) {
      std::string sentence;
      if (kind < 0.35) {
        const char* p = prose_patterns()[rng.below(prose_patterns().size())];
        sentence = fill_pattern(p, flood_lexicon(), rng, &tokens);
      } else if (kind < 0.75) {
        const char* p = prose_patterns()[rng.below(prose_patterns().size())];
        sentence = fill_pattern(p, everyday_lexicon(), rng, &tokens);
      } else if (rng.bernoulli(0.5)) {
        sentence =
            tweet_sentence(Label::related, flood_lexicon(), rng, &tokens);
      } else {
        sentence =
            tweet_sentence(Label::unrelated, everyday_lexicon(), rng, &tokens);
      }
      out += sentence;
      out += ".\n";
    }
  }
  return out;
}

std::vector<RawTweet> synth_tweets(const SynthTweetOptions& options) {
  if (options.count <= 0) {
    throw ConfigError("synth_tweets: count must be positive");
  }
  if (options.related_fraction < 0.0 || options.related_fraction > 1.0) {
    throw ConfigError("synth_tweets: related_fraction must be in [0, 1]");
  }
  RngStream rng(options.seed, rng_stream::kSynth);

  const auto n = static_cast<std::size_t>(options.count);
  const auto n_related = static_cast<std::size_t>(
      std::llround(options.related_fraction * static_cast<double>(n)));
  std::vector<Label> labels(n, Label::unrelated);
  for (std::size_t i = 0; i < n_related && i < n; ++i) {
    labels[i] = Label::related;
  }
  rng.shuffle(labels);

  std::vector<RawTweet> tweets;
  tweets.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RawTweet tweet;
    char id[16];
    std::snprintf(id, sizeof(id), "t%06zu", i + 1);
    tweet.id = id;
    tweet.text = tweet_body(labels[i], rng);
    if (options.noise) tweet.text = decorate(tweet.text, labels[i], rng);
    tweet.label = labels[i];
    tweets.push_back(std::move(tweet));
  }
  return tweets;
}

void write_tweet_csv(const std::vector<RawTweet>& tweets, std::ostream& out) {
  write_csv_row(out, {"tweet_id", "text", "label"});
  for (const auto& tweet : tweets) {
    write_csv_row(out, {tweet.id, tweet.text,
                        tweet.label ? label_name(*tweet.label) : ""});
  }
}

}  // namespace floodtext
