#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "floodtext/error.hpp"
#include "floodtext/synth.hpp"

// Regenerates the checked-in fixtures under data/.

int main(int argc, char** argv) {
  CLI::App app{"Synthetic corpus and tweet generator"};

  std::string corpus_path = "data/general_corpus.txt";
  std::string tweets_path = "data/synthetic_tweets.csv";
  std::size_t corpus_tokens = 100000;
  floodtext::SynthTweetOptions options;

  app.add_option("--corpus", corpus_path, "General corpus output path");
  app.add_option("--tweets", tweets_path, "Tweet CSV output path");
  app.add_option("--corpus-tokens", corpus_tokens, "Minimum corpus tokens");
  app.add_option("--count", options.count, "Number of tweets");
  app.add_option("--related-fraction", options.related_fraction,
                 "Share of Related tweets");
  app.add_option("--seed", options.seed, "Generator seed");
  app.add_flag("!--no-noise", options.noise, "Disable twitter-style clutter");

  CLI11_PARSE(app, argc, argv);

  try {
    {
      std::ofstream out(corpus_path, std::ios::binary | std::ios::trunc);
      if (!out) {
        std::cerr << "cannot write " << corpus_path << "\n";
        return 2;
      }
      out << floodtext::synth_general_text(corpus_tokens, options.seed);
    }
    {
      std::ofstream out(tweets_path, std::ios::binary | std::ios::trunc);
      if (!out) {
        std::cerr << "cannot write " << tweets_path << "\n";
        return 2;
      }
      floodtext::write_tweet_csv(floodtext::synth_tweets(options), out);
    }
  } catch (const floodtext::Error& e) {
    std::cerr << "synth: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  }
  std::cout << "wrote " << corpus_path << " and " << tweets_path << "\n";
  return 0;
}
