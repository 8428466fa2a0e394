#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace floodtext {

// Deterministic random stream keyed by (seed, stream_id).
//
// std::mt19937_64 output is fully specified by the standard, so the raw
// sequence is identical across platforms. The std distributions are not,
// which is why the draw helpers below are implemented by hand.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : engine_(mix(seed, stream_id)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n) without modulo bias.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream_id) {
    return splitmix(splitmix(seed) ^ splitmix(stream_id + 0x632be59bd9b4e019ULL));
  }

  std::mt19937_64 engine_;
};

// Fixed stream ids so the purposes never collide for one seed.
namespace rng_stream {
constexpr std::uint64_t kEmbeddingInit = 1;
constexpr std::uint64_t kLstmInit = 2;
constexpr std::uint64_t kHeadInit = 3;
constexpr std::uint64_t kDropout = 4;
constexpr std::uint64_t kSplit = 5;
constexpr std::uint64_t kSubsample = 6;
constexpr std::uint64_t kBatchOrder = 7;
constexpr std::uint64_t kSynth = 8;
}  // namespace rng_stream

}  // namespace floodtext
