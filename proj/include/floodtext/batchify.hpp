#pragma once

#include <vector>

#include "floodtext/tensor.hpp"

namespace floodtext {

// Continuous-stream batch layout: the stream is cut into batch_size contiguous
// lanes of floor(N / batch_size) tokens (tail dropped), and each lane is read
// in bptt_len pieces. Targets are the inputs shifted by one token.
struct Batches {
  std::size_t batch_size = 0;
  std::size_t bptt_len = 0;
  std::vector<IntMatrix> inputs;
  std::vector<IntMatrix> targets;

  std::size_t n_blocks() const { return inputs.size(); }
};

Batches batchify(const std::vector<int>& stream, int batch_size, int bptt_len);

}  // namespace floodtext
