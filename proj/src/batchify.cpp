#include "floodtext/batchify.hpp"

#include <string>

#include "floodtext/error.hpp"

namespace floodtext {

Batches batchify(const std::vector<int>& stream, int batch_size, int bptt_len) {
  if (batch_size < 1 || bptt_len < 1) {
    throw ConfigError("batchify: batch_size and bptt_len must be positive");
  }
  const std::size_t batch = batch_size;
  const std::size_t bptt = bptt_len;
  const std::size_t needed = batch * (bptt + 1);
  if (stream.size() < needed) {
    throw DataError("batchify: stream of " + std::to_string(stream.size()) +
                    " tokens is shorter than batch_size*(bptt_len+1) = " +
                    std::to_string(needed));
  }

  const std::size_t lane_len = stream.size() / batch;
  const std::size_t n_blocks = (lane_len - 1) / bptt;

  Batches out;
  out.batch_size = batch;
  out.bptt_len = bptt;
  out.inputs.reserve(n_blocks);
  out.targets.reserve(n_blocks);
  for (std::size_t k = 0; k < n_blocks; ++k) {
    IntMatrix in(batch, bptt);
    IntMatrix tgt(batch, bptt);
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t lane_start = b * lane_len + k * bptt;
      for (std::size_t t = 0; t < bptt; ++t) {
        in.at(b, t) = stream[lane_start + t];
        tgt.at(b, t) = stream[lane_start + t + 1];
      }
    }
    out.inputs.push_back(std::move(in));
    out.targets.push_back(std::move(tgt));
  }
  return out;
}

}  // namespace floodtext
