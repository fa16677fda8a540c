// In-batch pair construction. Every sample joins at most two pairs; for
// batches of three or more this is realized as a ring over a uniformly
// shuffled permutation, which puts each sample in exactly two pairs.
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "mospc/rng.hpp"

namespace mospc {

struct PairBatch {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

inline PairBatch make_pairs(std::size_t batch_size, Rng& rng) {
  PairBatch out;
  if (batch_size < 2) {
    return out;
  }
  std::vector<std::size_t> perm(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    perm[i] = i;
  }
  rng.shuffle(perm);
  if (batch_size == 2) {
    out.pairs.emplace_back(perm[0], perm[1]);
    return out;
  }
  out.pairs.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    out.pairs.emplace_back(perm[i], perm[(i + 1) % batch_size]);
  }
  return out;
}

}  // namespace mospc
