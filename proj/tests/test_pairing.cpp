#include "mospc/pairing.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <vector>

using namespace mospc;

namespace {

// multiplicity of each index across all pairs
std::vector<int> multiplicities(const PairBatch& pb, std::size_t batch_size) {
  std::vector<int> mult(batch_size, 0);
  for (const auto& [i, j] : pb.pairs) {
    EXPECT_LT(i, batch_size);
    EXPECT_LT(j, batch_size);
    EXPECT_NE(i, j);
    ++mult[i];
    ++mult[j];
  }
  return mult;
}

// true when the pair graph is one cycle visiting every index
bool is_single_cycle(const PairBatch& pb, std::size_t batch_size) {
  if (pb.pairs.size() != batch_size) {
    return false;
  }
  std::vector<std::vector<std::size_t>> adj(batch_size);
  for (const auto& [i, j] : pb.pairs) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  for (const auto& a : adj) {
    if (a.size() != 2) {
      return false;
    }
  }
  // walk the cycle from 0, never reusing the edge just traversed
  std::size_t prev = batch_size, cur = 0, steps = 0;
  do {
    const std::size_t next = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
    prev = cur;
    cur = next;
    ++steps;
  } while (cur != 0 && steps <= batch_size);
  return cur == 0 && steps == batch_size;
}

std::set<std::pair<std::size_t, std::size_t>> canonical_pairs(const PairBatch& pb) {
  std::set<std::pair<std::size_t, std::size_t>> s;
  for (const auto& [i, j] : pb.pairs) {
    s.insert({std::min(i, j), std::max(i, j)});
  }
  return s;
}

}  // namespace

TEST(MakePairs, DegenerateSizes) {
  Rng rng(1);
  EXPECT_TRUE(make_pairs(1, rng).pairs.empty());
  const PairBatch pb = make_pairs(2, rng);
  ASSERT_EQ(pb.pairs.size(), 1u);
  EXPECT_EQ(canonical_pairs(pb), (std::set<std::pair<std::size_t, std::size_t>>{{0, 1}}));
}

TEST(MakePairs, RingForAllSizesAndSeeds) {
  for (std::size_t b = 3; b <= 64; ++b) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(seed);
      const PairBatch pb = make_pairs(b, rng);
      ASSERT_EQ(pb.pairs.size(), b);
      const std::vector<int> mult = multiplicities(pb, b);
      for (int m : mult) {
        EXPECT_EQ(m, 2);
      }
      EXPECT_TRUE(is_single_cycle(pb, b));
      EXPECT_EQ(canonical_pairs(pb).size(), b);  // no duplicate unordered pair
    }
  }
}

TEST(MakePairs, EightSamplePairCount) {
  Rng rng(3);
  const PairBatch pb = make_pairs(8, rng);
  EXPECT_EQ(pb.pairs.size(), 8u);
  for (int m : multiplicities(pb, 8)) {
    EXPECT_EQ(m, 2);
  }
}

TEST(MakePairs, DeterministicGivenSeed) {
  Rng a(42), b(42);
  EXPECT_EQ(make_pairs(16, a).pairs, make_pairs(16, b).pairs);
}

TEST(MakePairs, ConsecutiveSeedsAlmostAlwaysDiffer) {
  // B=8 has (8-1)!/2 = 2520 distinct cycles, so two independent draws collide
  // with probability 1/2520; over 999 adjacent seed pairs, fewer than 1% may
  // coincide.
  int distinct = 0;
  std::set<std::pair<std::size_t, std::size_t>> prev;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    const auto cur = canonical_pairs(make_pairs(8, rng));
    if (seed > 0 && cur != prev) {
      ++distinct;
    }
    prev = cur;
  }
  EXPECT_GE(distinct, 990);
}

TEST(MakePairs, ManySeedsCoverManyCycles) {
  std::set<std::set<std::pair<std::size_t, std::size_t>>> seen;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed * 7919 + 1);
    seen.insert(canonical_pairs(make_pairs(8, rng)));
  }
  // 1000 uniform draws from 2520 cycles give ~825 distinct in expectation;
  // far below 1000 yet far above any degenerate policy.
  EXPECT_GE(seen.size(), 700u);
}
