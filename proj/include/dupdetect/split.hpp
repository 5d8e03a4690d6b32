// Copyright 2026 The dupdetect authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dupdetect/corpus.hpp"
#include "dupdetect/error.hpp"
#include "dupdetect/rng.hpp"

namespace dupdetect {

struct SplitSpec {
  std::vector<DuplicatePair> train_pairs;
  std::vector<DuplicatePair> test_pairs;
  std::uint64_t seed = 0;
};

// Stream tag for deriving the shuffle seed, so split randomness is decoupled
// from other consumers of the same user seed (see rng.hpp).
inline constexpr std::uint64_t kSplitStream = 0x73706c6974;  // "split"

// Deterministic shuffle + prefix cut. Same (pairs, ratio, seed) in, same
// partition out — bit-for-bit, on any platform.
inline SplitSpec split(const Corpus& corpus, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw argument_error("split: ratio must be in (0,1)");
  }
  SplitSpec spec;
  spec.seed = seed;
  std::vector<DuplicatePair> shuffled = corpus.pairs;
  Rng rng(derive_seed(seed, kSplitStream));
  rng.shuffle(shuffled);
  const std::size_t n_train =
      static_cast<std::size_t>(std::llround(ratio * static_cast<double>(shuffled.size())));
  spec.train_pairs.assign(shuffled.begin(), shuffled.begin() + n_train);
  spec.test_pairs.assign(shuffled.begin() + n_train, shuffled.end());
  return spec;
}

}  // namespace dupdetect
