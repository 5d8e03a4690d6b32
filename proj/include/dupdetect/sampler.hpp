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

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dupdetect/corpus.hpp"
#include "dupdetect/embedding.hpp"
#include "dupdetect/error.hpp"
#include "dupdetect/rng.hpp"
#include "dupdetect/split.hpp"

namespace dupdetect {

struct TripletSample {
  std::uint64_t anchor = 0;    // the closed duplicate
  std::uint64_t positive = 0;  // its annotated original
  std::uint64_t negative = 0;  // sampled non-duplicate
};

struct PairBatch {
  std::vector<std::uint64_t> anchors;
  std::vector<std::uint64_t> positives;
};

inline constexpr std::uint64_t kTripletStream = 0x74726970;  // "trip"
inline constexpr std::uint64_t kBatchStream = 0x62617463;    // "batc"

namespace detail {

inline std::uint64_t epoch_seed(std::uint64_t seed, std::uint64_t stream, std::size_t epoch) {
  return derive_seed(derive_seed(seed, stream), static_cast<std::uint64_t>(epoch));
}

}  // namespace detail

// One epoch of triplets: every usable train pair once (order shuffled under
// the seed), anchor = dup, positive = orig, negative uniform over embedded
// posts not annotated as duplicates of the anchor in either direction.
// "Not annotated" is taken over ALL corpus pairs, so held-out test
// counterparts are never sampled as negatives.
inline std::vector<TripletSample> sample_triplets(const Corpus& corpus, const SplitSpec& split,
                                                  const EmbeddingStore& store, std::uint64_t seed,
                                                  std::size_t epoch = 0) {
  if (corpus.posts.size() < 3) throw data_error("sample_triplets: corpus has < 3 posts");

  std::vector<std::uint64_t> candidates;  // embedded posts, ascending id
  candidates.reserve(store.size());
  for (const Post& p : corpus.posts) {
    if (store.contains(p.id)) candidates.push_back(p.id);
  }

  std::unordered_map<std::uint64_t, std::unordered_set<std::uint64_t>> annotated;
  for (const DuplicatePair& pr : corpus.pairs) {
    annotated[pr.dup_id].insert(pr.orig_id);
    annotated[pr.orig_id].insert(pr.dup_id);
  }

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < split.train_pairs.size(); ++i) {
    const DuplicatePair& pr = split.train_pairs[i];
    if (store.contains(pr.dup_id) && store.contains(pr.orig_id)) order.push_back(i);
  }

  Rng rng(detail::epoch_seed(seed, kTripletStream, epoch));
  rng.shuffle(order);

  std::vector<TripletSample> out;
  out.reserve(order.size());
  for (std::size_t idx : order) {
    const DuplicatePair& pr = split.train_pairs[idx];
    const auto& excluded = annotated[pr.dup_id];  // contains pr.orig_id
    auto eligible = [&](std::uint64_t id) {
      return id != pr.dup_id && id != pr.orig_id && excluded.count(id) == 0;
    };
    std::uint64_t negative = 0;
    bool found = false;
    // Rejection sampling with a bounded number of attempts; the fallback
    // enumerates the eligible set so termination never depends on luck.
    for (int attempt = 0; attempt < 64 && !found; ++attempt) {
      std::uint64_t cand = candidates[rng.below(candidates.size())];
      if (eligible(cand)) {
        negative = cand;
        found = true;
      }
    }
    if (!found) {
      std::vector<std::uint64_t> pool;
      for (std::uint64_t id : candidates) {
        if (eligible(id)) pool.push_back(id);
      }
      if (pool.empty()) {
        throw data_error("sample_triplets: no eligible negative for anchor " +
                         std::to_string(pr.dup_id));
      }
      negative = pool[rng.below(pool.size())];
    }
    out.push_back(TripletSample{pr.dup_id, pr.orig_id, negative});
  }
  return out;
}

// One epoch of MNR batches: shuffle the train pairs under the seed, then cut
// consecutive non-overlapping windows of batch_size; a final short window is
// dropped so every batch has exactly batch_size in-batch negatives.
inline std::vector<PairBatch> sample_pair_batches(const SplitSpec& split, std::size_t batch_size,
                                                  std::uint64_t seed, std::size_t epoch = 0) {
  if (batch_size == 0) throw argument_error("sample_pair_batches: batch_size must be >= 1");
  if (batch_size > split.train_pairs.size()) {
    throw data_error("sample_pair_batches: batch size " + std::to_string(batch_size) +
                     " exceeds train pairs " + std::to_string(split.train_pairs.size()));
  }
  std::vector<DuplicatePair> shuffled = split.train_pairs;
  Rng rng(detail::epoch_seed(seed, kBatchStream, epoch));
  rng.shuffle(shuffled);
  std::vector<PairBatch> batches;
  const std::size_t n_batches = shuffled.size() / batch_size;
  batches.reserve(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b) {
    PairBatch batch;
    batch.anchors.reserve(batch_size);
    batch.positives.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
      const DuplicatePair& pr = shuffled[b * batch_size + i];
      batch.anchors.push_back(pr.dup_id);
      batch.positives.push_back(pr.orig_id);
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

}  // namespace dupdetect
