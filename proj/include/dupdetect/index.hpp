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
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dupdetect/binio.hpp"
#include "dupdetect/corpus.hpp"
#include "dupdetect/embedding.hpp"
#include "dupdetect/error.hpp"
#include "dupdetect/loss.hpp"
#include "dupdetect/projection.hpp"

namespace dupdetect {

// Flat, id-sorted array of unit-normalized latents. Because rows are unit
// vectors, cosine similarity at query time is a plain inner product.
struct LatentIndex {
  std::uint32_t dim = 0;
  std::vector<std::uint64_t> ids;  // ascending
  std::vector<float> vectors;      // ids.size() x dim, row-major
  std::string provider_tag;        // in-memory provenance; not persisted

  std::size_t size() const { return ids.size(); }

  std::optional<std::size_t> position(std::uint64_t id) const {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - ids.begin());
  }

  std::span<const float> row(std::size_t pos) const {
    return {vectors.data() + pos * dim, dim};
  }
};

// Maps every stored vector through the head (or the identity when head is
// null, for raw-embedding baselines) and L2-normalizes. Zero-norm latents are
// rejected per item and counted, never silently kept.
inline LatentIndex build_index(const EmbeddingStore& store, const ProjectionHead* head,
                               std::size_t* rejected = nullptr) {
  if (head && head->in_dim != store.dim()) {
    throw config_error("project: store dim " + std::to_string(store.dim()) +
                       " != head in_dim " + std::to_string(head->in_dim));
  }
  if (rejected) *rejected = 0;
  LatentIndex index;
  index.dim = head ? head->out_dim : store.dim();
  index.provider_tag = store.provider_tag();
  index.ids.reserve(store.size());
  index.vectors.reserve(store.size() * index.dim);
  std::vector<double> latent;
  for (const auto& [id, values] : store.vectors()) {
    if (head) {
      latent = head->apply(values);
    } else {
      latent.assign(values.begin(), values.end());
    }
    const double norm = l2_norm(std::span<const double>(latent));
    if (norm == 0.0) {
      if (rejected) ++*rejected;
      continue;
    }
    index.ids.push_back(id);
    for (double v : latent) index.vectors.push_back(static_cast<float>(v / norm));
  }
  return index;
}

inline LatentIndex project(const EmbeddingStore& store, const ProjectionHead& head,
                           std::size_t* rejected = nullptr) {
  return build_index(store, &head, rejected);
}

// index.lat layout: "LAT1" | u32 dim | u64 count | count x (u64 id, dim x f32).
inline void save_index(std::ostream& out, const LatentIndex& index) {
  binio::write_bytes(out, "LAT1", 4);
  binio::write_u32(out, index.dim);
  binio::write_u64(out, index.ids.size());
  for (std::size_t i = 0; i < index.ids.size(); ++i) {
    binio::write_u64(out, index.ids[i]);
    for (float v : index.row(i)) binio::write_f32(out, v);
  }
}

inline LatentIndex load_index(std::istream& in, const std::string& name = "index") {
  binio::Reader r(in, name);
  r.expect_magic("LAT1");
  LatentIndex index;
  index.dim = r.read_u32();
  if (index.dim == 0) throw format_error(name + ": dim must be > 0");
  const std::uint64_t count = r.read_u64();
  index.ids.reserve(count);
  index.vectors.reserve(count * index.dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    index.ids.push_back(r.read_u64());
    double norm_sq = 0.0;
    for (std::uint32_t d = 0; d < index.dim; ++d) {
      const float v = r.read_f32();
      if (!std::isfinite(v)) {
        throw format_error(name + ": non-finite value for id " +
                           std::to_string(index.ids.back()));
      }
      norm_sq += static_cast<double>(v) * static_cast<double>(v);
      index.vectors.push_back(v);
    }
    if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-6) {
      throw format_error(name + ": vector for id " + std::to_string(index.ids.back()) +
                         " is not unit-normalized");
    }
  }
  if (!r.at_eof()) throw format_error(name + ": trailing bytes");
  // Tolerate any record order on disk, but ids must be unique.
  std::vector<std::size_t> perm(index.ids.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(),
            [&](std::size_t a, std::size_t b) { return index.ids[a] < index.ids[b]; });
  bool sorted = true;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] != i) {
      sorted = false;
      break;
    }
  }
  if (!sorted) {
    LatentIndex tmp;
    tmp.dim = index.dim;
    tmp.ids.reserve(index.ids.size());
    tmp.vectors.reserve(index.vectors.size());
    for (std::size_t p : perm) {
      tmp.ids.push_back(index.ids[p]);
      const auto row = index.row(p);
      tmp.vectors.insert(tmp.vectors.end(), row.begin(), row.end());
    }
    index = std::move(tmp);
  }
  for (std::size_t i = 1; i < index.ids.size(); ++i) {
    if (index.ids[i] == index.ids[i - 1]) {
      throw format_error(name + ": duplicate id " + std::to_string(index.ids[i]));
    }
  }
  return index;
}

struct RankedHit {
  std::uint64_t id = 0;
  double score = 0.0;
};

// Scores non-increasing; ties broken by ascending id; the query id itself
// never appears.
struct RankedList {
  std::uint64_t query_id = 0;
  std::vector<RankedHit> hits;
};

namespace detail {

// Strict total order: higher score first, then lower id. Usable both as the
// heap comparator and for the final sort, so heap search is exactly the
// brute-force order.
inline bool ranks_before(const RankedHit& a, const RankedHit& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.id < b.id;
}

// Bounded top-k selection: min-heap (front = worst kept hit) over the
// ranks_before order.
class TopKHeap {
 public:
  explicit TopKHeap(std::size_t k) : k_(k) {}

  void offer(const RankedHit& hit) {
    if (heap_.size() < k_) {
      heap_.push_back(hit);
      std::push_heap(heap_.begin(), heap_.end(), ranks_before);
    } else if (ranks_before(hit, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), ranks_before);
      heap_.back() = hit;
      std::push_heap(heap_.begin(), heap_.end(), ranks_before);
    }
  }

  std::vector<RankedHit> take_sorted() {
    std::sort(heap_.begin(), heap_.end(), ranks_before);
    return std::move(heap_);
  }

 private:
  std::size_t k_;
  std::vector<RankedHit> heap_;
};

inline bool shares_filter_tag(const Post& post, std::span<const std::string> tag_filter) {
  for (const auto& tag : tag_filter) {
    if (post.has_tag(tag)) return true;
  }
  return false;
}

}  // namespace detail

// Exact top-k by inner product over every candidate except the query itself.
// A nonempty tag_filter restricts candidates to posts sharing >= 1 tag with
// the filter set; tags live in the corpus, so a corpus is required then.
inline RankedList top_k(const LatentIndex& index, std::uint64_t query_id, std::size_t k,
                        std::span<const std::string> tag_filter = {},
                        const Corpus* corpus = nullptr) {
  if (k < 1) throw argument_error("top_k: k must be >= 1");
  const auto qpos = index.position(query_id);
  if (!qpos) throw data_error("top_k: query id " + std::to_string(query_id) + " not in index");
  if (!tag_filter.empty() && corpus == nullptr) {
    throw config_error("top_k: tag filter requires a corpus for tag lookup");
  }
  const std::span<const float> q = index.row(*qpos);
  detail::TopKHeap heap(k);
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (i == *qpos) continue;
    if (!tag_filter.empty()) {
      const Post* post = corpus->find(index.ids[i]);
      if (post == nullptr || !detail::shares_filter_tag(*post, tag_filter)) continue;
    }
    heap.offer(RankedHit{index.ids[i], dot(q, index.row(i))});
  }
  RankedList out;
  out.query_id = query_id;
  out.hits = heap.take_sorted();
  return out;
}

// Ad-hoc query over unseen text: embed with the offline provider, project,
// rank without self-exclusion (query_id 0 marks free text). The index must
// come from the same provider family.
inline RankedList top_k_text(const LatentIndex& index, const ProjectionHead& head,
                             const ProviderConfig& cfg, const std::string& text, std::size_t k) {
  if (k < 1) throw argument_error("top_k_text: k must be >= 1");
  if (cfg.kind != ProviderKind::offline_hash) {
    throw config_error("top_k_text: only the offline provider supports ad-hoc queries");
  }
  if (!index.provider_tag.empty() && index.provider_tag != "offline") {
    throw config_error("top_k_text: index was built from provider '" + index.provider_tag +
                       "', query uses 'offline'");
  }
  if (trim(text).empty()) throw argument_error("top_k_text: empty query text");
  if (cfg.dim != head.in_dim) {
    throw config_error("top_k_text: provider dim " + std::to_string(cfg.dim) +
                       " != head in_dim " + std::to_string(head.in_dim));
  }
  if (head.out_dim != index.dim) {
    throw config_error("top_k_text: head out_dim " + std::to_string(head.out_dim) +
                       " != index dim " + std::to_string(index.dim));
  }
  const std::vector<float> embedded = offline_embed_text(text, cfg.dim, cfg.seed);
  const std::vector<double> latent = head.apply(embedded);
  const double norm = l2_norm(std::span<const double>(latent));
  if (norm == 0.0) throw domain_error("top_k_text: zero-norm latent");
  std::vector<float> q(index.dim);
  for (std::uint32_t d = 0; d < index.dim; ++d) {
    q[d] = static_cast<float>(latent[d] / norm);
  }
  detail::TopKHeap heap(k);
  for (std::size_t i = 0; i < index.size(); ++i) {
    heap.offer(RankedHit{index.ids[i], dot(std::span<const float>(q), index.row(i))});
  }
  RankedList out;
  out.query_id = 0;
  out.hits = heap.take_sorted();
  return out;
}

// CSV: query_id, rank (1-based), candidate_id, score at 9 significant digits.
inline void write_ranked_csv(std::ostream& out, const RankedList& list) {
  out << "query_id,rank,candidate_id,score\n";
  char buf[64];
  for (std::size_t i = 0; i < list.hits.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g", list.hits[i].score);
    out << list.query_id << ',' << (i + 1) << ',' << list.hits[i].id << ',' << buf << '\n';
  }
}

}  // namespace dupdetect
