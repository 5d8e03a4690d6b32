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
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dupdetect/binio.hpp"
#include "dupdetect/corpus.hpp"
#include "dupdetect/error.hpp"
#include "dupdetect/util.hpp"

namespace dupdetect {

enum class ProviderKind { remote, offline_hash };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::offline_hash;
  std::string base_url;                              // remote
  std::string model_name = "text-embedding-ada-002"; // remote
  std::size_t max_tokens = 8191;
  std::uint32_t dim = 256;  // offline; remote dim is dictated by the server
  std::uint64_t seed = 0;   // offline
  std::size_t max_concurrency = 1;
  std::size_t retry_limit = 3;
  std::size_t batch_size = 64;      // texts per remote request
  std::size_t retry_base_ms = 100;  // exponential backoff base

  void validate() const {
    if (max_tokens == 0) throw config_error("provider: max_tokens must be > 0");
    if (dim == 0) throw config_error("provider: dim must be > 0");
    if (max_concurrency < 1) throw config_error("provider: max_concurrency must be >= 1");
    if (kind == ProviderKind::remote && base_url.empty()) {
      throw config_error("provider: remote requires base_url");
    }
  }
};

// Post-id keyed vectors of one shared dimension. provider_tag records
// provenance in memory; the on-disk format carries no tag.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  explicit EmbeddingStore(std::uint32_t dim, std::string provider_tag = "")
      : dim_(dim), provider_tag_(std::move(provider_tag)) {
    if (dim == 0) throw argument_error("store: dim must be > 0");
  }

  std::uint32_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  bool empty() const { return vectors_.empty(); }
  const std::string& provider_tag() const { return provider_tag_; }
  void set_provider_tag(std::string tag) { provider_tag_ = std::move(tag); }

  bool contains(std::uint64_t id) const { return vectors_.count(id) > 0; }

  const std::vector<float>* find(std::uint64_t id) const {
    auto it = vectors_.find(id);
    return it == vectors_.end() ? nullptr : &it->second;
  }

  const std::vector<float>& at(std::uint64_t id) const {
    auto it = vectors_.find(id);
    if (it == vectors_.end()) {
      throw data_error("store: no vector for id " + std::to_string(id));
    }
    return it->second;
  }

  void insert(std::uint64_t id, std::vector<float> values) {
    if (dim_ == 0) throw domain_error("store: dim not set");
    if (values.size() != dim_) {
      throw data_error("store: vector for id " + std::to_string(id) + " has dim " +
                       std::to_string(values.size()) + ", store dim " + std::to_string(dim_));
    }
    for (float v : values) {
      if (!std::isfinite(v)) {
        throw domain_error("store: non-finite value for id " + std::to_string(id));
      }
    }
    if (!vectors_.emplace(id, std::move(values)).second) {
      throw data_error("store: duplicate id " + std::to_string(id));
    }
  }

  // Ordered by id; iteration order is the on-disk record order.
  const std::map<std::uint64_t, std::vector<float>>& vectors() const { return vectors_; }

 private:
  std::uint32_t dim_ = 0;
  std::string provider_tag_;
  std::map<std::uint64_t, std::vector<float>> vectors_;
};

// Tokens are approximated as ceil(chars / 4); the server-side limit is the
// backstop for the remote provider.
inline std::size_t approx_token_count(std::string_view text) {
  return (text.size() + 3) / 4;
}

// Embedding input is the cleaned title and body joined by one newline,
// prefix-truncated to the token budget. Empty-text posts never reach this
// point (callers skip and count them).
inline std::string build_input(const Post& post, std::size_t max_tokens) {
  std::string s = post.title;
  s.push_back('\n');
  s += post.body;
  const std::size_t budget_chars = max_tokens * 4;
  if (s.size() > budget_chars) s.resize(budget_chars);
  return s;
}

namespace detail {

// Feeds the seed through the hash ahead of the token bytes, so different
// seeds give unrelated bucket assignments.
inline std::uint64_t seeded_token_hash(std::string_view token, std::uint64_t seed) {
  std::uint64_t h = kFnvOffsetBasis;
  for (int i = 0; i < 8; ++i) {
    h = (h ^ ((seed >> (8 * i)) & 0xff)) * kFnvPrime;
  }
  for (char c : token) {
    h = (h ^ static_cast<unsigned char>(c)) * kFnvPrime;
  }
  return h;
}

}  // namespace detail

// Deterministic stand-in provider: lowercase, split on non-alphanumerics,
// signed feature hashing into dim buckets, L2-normalized. Depends only on
// (text, dim, seed) — no environment, no ordering effects.
inline std::vector<float> offline_embed_text(std::string_view text, std::uint32_t dim,
                                             std::uint64_t seed) {
  if (dim == 0) throw argument_error("offline_embed_text: dim must be > 0");
  std::vector<double> acc(dim, 0.0);
  std::size_t tokens = 0;
  std::size_t i = 0;
  std::string token;
  while (i < text.size()) {
    while (i < text.size() && !ascii_alnum(text[i])) ++i;
    token.clear();
    while (i < text.size() && ascii_alnum(text[i])) token.push_back(ascii_lower(text[i++]));
    if (token.empty()) break;
    ++tokens;
    const std::uint64_t h = detail::seeded_token_hash(token, seed);
    const std::uint32_t bucket = static_cast<std::uint32_t>(h % dim);
    const double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
    acc[bucket] += sign;
  }
  if (tokens == 0) {
    throw domain_error("offline_embed_text: no tokens (would yield a zero vector)");
  }
  double norm_sq = 0.0;
  for (double v : acc) norm_sq += v * v;
  // Signed counts can cancel within a bucket but not across all buckets to
  // exactly zero unless every bucket cancels; guard anyway.
  if (norm_sq == 0.0) {
    throw domain_error("offline_embed_text: zero vector after hashing");
  }
  const double inv = 1.0 / std::sqrt(norm_sq);
  std::vector<float> out(dim);
  for (std::uint32_t d = 0; d < dim; ++d) out[d] = static_cast<float>(acc[d] * inv);
  return out;
}

struct EmbedStats {
  std::size_t embedded = 0;
  std::size_t skipped_empty = 0;      // cleaned text empty
  std::size_t skipped_no_tokens = 0;  // nonempty text, no hashable tokens
};

inline EmbeddingStore embed_corpus_offline(const Corpus& corpus, const ProviderConfig& cfg,
                                           EmbedStats* stats = nullptr) {
  cfg.validate();
  EmbeddingStore store(cfg.dim, "offline");
  for (const Post& post : corpus.posts) {
    if (post.empty_text()) {
      if (stats) ++stats->skipped_empty;
      continue;
    }
    const std::string input = build_input(post, cfg.max_tokens);
    try {
      store.insert(post.id, offline_embed_text(input, cfg.dim, cfg.seed));
    } catch (const Error& e) {
      if (e.klass() == ErrorClass::domain) {
        if (stats) ++stats->skipped_no_tokens;
        continue;
      }
      throw;
    }
    if (stats) ++stats->embedded;
  }
  return store;
}

// store.emb layout: "EMB1" | u32 dim | u64 count | count x (u64 id, dim x f32).
inline void save_store(std::ostream& out, const EmbeddingStore& store) {
  binio::write_bytes(out, "EMB1", 4);
  binio::write_u32(out, store.dim());
  binio::write_u64(out, store.size());
  for (const auto& [id, values] : store.vectors()) {
    binio::write_u64(out, id);
    for (float v : values) binio::write_f32(out, v);
  }
}

inline EmbeddingStore load_store(std::istream& in, const std::string& name = "store") {
  binio::Reader r(in, name);
  r.expect_magic("EMB1");
  const std::uint32_t dim = r.read_u32();
  const std::uint64_t count = r.read_u64();
  if (dim == 0) {
    // Degenerate but well-formed: a store that never saw a vector (the remote
    // provider can produce one when there is nothing to embed).
    if (count != 0 || !r.at_eof()) throw format_error(name + ": dim 0 with records");
    return EmbeddingStore();
  }
  EmbeddingStore store(dim);
  std::vector<float> values(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t id = r.read_u64();
    for (std::uint32_t d = 0; d < dim; ++d) {
      values[d] = r.read_f32();
      if (!std::isfinite(values[d])) {
        throw format_error(name + ": non-finite value in vector for id " + std::to_string(id));
      }
    }
    try {
      store.insert(id, values);
    } catch (const Error&) {
      throw format_error(name + ": duplicate id " + std::to_string(id));
    }
  }
  if (!r.at_eof()) throw format_error(name + ": trailing bytes");
  return store;
}

}  // namespace dupdetect
