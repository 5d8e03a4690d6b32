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

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "dupdetect/binio.hpp"
#include "dupdetect/corpus.hpp"
#include "dupdetect/embedding.hpp"
#include "dupdetect/error.hpp"

namespace dupdetect {

struct RemoteStats {
  std::size_t cached = 0;         // present before the run
  std::size_t fetched = 0;        // newly embedded this run
  std::size_t skipped_empty = 0;  // empty-text posts, never sent
  std::size_t requests = 0;       // HTTP requests issued (including retries)
  std::size_t retries = 0;
};

namespace detail {

// base_url "http://host:port[/prefix]" -> (client root, path prefix).
inline std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
  const std::size_t scheme = base_url.find("://");
  if (scheme == std::string::npos) {
    throw config_error("remote: base_url must include a scheme: " + base_url);
  }
  const std::size_t path = base_url.find('/', scheme + 3);
  if (path == std::string::npos) return {base_url, ""};
  std::string prefix = base_url.substr(path);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, path), prefix};
}

inline bool retryable_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

// One /embeddings call with exponential backoff on transient failures.
// Returns one vector per input text, in input order.
inline std::vector<std::vector<float>> fetch_batch(httplib::Client& client,
                                                   const std::string& path,
                                                   const std::string& api_key,
                                                   const ProviderConfig& cfg,
                                                   const std::vector<std::string>& texts,
                                                   RemoteStats* stats) {
  nlohmann::json request{{"model", cfg.model_name}, {"input", texts}};
  const std::string body = request.dump();
  httplib::Headers headers{{"Authorization", "Bearer " + api_key}};

  httplib::Result res;
  for (std::size_t attempt = 0;; ++attempt) {
    if (stats) ++stats->requests;
    res = client.Post(path, headers, body, "application/json");
    const bool transient = !res || detail::retryable_status(res->status);
    if (res && res->status == 200) break;
    if (!transient) {
      throw io_error("remote: embeddings request failed with status " +
                     std::to_string(res->status));
    }
    if (attempt >= cfg.retry_limit) {
      throw io_error("remote: embeddings request failed after " +
                     std::to_string(cfg.retry_limit) + " retries (" +
                     (res ? "status " + std::to_string(res->status) : "no response") + ")");
    }
    if (stats) ++stats->retries;
    const auto delay = std::chrono::milliseconds(cfg.retry_base_ms << attempt);
    std::this_thread::sleep_for(delay);
  }

  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("remote: bad response JSON: ") + e.what());
  }
  if (!parsed.contains("data") || !parsed["data"].is_array() ||
      parsed["data"].size() != texts.size()) {
    throw format_error("remote: response data count mismatch");
  }
  std::vector<std::vector<float>> out(texts.size());
  try {
    for (std::size_t i = 0; i < parsed["data"].size(); ++i) {
      const auto& item = parsed["data"][i];
      // The API echoes an index per item; fall back to position if absent.
      std::size_t slot = i;
      if (item.contains("index")) slot = item.at("index").get<std::size_t>();
      if (slot >= out.size() || !out[slot].empty()) {
        throw format_error("remote: bad response item index");
      }
      out[slot] = item.at("embedding").get<std::vector<float>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("remote: bad response item: ") + e.what());
  }
  return out;
}

// Crash-safe store flush: write a sibling temp file, then rename over.
inline void flush_store(const std::string& path, const EmbeddingStore& store) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out = binio::open_output(tmp);
    save_store(out, store);
    binio::finish_output(out, tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw io_error("remote: cannot replace cache file " + path + ": " + ec.message());
}

}  // namespace detail

// Embeds every nonempty post through the OpenAI-compatible endpoint at
// cfg.base_url. The output store file doubles as the cache: when it already
// exists it is loaded first and only missing ids are fetched, and progress is
// flushed after every batch, so an aborted run keeps its partial cache.
inline EmbeddingStore embed_corpus_remote(const Corpus& corpus, const ProviderConfig& cfg,
                                          const std::string& cache_path,
                                          RemoteStats* stats = nullptr) {
  cfg.validate();
  const char* key = std::getenv("DUPDETECT_API_KEY");
  if (key == nullptr || *key == '\0') {
    throw config_error("remote: DUPDETECT_API_KEY is not set");
  }

  EmbeddingStore store;
  if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
    std::ifstream in = binio::open_input(cache_path);
    store = load_store(in, cache_path);
  }
  store.set_provider_tag("remote");
  if (stats) stats->cached = store.size();

  std::vector<std::pair<std::uint64_t, std::string>> missing;
  for (const Post& post : corpus.posts) {
    if (post.empty_text()) {
      if (stats) ++stats->skipped_empty;
      continue;
    }
    if (store.contains(post.id)) continue;
    missing.emplace_back(post.id, build_input(post, cfg.max_tokens));
  }
  if (missing.empty()) return store;

  auto [root, prefix] = detail::split_base_url(cfg.base_url);
  httplib::Client client(root);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);
  const std::string path = prefix + "/embeddings";

  const std::size_t batch = cfg.batch_size == 0 ? 1 : cfg.batch_size;
  for (std::size_t start = 0; start < missing.size(); start += batch) {
    const std::size_t stop = std::min(missing.size(), start + batch);
    std::vector<std::string> texts;
    texts.reserve(stop - start);
    for (std::size_t i = start; i < stop; ++i) texts.push_back(missing[i].second);

    std::vector<std::vector<float>> vectors;
    try {
      vectors = detail::fetch_batch(client, path, key, cfg, texts, stats);
    } catch (...) {
      // Abort with the partial cache intact.
      if (!cache_path.empty() && store.size() > 0) detail::flush_store(cache_path, store);
      throw;
    }
    for (std::size_t i = start; i < stop; ++i) {
      auto& vec = vectors[i - start];
      if (store.dim() == 0) {
        // First vector fixes the store dimension (the server dictates it).
        if (vec.empty()) throw format_error("remote: empty embedding in response");
        store = EmbeddingStore(static_cast<std::uint32_t>(vec.size()), "remote");
        if (stats) stats->cached = 0;
      }
      store.insert(missing[i].first, std::move(vec));
      if (stats) ++stats->fetched;
    }
    if (!cache_path.empty()) detail::flush_store(cache_path, store);
  }
  return store;
}

}  // namespace dupdetect
