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
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dupdetect/corpus.hpp"
#include "dupdetect/embedding.hpp"
#include "dupdetect/error.hpp"
#include "dupdetect/gradient.hpp"
#include "dupdetect/projection.hpp"
#include "dupdetect/sampler.hpp"
#include "dupdetect/split.hpp"

namespace dupdetect {

enum class LossKind { triplet, mnr };

inline const char* to_string(LossKind k) {
  return k == LossKind::triplet ? "triplet" : "mnr";
}

inline LossKind loss_kind_from_string(const std::string& s) {
  if (s == "triplet") return LossKind::triplet;
  if (s == "mnr") return LossKind::mnr;
  throw argument_error("unknown loss '" + s + "' (expected triplet or mnr)");
}

struct TrainingConfig {
  LossKind loss = LossKind::mnr;
  double margin = 0.5;        // triplet, cosine-distance units
  double scale = 20.0;        // mnr inverse softmax temperature
  std::size_t batch_size = 64;
  std::size_t epochs = 10;
  // Plain SGD needs a step size that actually moves the head within the
  // default 10-epoch budget; 5e-2 trains both losses cleanly at scale 20.
  double learning_rate = 5e-2;
  std::uint64_t seed = 0;
  std::uint32_t out_dim = 50;

  void validate() const {
    if (margin < 0.0) throw config_error("train: margin must be >= 0");
    if (!(scale > 0.0)) throw config_error("train: scale must be > 0");
    if (batch_size < 1) throw config_error("train: batch_size must be >= 1");
    if (loss == LossKind::mnr && batch_size < 2) {
      throw config_error("train: mnr needs batch_size >= 2 to have any negative");
    }
    if (!(learning_rate > 0.0)) throw config_error("train: learning_rate must be > 0");
    if (out_dim == 0) throw config_error("train: out_dim must be > 0");
  }

  nlohmann::json to_json() const {
    return nlohmann::json{
        {"loss", to_string(loss)},       {"margin", margin},
        {"scale", scale},                {"batch_size", batch_size},
        {"epochs", epochs},              {"learning_rate", learning_rate},
        {"seed", seed},                  {"out_dim", out_dim},
    };
  }
};

struct TrainingLog {
  nlohmann::json config_echo;
  std::vector<double> epoch_mean_loss;
  double wall_ms = 0.0;
  std::string corpus_hash;
  std::size_t train_pairs_used = 0;
  std::size_t train_pairs_skipped = 0;  // endpoint missing from the store
  int threads = 1;                      // training is single-threaded by contract

  nlohmann::json to_json() const {
    return nlohmann::json{
        {"config", config_echo},
        {"epoch_mean_loss", epoch_mean_loss},
        {"wall_ms", wall_ms},
        {"corpus_hash", corpus_hash},
        {"train_pairs_used", train_pairs_used},
        {"train_pairs_skipped", train_pairs_skipped},
        {"threads", threads},
    };
  }
};

// Content hash over the canonical serialization; logs carry it so a training
// run can be tied back to its exact inputs.
inline std::uint64_t corpus_content_hash(const Corpus& corpus) {
  std::ostringstream buf(std::ios::binary);
  write_corpus(buf, corpus);
  const std::string bytes = buf.str();
  return fnv1a64(bytes.data(), bytes.size());
}

namespace detail {

inline void sgd_step(ProjectionHead& head, const HeadGradients& grads, double lr) {
  for (std::size_t i = 0; i < head.W.size(); ++i) {
    head.W[i] = static_cast<float>(static_cast<double>(head.W[i]) - lr * grads.dW[i]);
  }
  for (std::size_t i = 0; i < head.b.size(); ++i) {
    head.b[i] = static_cast<float>(static_cast<double>(head.b[i]) - lr * grads.db[i]);
  }
}

}  // namespace detail

// Plain SGD over the configured loss. Deterministic end to end: same
// (corpus, split, store, config) gives bit-identical parameters. Pairs whose
// endpoints lack embeddings (empty-text posts) are skipped and counted.
inline std::pair<ProjectionHead, TrainingLog> train(const Corpus& corpus, const SplitSpec& split,
                                                    const EmbeddingStore& store,
                                                    const TrainingConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();

  TrainingLog log;
  log.config_echo = config.to_json();
  log.corpus_hash = hex_u64(corpus_content_hash(corpus));

  SplitSpec usable;
  usable.seed = split.seed;
  usable.test_pairs = split.test_pairs;
  for (const DuplicatePair& pr : split.train_pairs) {
    if (store.contains(pr.dup_id) && store.contains(pr.orig_id)) {
      usable.train_pairs.push_back(pr);
    } else {
      ++log.train_pairs_skipped;
    }
  }
  log.train_pairs_used = usable.train_pairs.size();

  ProjectionHead head = ProjectionHead::init(store.dim(), config.out_dim, config.seed);
  if (config.epochs == 0) {
    log.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0).count();
    return {std::move(head), std::move(log)};
  }
  if (usable.train_pairs.empty()) {
    throw data_error("train: no usable train pairs (all endpoints missing embeddings)");
  }

  HeadGradients grads;
  std::vector<VecRef> ax, px, nx;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    if (config.loss == LossKind::mnr) {
      const auto batches =
          sample_pair_batches(usable, config.batch_size, config.seed, epoch);
      for (const PairBatch& batch : batches) {
        ax.clear();
        px.clear();
        for (std::size_t i = 0; i < batch.anchors.size(); ++i) {
          ax.push_back(store.at(batch.anchors[i]));
          px.push_back(store.at(batch.positives[i]));
        }
        grads.reset(head);
        const double loss = mnr_batch(head, ax, px, config.scale, &grads);
        detail::sgd_step(head, grads, config.learning_rate);
        loss_sum += loss * static_cast<double>(batch.anchors.size());
        loss_count += batch.anchors.size();
      }
    } else {
      // Triplet windows keep the short tail: each usable pair contributes to
      // every epoch regardless of batch size.
      const auto triplets = sample_triplets(corpus, usable, store, config.seed, epoch);
      for (std::size_t start = 0; start < triplets.size(); start += config.batch_size) {
        const std::size_t stop = std::min(triplets.size(), start + config.batch_size);
        ax.clear();
        px.clear();
        nx.clear();
        for (std::size_t i = start; i < stop; ++i) {
          ax.push_back(store.at(triplets[i].anchor));
          px.push_back(store.at(triplets[i].positive));
          nx.push_back(store.at(triplets[i].negative));
        }
        grads.reset(head);
        const double loss = triplet_batch(head, ax, px, nx, config.margin, &grads);
        detail::sgd_step(head, grads, config.learning_rate);
        loss_sum += loss * static_cast<double>(stop - start);
        loss_count += stop - start;
      }
    }
    if (loss_count == 0) {
      throw data_error("train: epoch produced no batches (batch size too large?)");
    }
    log.epoch_mean_loss.push_back(loss_sum / static_cast<double>(loss_count));
  }

  log.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0).count();
  return {std::move(head), std::move(log)};
}

}  // namespace dupdetect
