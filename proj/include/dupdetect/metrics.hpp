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
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "dupdetect/corpus.hpp"
#include "dupdetect/embedding.hpp"
#include "dupdetect/error.hpp"
#include "dupdetect/index.hpp"
#include "dupdetect/rng.hpp"
#include "dupdetect/split.hpp"
#include "dupdetect/train.hpp"

namespace dupdetect {

inline const std::vector<std::size_t>& default_top_ns() {
  static const std::vector<std::size_t> ns = {1, 3, 5, 10, 30};
  return ns;
}

struct MetricsReport {
  std::string label;
  std::map<std::size_t, double> top_n;  // N -> accuracy, non-decreasing in N
  double auc = 0.0;
  std::size_t query_count = 0;       // queries actually evaluated
  std::size_t excluded_queries = 0;  // query or all its originals absent from the pool
  std::size_t pool_size = 0;

  nlohmann::json to_json() const {
    nlohmann::json tn = nlohmann::json::array();
    for (const auto& [n, acc] : top_n) {
      tn.push_back(nlohmann::json::array({n, acc}));
    }
    return nlohmann::json{
        {"label", label},
        {"top_n", tn},
        {"auc", auc},
        {"query_count", query_count},
        {"excluded_queries", excluded_queries},
        {"pool_size", pool_size},
    };
  }
};

// Top-N over the deployment-shaped pool: every indexed post except the query.
// Queries are the distinct dup_ids of the test pairs; a query hits at N when
// ANY of its labeled originals appears in the top N. Queries that are absent
// from the index, or whose originals all are, are excluded and counted.
inline std::map<std::size_t, double> top_n_accuracy(const LatentIndex& index,
                                                    std::span<const DuplicatePair> test_pairs,
                                                    std::span<const std::size_t> ns,
                                                    std::size_t* query_count = nullptr,
                                                    std::size_t* excluded_queries = nullptr) {
  if (test_pairs.empty()) throw data_error("top_n_accuracy: empty test set");
  if (ns.empty()) throw argument_error("top_n_accuracy: no N values");
  std::map<std::uint64_t, std::set<std::uint64_t>> originals;  // query -> labels
  for (const DuplicatePair& pr : test_pairs) originals[pr.dup_id].insert(pr.orig_id);

  const std::size_t max_n = *std::max_element(ns.begin(), ns.end());
  std::map<std::size_t, std::size_t> hits;
  for (std::size_t n : ns) hits[n] = 0;
  std::size_t evaluated = 0;
  std::size_t excluded = 0;
  for (const auto& [query, labels] : originals) {
    if (!index.position(query)) {
      ++excluded;
      continue;
    }
    bool any_label_in_pool = false;
    for (std::uint64_t label : labels) {
      if (index.position(label)) {
        any_label_in_pool = true;
        break;
      }
    }
    if (!any_label_in_pool) {
      ++excluded;
      continue;
    }
    ++evaluated;
    const RankedList ranked = top_k(index, query, max_n);
    std::size_t first_hit_rank = 0;  // 1-based; 0 = no labeled original in top max_n
    for (std::size_t i = 0; i < ranked.hits.size(); ++i) {
      if (labels.count(ranked.hits[i].id)) {
        first_hit_rank = i + 1;
        break;
      }
    }
    if (first_hit_rank == 0) continue;
    for (std::size_t n : ns) {
      if (first_hit_rank <= n) ++hits[n];
    }
  }
  if (evaluated == 0) throw data_error("top_n_accuracy: no evaluable queries");
  if (query_count) *query_count = evaluated;
  if (excluded_queries) *excluded_queries = excluded;
  std::map<std::size_t, double> acc;
  for (std::size_t n : ns) {
    acc[n] = static_cast<double>(hits[n]) / static_cast<double>(evaluated);
  }
  return acc;
}

// Mann-Whitney AUC via rank sums with average ranks on ties:
// (#{p > n} + 0.5 * #{p = n}) / (|pos| * |neg|), O((P+Q) log(P+Q)).
inline double auc(std::span<const double> scores_pos, std::span<const double> scores_neg) {
  if (scores_pos.empty() || scores_neg.empty()) {
    throw data_error("auc: empty score set");
  }
  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> all;
  all.reserve(scores_pos.size() + scores_neg.size());
  for (double s : scores_pos) all.push_back({s, true});
  for (double s : scores_neg) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Entry& a, const Entry& b) { return a.score < b.score; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    // Tied block occupies ranks i+1 .. j; every member gets the average.
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (all[t].positive) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(scores_pos.size());
  const double q = static_cast<double>(scores_neg.size());
  const double u = rank_sum_pos - p * (p + 1.0) / 2.0;
  return u / (p * q);
}

inline constexpr std::uint64_t kAucStream = 0x617563;  // "auc"

// Ranking-as-classification AUC: positives are the test duplicate pairs'
// similarities, negatives are neg_ratio * |pos| seeded-uniform draws over
// post pairs not annotated as duplicates (in either direction, over ALL
// corpus pairs, so train-set duplicates are never mislabeled negative).
inline double pairwise_auc_eval(const LatentIndex& index, const Corpus& corpus,
                                std::span<const DuplicatePair> test_pairs, std::size_t neg_ratio,
                                std::uint64_t seed) {
  if (neg_ratio < 1) throw argument_error("pairwise_auc_eval: neg_ratio must be >= 1");
  std::vector<double> pos;
  for (const DuplicatePair& pr : test_pairs) {
    const auto a = index.position(pr.dup_id);
    const auto b = index.position(pr.orig_id);
    if (!a || !b) continue;  // endpoint not embedded: excluded, mirrored in top-N
    pos.push_back(dot(index.row(*a), index.row(*b)));
  }
  if (pos.empty()) throw data_error("pairwise_auc_eval: no scorable positive pairs");
  if (index.size() < 2) throw data_error("pairwise_auc_eval: index too small for negatives");

  std::unordered_map<std::uint64_t, std::unordered_set<std::uint64_t>> annotated;
  for (const DuplicatePair& pr : corpus.pairs) {
    annotated[pr.dup_id].insert(pr.orig_id);
    annotated[pr.orig_id].insert(pr.dup_id);
  }
  auto is_annotated = [&](std::uint64_t x, std::uint64_t y) {
    auto it = annotated.find(x);
    return it != annotated.end() && it->second.count(y) > 0;
  };

  const std::size_t want = neg_ratio * pos.size();
  std::vector<double> neg;
  neg.reserve(want);
  Rng rng(derive_seed(seed, kAucStream));
  std::size_t attempts = 0;
  const std::size_t max_attempts = 1000 * want + 1000;
  while (neg.size() < want) {
    if (++attempts > max_attempts) {
      throw data_error("pairwise_auc_eval: cannot sample enough non-duplicate pairs");
    }
    const std::size_t i = rng.below(index.size());
    const std::size_t j = rng.below(index.size());
    if (i == j) continue;
    if (is_annotated(index.ids[i], index.ids[j])) continue;
    neg.push_back(dot(index.row(i), index.row(j)));
  }
  return auc(pos, neg);
}

inline MetricsReport evaluate_index(const LatentIndex& index, const Corpus& corpus,
                                    std::span<const DuplicatePair> test_pairs,
                                    std::span<const std::size_t> ns, std::size_t neg_ratio,
                                    std::uint64_t seed, std::string label) {
  MetricsReport report;
  report.label = std::move(label);
  report.pool_size = index.size();
  report.top_n =
      top_n_accuracy(index, test_pairs, ns, &report.query_count, &report.excluded_queries);
  report.auc = pairwise_auc_eval(index, corpus, test_pairs, neg_ratio, seed);
  return report;
}

// One evaluation setting: the raw normalized store, or a head trained here.
struct CompareSetting {
  std::string label;
  bool raw = false;
  TrainingConfig config;  // ignored when raw
};

// Evaluates every setting over the identical split and pool, mirroring the
// raw / triplet / mnr comparison table.
inline std::vector<MetricsReport> compare_settings(const Corpus& corpus, const SplitSpec& split,
                                                   const EmbeddingStore& store,
                                                   std::span<const CompareSetting> settings,
                                                   std::span<const std::size_t> ns,
                                                   std::size_t neg_ratio,
                                                   std::uint64_t auc_seed) {
  if (settings.empty()) throw argument_error("compare_settings: no settings");
  std::vector<MetricsReport> reports;
  reports.reserve(settings.size());
  for (const CompareSetting& s : settings) {
    LatentIndex index;
    if (s.raw) {
      index = build_index(store, nullptr);
    } else {
      auto [head, log] = train(corpus, split, store, s.config);
      index = project(store, head);
    }
    reports.push_back(evaluate_index(index, corpus, split.test_pairs, ns, neg_ratio, auc_seed,
                                     s.label));
  }
  return reports;
}

// One row per batch size, everything else held fixed (the batch-size sweep
// table). Sizes exceeding the usable train-pair count are reported as errors
// by the sampler, not silently shrunk.
inline std::vector<MetricsReport> sweep_batch_sizes(const Corpus& corpus, const SplitSpec& split,
                                                    const EmbeddingStore& store,
                                                    const TrainingConfig& base,
                                                    std::span<const std::size_t> batch_sizes,
                                                    std::span<const std::size_t> ns,
                                                    std::size_t neg_ratio,
                                                    std::uint64_t auc_seed) {
  std::vector<MetricsReport> reports;
  reports.reserve(batch_sizes.size());
  for (std::size_t bs : batch_sizes) {
    TrainingConfig cfg = base;
    cfg.batch_size = bs;
    auto [head, log] = train(corpus, split, store, cfg);
    const LatentIndex index = project(store, head);
    reports.push_back(evaluate_index(index, corpus, split.test_pairs, ns, neg_ratio, auc_seed,
                                     "batch-" + std::to_string(bs)));
  }
  return reports;
}

// CSV with rows = N and columns = settings (the Top-N comparison layout).
inline void write_compare_csv(std::ostream& out, std::span<const MetricsReport> reports) {
  if (reports.empty()) throw argument_error("write_compare_csv: no reports");
  out << "N";
  for (const MetricsReport& r : reports) out << ',' << r.label;
  out << '\n';
  char buf[64];
  for (const auto& [n, _] : reports.front().top_n) {
    out << n;
    for (const MetricsReport& r : reports) {
      const auto it = r.top_n.find(n);
      if (it == r.top_n.end()) throw data_error("write_compare_csv: inconsistent N sets");
      std::snprintf(buf, sizeof(buf), "%.9g", it->second);
      out << ',' << buf;
    }
    out << '\n';
  }
}

inline nlohmann::json reports_to_json(std::span<const MetricsReport> reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const MetricsReport& r : reports) arr.push_back(r.to_json());
  return arr;
}

}  // namespace dupdetect
