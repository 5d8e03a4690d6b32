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
#include <functional>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dupdetect/corpus.hpp"

namespace dupdetect {

struct TopicStats {
  std::size_t dup_posts = 0;    // posts with this tag appearing as dup_id
  std::size_t dup_pairs = 0;    // pairs whose dup post carries this tag
  std::size_t total_posts = 0;  // posts with this tag
  double ratio = 0.0;           // dup_posts / total_posts
};

struct CensusReport {
  std::map<std::string, TopicStats> per_topic;
  double common_tag_rate = 0.0;     // pairs sharing >= 1 tag
  double mean_dups_per_post = 0.0;  // counterparts per annotated duplicate post
  double single_dup_fraction = 0.0; // duplicate posts with exactly one counterpart
  // Duplication read as a transitive relation: equivalence classes over pair
  // endpoints and the implied (unordered) pair count. Informational only;
  // training always uses pairs exactly as annotated.
  std::size_t closure_classes = 0;
  std::size_t closure_pairs = 0;
  bool degenerate = false;  // no pairs: the per-pair fractions are reported as 0
};

// Per-pair statistics attribute a pair to the topics of its duplicate-side
// post; dup_posts counts tagged posts that appear as dup_id at least once,
// which keeps ratio = dup_posts / total_posts inside [0, 1] by construction.
inline CensusReport census(const Corpus& corpus) {
  CensusReport report;
  std::unordered_set<std::uint64_t> dup_ids;
  std::unordered_map<std::uint64_t, std::size_t> counterparts;
  for (const DuplicatePair& pr : corpus.pairs) {
    dup_ids.insert(pr.dup_id);
    ++counterparts[pr.dup_id];
  }

  for (const Post& p : corpus.posts) {
    const bool is_dup = dup_ids.count(p.id) > 0;
    for (const auto& tag : p.tags) {
      TopicStats& t = report.per_topic[tag];
      ++t.total_posts;
      if (is_dup) ++t.dup_posts;
    }
  }
  std::size_t shared = 0;
  for (const DuplicatePair& pr : corpus.pairs) {
    const Post* dup = corpus.find(pr.dup_id);
    const Post* orig = corpus.find(pr.orig_id);
    for (const auto& tag : dup->tags) {
      ++report.per_topic[tag].dup_pairs;
    }
    bool common = false;
    for (const auto& tag : dup->tags) {
      if (orig->has_tag(tag)) {
        common = true;
        break;
      }
    }
    if (common) ++shared;
  }
  for (auto& [tag, t] : report.per_topic) {
    t.ratio = t.total_posts == 0 ? 0.0
                                 : static_cast<double>(t.dup_posts) /
                                       static_cast<double>(t.total_posts);
  }

  if (corpus.pairs.empty()) {
    report.degenerate = true;
    return report;
  }
  report.common_tag_rate =
      static_cast<double>(shared) / static_cast<double>(corpus.pairs.size());
  report.mean_dups_per_post =
      static_cast<double>(corpus.pairs.size()) / static_cast<double>(dup_ids.size());
  std::size_t single = 0;
  for (const auto& [id, n] : counterparts) {
    if (n == 1) ++single;
  }
  report.single_dup_fraction =
      static_cast<double>(single) / static_cast<double>(dup_ids.size());

  // Union-find over pair endpoints for the transitive view.
  std::unordered_map<std::uint64_t, std::uint64_t> parent;
  std::function<std::uint64_t(std::uint64_t)> find_root = [&](std::uint64_t x) {
    auto it = parent.find(x);
    if (it == parent.end() || it->second == x) return x;
    std::uint64_t root = find_root(it->second);
    it->second = root;
    return root;
  };
  for (const DuplicatePair& pr : corpus.pairs) {
    parent.emplace(pr.dup_id, pr.dup_id);
    parent.emplace(pr.orig_id, pr.orig_id);
    std::uint64_t a = find_root(pr.dup_id);
    std::uint64_t b = find_root(pr.orig_id);
    if (a != b) parent[a] = b;
  }
  std::unordered_map<std::uint64_t, std::size_t> class_size;
  for (const auto& [id, _] : parent) ++class_size[find_root(id)];
  report.closure_classes = class_size.size();
  for (const auto& [root, n] : class_size) {
    report.closure_pairs += n * (n - 1) / 2;
  }
  return report;
}

namespace detail {

inline std::string csv_quote(const std::string& field) {
  bool needs = field.find_first_of(",\"\n") != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace detail

// One row per topic, largest duplicate populations first. An empty corpus
// still yields the header (a zero-filled table has no rows).
inline void write_census_csv(std::ostream& out, const CensusReport& report) {
  out << "topic,dup_posts,dup_pairs,total_posts,ratio\n";
  std::vector<const std::pair<const std::string, TopicStats>*> rows;
  rows.reserve(report.per_topic.size());
  for (const auto& entry : report.per_topic) rows.push_back(&entry);
  std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
    if (a->second.dup_posts != b->second.dup_posts) {
      return a->second.dup_posts > b->second.dup_posts;
    }
    return a->first < b->first;
  });
  char buf[64];
  for (const auto* row : rows) {
    std::snprintf(buf, sizeof(buf), "%.9g", row->second.ratio);
    out << detail::csv_quote(row->first) << ',' << row->second.dup_posts << ','
        << row->second.dup_pairs << ',' << row->second.total_posts << ',' << buf << '\n';
  }
}

}  // namespace dupdetect
