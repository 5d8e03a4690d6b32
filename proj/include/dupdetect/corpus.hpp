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
#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dupdetect/binio.hpp"
#include "dupdetect/clean.hpp"
#include "dupdetect/error.hpp"
#include "dupdetect/util.hpp"

namespace dupdetect {

struct Post {
  std::uint64_t id = 0;
  std::string title;  // cleaned
  std::string body;   // cleaned
  std::vector<std::string> tags;
  std::string created;

  bool has_tag(std::string_view tag) const {
    for (const auto& t : tags) {
      if (t == tag) return true;
    }
    return false;
  }

  // Cleaning may erase a post entirely; such posts stay in the corpus but are
  // excluded from embedding and training.
  bool empty_text() const { return title.empty() && body.empty(); }
};

// Annotated duplicate relation: dup_id was closed as a duplicate of orig_id.
struct DuplicatePair {
  std::uint64_t dup_id = 0;
  std::uint64_t orig_id = 0;

  friend bool operator==(const DuplicatePair&, const DuplicatePair&) = default;
};

struct IngestStats {
  std::size_t posts_read = 0;       // well-formed records
  std::size_t posts_malformed = 0;  // skipped, see warnings
  std::size_t posts_empty = 0;      // cleaned to nothing; kept but flagged
  std::size_t pairs_read = 0;
  std::size_t pairs_dropped_missing = 0;  // endpoint not in corpus
  std::size_t pairs_dropped_self = 0;
  std::size_t pairs_dropped_repeat = 0;
  std::vector<std::string> warnings;
};

// Invariant: posts sorted by id, ids unique; every pair endpoint resolves.
struct Corpus {
  std::vector<Post> posts;
  std::vector<DuplicatePair> pairs;  // ingest order

  const Post* find(std::uint64_t id) const {
    auto it = std::lower_bound(posts.begin(), posts.end(), id,
                               [](const Post& p, std::uint64_t v) { return p.id < v; });
    if (it == posts.end() || it->id != id) return nullptr;
    return &*it;
  }

  bool contains(std::uint64_t id) const { return find(id) != nullptr; }
};

namespace detail {

inline std::uint64_t parse_u64_field(std::string_view s, std::size_t line_no, const char* what) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw format_error("line " + std::to_string(line_no) + ": bad " + what + " '" +
                       std::string(s) + "'");
  }
  return value;
}

}  // namespace detail

// Parses one post per line. Cleaning is applied here so downstream stages
// only ever see cleaned text. A malformed line is a record-level failure:
// it is skipped with a warning, and only when malformed records exceed 10%
// of the input does ingestion fail as a whole. Posts cleaned down to nothing
// are kept (flagged via stats) and excluded later, at embedding time.
inline std::vector<Post> parse_posts_jsonl(std::istream& in, IngestStats* stats = nullptr,
                                           const CleaningRules& rules = CleaningRules::defaults(),
                                           std::size_t max_run = 200) {
  std::vector<Post> posts;
  std::string line;
  std::size_t line_no = 0;
  std::size_t records = 0;
  std::size_t malformed = 0;
  auto warn = [&](const std::string& msg) {
    ++malformed;
    if (stats) {
      ++stats->posts_malformed;
      stats->warnings.push_back(msg);
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string sv = trim(line);
    if (sv.empty()) continue;
    ++records;
    Post p;
    try {
      nlohmann::json j = nlohmann::json::parse(sv);
      p.id = j.at("id").get<std::uint64_t>();
      const auto raw_title = j.at("title").get<std::string>();
      const auto raw_body = j.at("body").get<std::string>();
      if (j.contains("tags")) p.tags = j.at("tags").get<std::vector<std::string>>();
      if (j.contains("created") && j.at("created").is_string()) {
        p.created = j.at("created").get<std::string>();
      }
      CleanedPost cleaned = strip_annotations(raw_title, raw_body, rules);
      p.title = cleaned.title;
      p.body = strip_bulky_artifacts(cleaned.body, max_run);
    } catch (const nlohmann::json::exception& e) {
      warn("posts line " + std::to_string(line_no) + ": " + e.what());
      continue;
    }
    if (stats) {
      ++stats->posts_read;
      if (p.title.empty() && p.body.empty()) ++stats->posts_empty;
    }
    posts.push_back(std::move(p));
  }
  if (records > 0 && malformed * 10 > records) {
    throw format_error("posts: " + std::to_string(malformed) + " of " + std::to_string(records) +
                       " records malformed (over 10%)");
  }
  std::sort(posts.begin(), posts.end(),
            [](const Post& a, const Post& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < posts.size(); ++i) {
    if (posts[i].id == posts[i - 1].id) {
      throw data_error("duplicate post id " + std::to_string(posts[i].id));
    }
  }
  return posts;
}

// Header must be "dup_id,orig_id". Pairs referencing posts absent from the
// corpus, self pairs, and exact repeats are dropped (counted in stats);
// survivors keep input order.
inline std::vector<DuplicatePair> parse_pairs_csv(std::istream& in, const Corpus& corpus,
                                                  IngestStats* stats = nullptr) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw format_error("pairs: empty file");
  ++line_no;
  if (trim(line) != "dup_id,orig_id") {
    throw format_error("pairs: expected header 'dup_id,orig_id', got '" +
                       std::string(trim(line)) + "'");
  }
  std::vector<DuplicatePair> pairs;
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string sv = trim(line);
    if (sv.empty()) continue;
    std::size_t comma = sv.find(',');
    if (comma == std::string_view::npos || sv.find(',', comma + 1) != std::string_view::npos) {
      throw format_error("pairs line " + std::to_string(line_no) + ": expected two fields");
    }
    DuplicatePair pr;
    pr.dup_id = detail::parse_u64_field(trim(sv.substr(0, comma)), line_no, "dup_id");
    pr.orig_id = detail::parse_u64_field(trim(sv.substr(comma + 1)), line_no, "orig_id");
    if (stats) ++stats->pairs_read;
    if (pr.dup_id == pr.orig_id) {
      if (stats) ++stats->pairs_dropped_self;
      continue;
    }
    if (!corpus.contains(pr.dup_id) || !corpus.contains(pr.orig_id)) {
      if (stats) ++stats->pairs_dropped_missing;
      continue;
    }
    if (!seen.insert({pr.dup_id, pr.orig_id}).second) {
      if (stats) ++stats->pairs_dropped_repeat;
      continue;
    }
    pairs.push_back(pr);
  }
  return pairs;
}

inline Corpus ingest_corpus(std::istream& posts_jsonl, std::istream& pairs_csv,
                            IngestStats* stats = nullptr,
                            const CleaningRules& rules = CleaningRules::defaults(),
                            std::size_t max_run = 200) {
  Corpus corpus;
  corpus.posts = parse_posts_jsonl(posts_jsonl, stats, rules, max_run);
  corpus.pairs = parse_pairs_csv(pairs_csv, corpus, stats);
  return corpus;
}

// Restricts a corpus to one topic: posts carrying the tag, and pairs whose
// BOTH endpoints survive. Unknown tags yield an empty corpus, not an error.
inline Corpus filter_by_tag(const Corpus& corpus, std::string_view tag) {
  if (tag.empty()) throw argument_error("filter_by_tag: empty tag");
  Corpus out;
  for (const Post& p : corpus.posts) {
    if (p.has_tag(tag)) out.posts.push_back(p);
  }
  for (const DuplicatePair& pr : corpus.pairs) {
    if (out.contains(pr.dup_id) && out.contains(pr.orig_id)) out.pairs.push_back(pr);
  }
  return out;
}

// corpus.bin layout, little-endian:
//   "COR1" | u64 n_posts | posts | u64 n_pairs | pairs
//   post: u64 id | str title | str body | u32 n_tags | str... | str created
//   pair: u64 dup_id | u64 orig_id
//   str:  u32 length | bytes
inline void write_corpus(std::ostream& out, const Corpus& corpus) {
  binio::write_bytes(out, "COR1", 4);
  binio::write_u64(out, corpus.posts.size());
  for (const Post& p : corpus.posts) {
    binio::write_u64(out, p.id);
    binio::write_string(out, p.title);
    binio::write_string(out, p.body);
    binio::write_u32(out, static_cast<std::uint32_t>(p.tags.size()));
    for (const auto& t : p.tags) binio::write_string(out, t);
    binio::write_string(out, p.created);
  }
  binio::write_u64(out, corpus.pairs.size());
  for (const DuplicatePair& pr : corpus.pairs) {
    binio::write_u64(out, pr.dup_id);
    binio::write_u64(out, pr.orig_id);
  }
}

inline Corpus read_corpus(std::istream& in, const std::string& name = "corpus") {
  binio::Reader r(in, name);
  r.expect_magic("COR1");
  Corpus corpus;
  const std::uint64_t n_posts = r.read_u64();
  corpus.posts.reserve(n_posts);
  std::uint64_t prev_id = 0;
  for (std::uint64_t i = 0; i < n_posts; ++i) {
    Post p;
    p.id = r.read_u64();
    if (i > 0 && p.id <= prev_id) {
      throw format_error(name + ": post ids not strictly increasing");
    }
    prev_id = p.id;
    p.title = r.read_string();
    p.body = r.read_string();
    const std::uint32_t n_tags = r.read_u32();
    p.tags.reserve(n_tags);
    for (std::uint32_t t = 0; t < n_tags; ++t) p.tags.push_back(r.read_string());
    p.created = r.read_string();
    corpus.posts.push_back(std::move(p));
  }
  const std::uint64_t n_pairs = r.read_u64();
  corpus.pairs.reserve(n_pairs);
  for (std::uint64_t i = 0; i < n_pairs; ++i) {
    DuplicatePair pr;
    pr.dup_id = r.read_u64();
    pr.orig_id = r.read_u64();
    if (!corpus.contains(pr.dup_id) || !corpus.contains(pr.orig_id)) {
      throw format_error(name + ": pair references unknown post id");
    }
    corpus.pairs.push_back(pr);
  }
  if (!r.at_eof()) throw format_error(name + ": trailing bytes");
  return corpus;
}

}  // namespace dupdetect
