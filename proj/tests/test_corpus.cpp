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

#include <fstream>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "dupdetect/corpus.hpp"

namespace dd = dupdetect;

namespace {

std::string data_path(const std::string& name) {
  return std::string(DUPDETECT_TEST_DATA_DIR) + "/" + name;
}

dd::Corpus load_fixture(dd::IngestStats* stats = nullptr) {
  std::ifstream posts(data_path("sample_posts.jsonl"));
  std::ifstream pairs(data_path("sample_pairs.csv"));
  REQUIRE(posts.good());
  REQUIRE(pairs.good());
  return dd::ingest_corpus(posts, pairs, stats);
}

}  // namespace

TEST_CASE("fixture ingests to a sorted, cleaned corpus") {
  dd::IngestStats stats;
  const dd::Corpus corpus = load_fixture(&stats);

  REQUIRE(corpus.posts.size() == 20);
  for (std::size_t i = 1; i < corpus.posts.size(); ++i) {
    REQUIRE(corpus.posts[i - 1].id < corpus.posts[i].id);
  }
  CHECK(corpus.posts.front().id == 101);
  CHECK(corpus.posts.back().id == 120);

  CHECK(stats.posts_read == 20);
  CHECK(stats.posts_malformed == 0);
  CHECK(stats.posts_empty == 1);
  CHECK(stats.pairs_read == 8);
  REQUIRE(corpus.pairs.size() == 8);
  // Ingest order preserved.
  CHECK(corpus.pairs.front() == dd::DuplicatePair{102, 101});
  CHECK(corpus.pairs.back() == dd::DuplicatePair{113, 110});

  // Cleaning happened during parsing: exact strings.
  CHECK(corpus.find(102)->title == "Sorting lists in Python");
  CHECK(corpus.find(102)->body == "Given a list of ints, how do I order it?");
  CHECK(corpus.find(104)->body == "What is the idiomatic way to walk a dict?");
  CHECK(corpus.find(107)->body == "I do not understand closures at all.");
  CHECK(corpus.find(109)->body == "See this snippet: What is the difference?");
  CHECK(corpus.find(111)->body == "I want to preallocate storage & avoid reallocation.");
  CHECK(corpus.find(112)->body ==
        "My linked list crashes. Here is a screenshot of the debugger & nothing helps.");
  CHECK(corpus.find(113)->body == "I get SIGSEGV when running my program.");
  CHECK(corpus.find(105)->body == "I want to read a file. Is this correct?");

  // The all-annotation post survives ingest with empty text.
  REQUIRE(corpus.find(120) != nullptr);
  CHECK(corpus.find(120)->empty_text());

  CHECK(corpus.find(117)->tags.empty());
  CHECK(corpus.find(117)->created.empty());
  CHECK(corpus.find(114)->has_tag("pandas"));
  CHECK_FALSE(corpus.find(114)->has_tag("c++"));
  CHECK(corpus.find(999) == nullptr);
  CHECK_FALSE(corpus.contains(0));
}

TEST_CASE("malformed posts are record-level failures below 10%") {
  std::stringstream posts;
  for (int i = 1; i <= 10; ++i) {
    posts << R"({"id": )" << i << R"(, "title": "t)" << i << R"(", "body": "b"})" << "\n";
  }
  posts << "this is not json\n";
  std::stringstream pairs("dup_id,orig_id\n2,1\n");
  dd::IngestStats stats;
  const dd::Corpus corpus = dd::ingest_corpus(posts, pairs, &stats);
  CHECK(corpus.posts.size() == 10);
  CHECK(stats.posts_malformed == 1);
  REQUIRE(stats.warnings.size() == 1);
  CHECK(stats.warnings[0].find("line 11") != std::string::npos);
}

TEST_CASE("over 10% malformed posts is fatal") {
  std::stringstream posts;
  for (int i = 1; i <= 8; ++i) {
    posts << R"({"id": )" << i << R"(, "title": "t", "body": "b"})" << "\n";
  }
  posts << "garbage one\n{\"id\": oops}\n";
  CHECK_THROWS_MATCHES(dd::parse_posts_jsonl(posts), dd::Error,
                       Catch::Matchers::Predicate<dd::Error>([](const dd::Error& e) {
                         return e.klass() == dd::ErrorClass::format;
                       }));
}

TEST_CASE("missing required fields are malformed records") {
  std::stringstream posts(R"({"id": 1, "title": "only title"})"
                          "\n"
                          R"({"id": 2, "title": "t", "body": "b"})"
                          "\n"
                          R"({"title": "no id", "body": "b"})"
                          "\n"
                          R"({"id": 3, "title": "t", "body": "b"})"
                          "\n"
                          R"({"id": 4, "title": "t", "body": "b"})"
                          "\n"
                          R"({"id": 5, "title": "t", "body": "b"})"
                          "\n"
                          R"({"id": 6, "title": "t", "body": "b"})"
                          "\n"
                          R"({"id": 7, "title": "t", "body": "b"})"
                          "\n"
                          R"({"id": 8, "title": "t", "body": "b"})"
                          "\n"
                          R"({"id": 9, "title": "t", "body": "b"})"
                          "\n"
                          R"({"id": 10, "title": "t", "body": "b"})"
                          "\n"
                          R"({"id": 11, "title": "t", "body": "b"})"
                          "\n"
                          R"({"id": 12, "title": "t", "body": "b"})"
                          "\n"
                          R"({"id": 13, "title": "t", "body": "b"})"
                          "\n"
                          R"({"id": 14, "title": "t", "body": "b"})"
                          "\n"
                          R"({"id": 15, "title": "t", "body": "b"})"
                          "\n"
                          R"({"id": 16, "title": "t", "body": "b"})"
                          "\n"
                          R"({"id": 17, "title": "t", "body": "b"})"
                          "\n"
                          R"({"id": 18, "title": "t", "body": "b"})"
                          "\n"
                          R"({"id": 19, "title": "t", "body": "b"})"
                          "\n");
  dd::IngestStats stats;
  const auto posts_out = dd::parse_posts_jsonl(posts, &stats);
  CHECK(posts_out.size() == 18);
  CHECK(stats.posts_malformed == 2);
}

TEST_CASE("duplicate post ids are fatal") {
  std::stringstream posts(R"({"id": 1, "title": "a", "body": "x"})"
                          "\n"
                          R"({"id": 1, "title": "b", "body": "y"})"
                          "\n");
  CHECK_THROWS_MATCHES(dd::parse_posts_jsonl(posts), dd::Error,
                       Catch::Matchers::Predicate<dd::Error>([](const dd::Error& e) {
                         return e.klass() == dd::ErrorClass::data;
                       }));
}

TEST_CASE("pairs parser enforces the header and drops bad rows") {
  dd::Corpus corpus;
  for (std::uint64_t id : {1ull, 2ull, 3ull}) {
    dd::Post p;
    p.id = id;
    p.title = "t";
    corpus.posts.push_back(p);
  }

  SECTION("wrong header is fatal") {
    std::stringstream pairs("orig_id,dup_id\n1,2\n");
    CHECK_THROWS_AS(dd::parse_pairs_csv(pairs, corpus), dd::Error);
  }
  SECTION("self, missing, and repeated pairs are dropped with counts") {
    std::stringstream pairs(
        "dup_id,orig_id\n"
        "2,1\n"
        "2,2\n"     // self
        "9,1\n"     // missing dup endpoint
        "2,1\n"     // repeat
        "3,1\n");
    dd::IngestStats stats;
    const auto out = dd::parse_pairs_csv(pairs, corpus, &stats);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == dd::DuplicatePair{2, 1});
    CHECK(out[1] == dd::DuplicatePair{3, 1});
    CHECK(stats.pairs_read == 5);
    CHECK(stats.pairs_dropped_self == 1);
    CHECK(stats.pairs_dropped_missing == 1);
    CHECK(stats.pairs_dropped_repeat == 1);
  }
  SECTION("reversed direction is a distinct pair, not a repeat") {
    std::stringstream pairs("dup_id,orig_id\n2,1\n1,2\n");
    const auto out = dd::parse_pairs_csv(pairs, corpus);
    CHECK(out.size() == 2);
  }
  SECTION("non-numeric field is fatal") {
    std::stringstream pairs("dup_id,orig_id\nx,1\n");
    CHECK_THROWS_AS(dd::parse_pairs_csv(pairs, corpus), dd::Error);
  }
}

TEST_CASE("corpus round-trips through COR1") {
  const dd::Corpus corpus = load_fixture();
  std::stringstream buf;
  dd::write_corpus(buf, corpus);
  const std::string bytes = buf.str();
  CHECK(bytes.substr(0, 4) == "COR1");

  std::stringstream in(bytes);
  const dd::Corpus back = dd::read_corpus(in);
  REQUIRE(back.posts.size() == corpus.posts.size());
  REQUIRE(back.pairs.size() == corpus.pairs.size());
  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    CHECK(back.posts[i].id == corpus.posts[i].id);
    CHECK(back.posts[i].title == corpus.posts[i].title);
    CHECK(back.posts[i].body == corpus.posts[i].body);
    CHECK(back.posts[i].tags == corpus.posts[i].tags);
    CHECK(back.posts[i].created == corpus.posts[i].created);
  }
  for (std::size_t i = 0; i < corpus.pairs.size(); ++i) {
    CHECK(back.pairs[i] == corpus.pairs[i]);
  }

  // Writing the re-read corpus reproduces the bytes exactly.
  std::stringstream buf2;
  dd::write_corpus(buf2, back);
  CHECK(buf2.str() == bytes);

  SECTION("trailing bytes are rejected") {
    std::stringstream bad(bytes + "x");
    CHECK_THROWS_AS(dd::read_corpus(bad), dd::Error);
  }
  SECTION("wrong magic is rejected") {
    std::string mangled = bytes;
    mangled[0] = 'X';
    std::stringstream bad(mangled);
    CHECK_THROWS_AS(dd::read_corpus(bad), dd::Error);
  }
}

TEST_CASE("reader rejects non-increasing post ids") {
  dd::Corpus corpus;
  dd::Post a, b;
  a.id = 5;
  b.id = 3;
  corpus.posts = {a, b};  // deliberately out of order
  std::stringstream buf;
  dd::write_corpus(buf, corpus);
  CHECK_THROWS_MATCHES(dd::read_corpus(buf), dd::Error,
                       Catch::Matchers::Predicate<dd::Error>([](const dd::Error& e) {
                         return e.klass() == dd::ErrorClass::format;
                       }));
}

TEST_CASE("filter_by_tag keeps tagged posts and intra-topic pairs") {
  const dd::Corpus corpus = load_fixture();
  const dd::Corpus python = dd::filter_by_tag(corpus, "python");
  REQUIRE(python.posts.size() == 8);  // 101..105, 114, 119, 120
  for (const auto& p : python.posts) CHECK(p.has_tag("python"));
  REQUIRE(python.pairs.size() == 3);
  CHECK(python.pairs[0] == dd::DuplicatePair{102, 101});
  CHECK(python.pairs[1] == dd::DuplicatePair{103, 101});
  CHECK(python.pairs[2] == dd::DuplicatePair{104, 103});

  CHECK(dd::filter_by_tag(corpus, "no-such-tag").posts.empty());
  CHECK_THROWS_AS(dd::filter_by_tag(corpus, ""), dd::Error);

  // Pair (113,110) dies under "c++" because the dup side is tagged "debugging".
  const dd::Corpus cpp = dd::filter_by_tag(corpus, "c++");
  REQUIRE(cpp.pairs.size() == 2);
  CHECK(cpp.pairs[0] == dd::DuplicatePair{111, 110});
  CHECK(cpp.pairs[1] == dd::DuplicatePair{111, 112});
}
