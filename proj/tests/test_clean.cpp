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

#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "dupdetect/clean.hpp"
#include "support/clean_fixtures.hpp"

namespace dd = dupdetect;

using cleanfx::full_clean;
using cleanfx::kFixtures;

TEST_CASE("cleaning fixtures produce exact expected strings") {
  for (const auto& f : kFixtures) {
    INFO(f.label);
    const auto cleaned = full_clean(f.title_in, f.body_in);
    CHECK(cleaned.title == f.title_out);
    CHECK(cleaned.body == f.body_out);
  }
}

TEST_CASE("cleaning is idempotent on every fixture") {
  for (const auto& f : kFixtures) {
    INFO(f.label);
    const auto once = full_clean(f.title_in, f.body_in);
    const auto twice = full_clean(once.title, once.body);
    CHECK(twice.title == once.title);
    CHECK(twice.body == once.body);
  }
}

TEST_CASE("token length boundary is strictly greater than max_run") {
  const std::string keep = "word " + std::string(200, 'y') + " tail";
  CHECK(dd::strip_bulky_artifacts(keep) == keep);
  const std::string drop = "word " + std::string(201, 'x') + " tail";
  CHECK(dd::strip_bulky_artifacts(drop) == "word tail");
}

TEST_CASE("bulky stripping is whitespace-delimited and order-preserving") {
  const std::string body = "a data:text/plain;base64,AAAA b  c";
  CHECK(dd::strip_bulky_artifacts(body) == "a b c");
  CHECK(dd::strip_bulky_artifacts("") == "");
  // A token merely containing "base64" is not a data URI.
  CHECK(dd::strip_bulky_artifacts("base64, explained") == "base64, explained");
}

TEST_CASE("title stripping is case-insensitive and repeated") {
  const auto cleaned = dd::strip_annotations("Q [Duplicate] [dUpLiCaTe]", "b");
  CHECK(cleaned.title == "Q");
}
