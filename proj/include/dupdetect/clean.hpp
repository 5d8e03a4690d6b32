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

#include <cstdlib>
#include <regex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dupdetect/util.hpp"

namespace dupdetect {

// Closed-as-duplicate posts carry marker tokens and moderator-added blocks
// that would leak the label to any detector; cleaning removes them together
// with markup and code blocks. Rules are an ordered, configurable list since
// the annotation formats on real forums are open-ended.
struct CleaningRules {
  // Applied to the raw HTML body, in order. Matches are deleted.
  std::vector<std::regex> block_patterns;
  // Applied after tag stripping, in order. Matches are deleted.
  std::vector<std::regex> text_patterns;

  static const CleaningRules& defaults() {
    static const CleaningRules rules = make_defaults();
    return rules;
  }

  static CleaningRules make_defaults() {
    using std::regex;
    constexpr auto icase = std::regex::icase;
    constexpr auto ml = std::regex::multiline;
    CleaningRules r;
    // Fenced and <pre> code regions. The <pre> rule also covers the usual
    // <pre><code>...</code></pre> nesting.
    r.block_patterns.emplace_back(regex(R"(```[\s\S]*?```)"));
    r.block_patterns.emplace_back(regex(R"(<pre\b[\s\S]*?</pre\s*>)", icase));
    r.text_patterns.emplace_back(
        regex(R"(^[ \t]*(?:edit|update)\s*:?\s*this question (?:is|was) a duplicate of[^\n]*$)",
              icase | ml));
    r.text_patterns.emplace_back(
        regex(R"(^[ \t]*possible duplicate(?:s)?(?: of)?\s*:?[^\n]*$)", icase | ml));
    r.text_patterns.emplace_back(regex(R"(^[ \t]*duplicate of\s*:[^\n]*$)", icase | ml));
    r.text_patterns.emplace_back(regex(R"(\[duplicate\])", icase));
    return r;
  }
};

namespace detail {

inline bool contains_icase(std::string_view haystack, std::string_view needle) {
  if (needle.empty() || haystack.size() < needle.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    std::size_t j = 0;
    while (j < needle.size() && ascii_lower(haystack[i + j]) == ascii_lower(needle[j])) ++j;
    if (j == needle.size()) return true;
  }
  return false;
}

// Drops <blockquote> blocks that carry a duplicate annotation. Non-annotation
// quotes (actual quoted content) are kept.
inline std::string remove_annotation_blockquotes(const std::string& body) {
  static const std::regex quote(R"(<blockquote\b[\s\S]*?</blockquote\s*>)", std::regex::icase);
  std::string out;
  out.reserve(body.size());
  auto it = std::sregex_iterator(body.begin(), body.end(), quote);
  auto end = std::sregex_iterator();
  std::size_t last = 0;
  for (; it != end; ++it) {
    const auto& m = *it;
    std::string_view inner(body.data() + m.position(), static_cast<std::size_t>(m.length()));
    const bool annotation = contains_icase(inner, "possible duplicate") ||
                            contains_icase(inner, "duplicate of") ||
                            contains_icase(inner, "already has an answer");
    out.append(body, last, static_cast<std::size_t>(m.position()) - last);
    if (!annotation) out.append(inner);
    last = static_cast<std::size_t>(m.position() + m.length());
  }
  out.append(body, last, body.size() - last);
  return out;
}

inline std::string strip_html_tags(const std::string& s) {
  static const std::regex comment(R"(<!--[\s\S]*?-->)");
  static const std::regex tag(R"(<\/?[a-zA-Z][^>]*>)");
  std::string no_comments = std::regex_replace(s, comment, " ");
  return std::regex_replace(no_comments, tag, " ");
}

// Decodes the common named entities plus numeric references in the ASCII
// range. Unknown entities are left untouched.
inline std::string decode_entities(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t semi = s.find(';', i + 1);
    if (semi == std::string::npos || semi - i > 10) {
      out.push_back(s[i++]);
      continue;
    }
    std::string_view name(s.data() + i + 1, semi - i - 1);
    std::string decoded;
    if (name == "amp") decoded = "&";
    else if (name == "lt") decoded = "<";
    else if (name == "gt") decoded = ">";
    else if (name == "quot") decoded = "\"";
    else if (name == "apos" || name == "#39") decoded = "'";
    else if (name == "nbsp") decoded = " ";
    else if (name.size() >= 2 && name[0] == '#') {
      long code = -1;
      if (name[1] == 'x' || name[1] == 'X') {
        code = std::strtol(std::string(name.substr(2)).c_str(), nullptr, 16);
      } else {
        code = std::strtol(std::string(name.substr(1)).c_str(), nullptr, 10);
      }
      if (code >= 32 && code < 127) decoded = std::string(1, static_cast<char>(code));
    }
    if (!decoded.empty()) {
      out += decoded;
      i = semi + 1;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

inline bool ends_with_icase(std::string_view s, std::string_view suffix) {
  if (s.size() < suffix.size()) return false;
  std::size_t off = s.size() - suffix.size();
  for (std::size_t i = 0; i < suffix.size(); ++i) {
    if (ascii_lower(s[off + i]) != ascii_lower(suffix[i])) return false;
  }
  return true;
}

}  // namespace detail

struct CleanedPost {
  std::string title;
  std::string body;
};

// Removes duplicate-closure markers, annotation blocks, code blocks, and HTML
// from a raw post. Total: never fails, may return empty strings.
inline CleanedPost strip_annotations(const std::string& raw_title, const std::string& raw_body,
                                     const CleaningRules& rules = CleaningRules::defaults()) {
  CleanedPost out;

  // Title: trailing "[duplicate]" marker(s), whitespace collapsed.
  std::string title = collapse_whitespace(detail::decode_entities(raw_title));
  static constexpr std::string_view kMarker = "[duplicate]";
  while (detail::ends_with_icase(title, kMarker)) {
    title.erase(title.size() - kMarker.size());
    title = trim(title);
  }
  out.title = title;

  // Body: ordered block removals on the HTML, then tag stripping, then
  // text-level annotation removals, then whitespace normalization.
  std::string body = raw_body;
  for (const auto& re : rules.block_patterns) {
    body = std::regex_replace(body, re, " ");
  }
  body = detail::remove_annotation_blockquotes(body);
  body = detail::strip_html_tags(body);
  body = detail::decode_entities(body);
  for (const auto& re : rules.text_patterns) {
    body = std::regex_replace(body, re, " ");
  }
  out.body = collapse_whitespace(body);
  return out;
}

// Drops whitespace-delimited tokens that are longer than max_run characters
// or that are base64 data URIs; such payloads carry no usable text signal.
// The boundary is strictly greater: a token of exactly max_run stays.
inline std::string strip_bulky_artifacts(const std::string& body, std::size_t max_run = 200) {
  static const std::regex data_uri(R"(^data:[^\s]*;base64,)", std::regex::icase);
  std::string out;
  out.reserve(body.size());
  std::size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() && ascii_space(body[i])) ++i;
    std::size_t start = i;
    while (i < body.size() && !ascii_space(body[i])) ++i;
    if (i == start) break;
    std::string_view token(body.data() + start, i - start);
    const bool too_long = token.size() > max_run;
    const bool is_data_uri =
        token.size() >= 5 && std::regex_search(token.begin(), token.end(), data_uri);
    if (too_long || is_data_uri) continue;
    if (!out.empty()) out.push_back(' ');
    out.append(token);
  }
  return out;
}

}  // namespace dupdetect
