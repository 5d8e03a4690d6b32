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

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "dupdetect/error.hpp"

namespace dupdetect::binio {

// All on-disk binary formats in this project are little-endian.

inline void write_bytes(std::ostream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

inline void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  write_bytes(out, b, 4);
}

inline void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  write_bytes(out, b, 8);
}

inline void write_f32(std::ostream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  write_u32(out, bits);
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  write_bytes(out, s.data(), s.size());
}

class Reader {
 public:
  Reader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  std::uint64_t offset() const { return offset_; }

  void read_bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw format_error(name_ + ": truncated at offset " + std::to_string(offset_));
    }
    offset_ += n;
  }

  std::uint32_t read_u32() {
    unsigned char b[4];
    read_bytes(b, 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }

  std::uint64_t read_u64() {
    unsigned char b[8];
    read_bytes(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }

  float read_f32() {
    std::uint32_t bits = read_u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  std::string read_string(std::uint32_t max_len = (1u << 24)) {
    std::uint32_t n = read_u32();
    if (n > max_len) {
      throw format_error(name_ + ": string length " + std::to_string(n) +
                         " out of range at offset " + std::to_string(offset_));
    }
    std::string s(n, '\0');
    if (n > 0) read_bytes(s.data(), n);
    return s;
  }

  void expect_magic(const char (&magic)[5]) {
    char got[4];
    read_bytes(got, 4);
    if (std::memcmp(got, magic, 4) != 0) {
      throw format_error(name_ + ": bad magic at offset 0, expected \"" + std::string(magic, 4) +
                         "\"");
    }
  }

  // True iff the stream is exactly exhausted.
  bool at_eof() {
    return in_.peek() == std::char_traits<char>::eof();
  }

 private:
  std::istream& in_;
  std::string name_;
  std::uint64_t offset_ = 0;
};

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  return out;
}

inline void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw io_error("write failed for " + path);
}

}  // namespace dupdetect::binio
