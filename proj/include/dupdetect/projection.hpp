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
#include <ostream>
#include <span>
#include <vector>

#include "dupdetect/binio.hpp"
#include "dupdetect/error.hpp"
#include "dupdetect/rng.hpp"

namespace dupdetect {

// Single affine map f(x) = Wx + b shared by every branch of the Siamese
// pass: there is exactly one W and one b, so weight sharing is structural
// rather than enforced by synchronization.
//
// Parameters are stored as f32 (matching the on-disk format bit for bit);
// all arithmetic on them runs in f64.
struct ProjectionHead {
  std::uint32_t in_dim = 0;
  std::uint32_t out_dim = 0;
  std::vector<float> W;  // row-major, out_dim x in_dim
  std::vector<float> b;  // out_dim

  // Fan-in uniform init for W in [-1/sqrt(in_dim), +1/sqrt(in_dim)], zero b.
  static ProjectionHead init(std::uint32_t in_dim, std::uint32_t out_dim, std::uint64_t seed) {
    if (in_dim == 0 || out_dim == 0) throw argument_error("head: dims must be > 0");
    ProjectionHead h;
    h.in_dim = in_dim;
    h.out_dim = out_dim;
    h.W.resize(static_cast<std::size_t>(out_dim) * in_dim);
    h.b.assign(out_dim, 0.0f);
    const double r = 1.0 / std::sqrt(static_cast<double>(in_dim));
    Rng rng(derive_seed(seed, kInitStream));
    for (float& w : h.W) w = static_cast<float>(rng.uniform(-r, r));
    return h;
  }

  static constexpr std::uint64_t kInitStream = 0x696e6974;  // "init"

  std::vector<double> apply(std::span<const float> x) const {
    if (x.size() != in_dim) {
      throw config_error("head: input dim " + std::to_string(x.size()) + ", expected " +
                         std::to_string(in_dim));
    }
    std::vector<double> u(out_dim);
    const float* row = W.data();
    for (std::uint32_t r = 0; r < out_dim; ++r, row += in_dim) {
      double acc = static_cast<double>(b[r]);
      for (std::uint32_t c = 0; c < in_dim; ++c) {
        acc += static_cast<double>(row[c]) * static_cast<double>(x[c]);
      }
      u[r] = acc;
    }
    return u;
  }

  bool finite() const {
    for (float w : W) {
      if (!std::isfinite(w)) return false;
    }
    for (float v : b) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
};

// model.sia layout: "SIA1" | u32 in_dim | u32 out_dim | W row-major f32 | b f32.
inline void save_head(std::ostream& out, const ProjectionHead& head) {
  binio::write_bytes(out, "SIA1", 4);
  binio::write_u32(out, head.in_dim);
  binio::write_u32(out, head.out_dim);
  for (float w : head.W) binio::write_f32(out, w);
  for (float v : head.b) binio::write_f32(out, v);
}

inline ProjectionHead load_head(std::istream& in, const std::string& name = "model") {
  binio::Reader r(in, name);
  r.expect_magic("SIA1");
  ProjectionHead head;
  head.in_dim = r.read_u32();
  head.out_dim = r.read_u32();
  if (head.in_dim == 0 || head.out_dim == 0) {
    throw format_error(name + ": zero dimension");
  }
  head.W.resize(static_cast<std::size_t>(head.out_dim) * head.in_dim);
  for (float& w : head.W) w = r.read_f32();
  head.b.resize(head.out_dim);
  for (float& v : head.b) v = r.read_f32();
  if (!r.at_eof()) throw format_error(name + ": trailing bytes");
  if (!head.finite()) throw format_error(name + ": non-finite parameter");
  return head;
}

}  // namespace dupdetect
