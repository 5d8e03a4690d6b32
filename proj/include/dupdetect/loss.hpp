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
#include <cmath>
#include <span>
#include <vector>

#include "dupdetect/error.hpp"

namespace dupdetect {

template <typename T>
double dot(std::span<const T> u, std::span<const T> v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    acc += static_cast<double>(u[i]) * static_cast<double>(v[i]);
  }
  return acc;
}

template <typename T>
double l2_norm(std::span<const T> u) {
  double acc = 0.0;
  for (T x : u) acc += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(acc);
}

// sim in [-1,1] up to rounding. Zero-norm input is an error, never a silent 0.
template <typename T>
double cosine_similarity(std::span<const T> u, std::span<const T> v) {
  if (u.size() != v.size()) throw domain_error("cosine: dimension mismatch");
  const double nu = l2_norm(u);
  const double nv = l2_norm(v);
  if (nu == 0.0 || nv == 0.0) throw domain_error("cosine: zero-norm vector");
  return dot(u, v) / (nu * nv);
}

template <typename T>
double cosine_distance(std::span<const T> u, std::span<const T> v) {
  return 1.0 - cosine_similarity(u, v);
}

// max(0, d(A,P) - d(A,N) + margin) with d = cosine distance; the norms cancel,
// so this equals max(0, cos(A,N) - cos(A,P) + margin).
inline double triplet_loss(std::span<const double> anchor, std::span<const double> positive,
                           std::span<const double> negative, double margin) {
  const double d_ap = cosine_distance(anchor, positive);
  const double d_an = cosine_distance(anchor, negative);
  return std::max(0.0, d_ap - d_an + margin);
}

// Row-stable log-sum-exp: max-shift before exponentiation.
inline double logsumexp(std::span<const double> xs) {
  double m = xs[0];
  for (double x : xs) m = std::max(m, x);
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

// Multiple-negatives ranking loss over a batch of N (anchor, positive) rows:
// scores s_ij = scale * cos(a_i, p_j); within row i the positive sits at
// j = i and every other p_j is a negative. Mean row-wise negative
// log-likelihood of the softmax-normalized scores.
inline double mnr_loss(const std::vector<std::vector<double>>& anchors,
                       const std::vector<std::vector<double>>& positives, double scale) {
  if (anchors.empty() || anchors.size() != positives.size()) {
    throw domain_error("mnr_loss: batch shape mismatch");
  }
  const std::size_t n = anchors.size();
  std::vector<double> row(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = scale * cosine_similarity(std::span<const double>(anchors[i]),
                                         std::span<const double>(positives[j]));
    }
    total += logsumexp(row) - row[i];
  }
  return total / static_cast<double>(n);
}

}  // namespace dupdetect
