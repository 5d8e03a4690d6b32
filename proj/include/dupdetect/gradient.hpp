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
#include <cstdint>
#include <span>
#include <vector>

#include "dupdetect/error.hpp"
#include "dupdetect/loss.hpp"
#include "dupdetect/projection.hpp"

namespace dupdetect {

using VecRef = std::span<const float>;

struct HeadGradients {
  std::vector<double> dW;  // row-major, same shape as head.W
  std::vector<double> db;

  void reset(const ProjectionHead& head) {
    dW.assign(static_cast<std::size_t>(head.out_dim) * head.in_dim, 0.0);
    db.assign(head.out_dim, 0.0);
  }
};

namespace detail {

// d cos(u,v) / du = v/(|u||v|) - cos(u,v) * u/|u|^2, accumulated as
// g += coeff * dcos/du.
inline void add_cosine_grad(std::span<double> g, std::span<const double> u,
                            std::span<const double> v, double nu, double nv, double cos_uv,
                            double coeff) {
  const double c1 = coeff / (nu * nv);
  const double c2 = coeff * cos_uv / (nu * nu);
  for (std::size_t d = 0; d < g.size(); ++d) g[d] += c1 * v[d] - c2 * u[d];
}

// Chain rule through u = Wx + b: dL/dW[r][c] += g[r]*x[c], dL/db[r] += g[r].
inline void add_param_grads(HeadGradients& grads, std::span<const double> g, VecRef x) {
  const std::size_t in_dim = x.size();
  double* row = grads.dW.data();
  for (std::size_t r = 0; r < g.size(); ++r, row += in_dim) {
    const double gr = g[r];
    if (gr == 0.0) continue;
    for (std::size_t c = 0; c < in_dim; ++c) row[c] += gr * static_cast<double>(x[c]);
    grads.db[r] += gr;
  }
}

inline double norm_checked(std::span<const double> u) {
  const double n = l2_norm(u);
  if (n == 0.0) throw domain_error("gradient: zero-norm latent");
  return n;
}

}  // namespace detail

// Mean triplet loss over the batch; when grads is non-null, gradients of that
// mean are ADDED into it (callers reset). A clamped triplet (hinge value
// <= 0) contributes exactly zero gradient.
inline double triplet_batch(const ProjectionHead& head, std::span<const VecRef> anchors,
                            std::span<const VecRef> positives, std::span<const VecRef> negatives,
                            double margin, HeadGradients* grads = nullptr) {
  if (anchors.empty() || anchors.size() != positives.size() ||
      anchors.size() != negatives.size()) {
    throw domain_error("triplet_batch: shape mismatch");
  }
  const std::size_t n = anchors.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  std::vector<double> ga(head.out_dim), gp(head.out_dim), gn(head.out_dim);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> a = head.apply(anchors[i]);
    const std::vector<double> p = head.apply(positives[i]);
    const std::vector<double> nn = head.apply(negatives[i]);
    const double na = detail::norm_checked(a);
    const double np = detail::norm_checked(p);
    const double nneg = detail::norm_checked(nn);
    const double cos_ap = dot<double>(a, p) / (na * np);
    const double cos_an = dot<double>(a, nn) / (na * nneg);
    // d(A,P) - d(A,N) + margin with the 1's cancelled.
    const double val = cos_an - cos_ap + margin;
    if (val <= 0.0) continue;
    total += val;
    if (!grads) continue;
    std::fill(ga.begin(), ga.end(), 0.0);
    std::fill(gp.begin(), gp.end(), 0.0);
    std::fill(gn.begin(), gn.end(), 0.0);
    detail::add_cosine_grad(ga, a, nn, na, nneg, cos_an, inv_n);   // +dcos(a,n)/da
    detail::add_cosine_grad(ga, a, p, na, np, cos_ap, -inv_n);     // -dcos(a,p)/da
    detail::add_cosine_grad(gp, p, a, np, na, cos_ap, -inv_n);     // -dcos(a,p)/dp
    detail::add_cosine_grad(gn, nn, a, nneg, na, cos_an, inv_n);   // +dcos(a,n)/dn
    detail::add_param_grads(*grads, ga, anchors[i]);
    detail::add_param_grads(*grads, gp, positives[i]);
    detail::add_param_grads(*grads, gn, negatives[i]);
  }
  return total * inv_n;
}

// Mean MNR loss over the batch with in-batch negatives; gradient convention
// as in triplet_batch. Softmax rows use the max-shift.
inline double mnr_batch(const ProjectionHead& head, std::span<const VecRef> anchors,
                        std::span<const VecRef> positives, double scale,
                        HeadGradients* grads = nullptr) {
  if (anchors.empty() || anchors.size() != positives.size()) {
    throw domain_error("mnr_batch: shape mismatch");
  }
  const std::size_t n = anchors.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<std::vector<double>> a(n), p(n);
  std::vector<double> na(n), np(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = head.apply(anchors[i]);
    p[i] = head.apply(positives[i]);
    na[i] = detail::norm_checked(a[i]);
    np[i] = detail::norm_checked(p[i]);
  }

  std::vector<double> cos(n * n), s(n * n), sigma;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cos[i * n + j] = dot<double>(a[i], p[j]) / (na[i] * np[j]);
      s[i * n + j] = scale * cos[i * n + j];
    }
  }

  double total = 0.0;
  if (grads) sigma.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> row(s.data() + i * n, n);
    const double lse = logsumexp(row);
    total += lse - row[i];
    if (grads) {
      for (std::size_t j = 0; j < n; ++j) sigma[i * n + j] = std::exp(row[j] - lse);
    }
  }

  if (grads) {
    // dL/ds_ij = (sigma_ij - delta_ij)/n, then through s = scale*cos and the
    // two cosine arguments.
    std::vector<double> g(head.out_dim);
    for (std::size_t i = 0; i < n; ++i) {
      std::fill(g.begin(), g.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        const double coeff =
            (sigma[i * n + j] - (i == j ? 1.0 : 0.0)) * inv_n * scale;
        if (coeff == 0.0) continue;
        detail::add_cosine_grad(g, a[i], p[j], na[i], np[j], cos[i * n + j], coeff);
      }
      detail::add_param_grads(*grads, g, anchors[i]);
    }
    for (std::size_t j = 0; j < n; ++j) {
      std::fill(g.begin(), g.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double coeff =
            (sigma[i * n + j] - (i == j ? 1.0 : 0.0)) * inv_n * scale;
        if (coeff == 0.0) continue;
        detail::add_cosine_grad(g, p[j], a[i], np[j], na[i], cos[i * n + j], coeff);
      }
      detail::add_param_grads(*grads, g, positives[j]);
    }
  }
  return total * inv_n;
}

}  // namespace dupdetect
