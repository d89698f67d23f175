// Copyright (c) 2026 The se3d Authors
// SPDX-License-Identifier: Apache-2.0

#include "se3d/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>

#include "se3d/rng.hpp"

namespace se3d::kernels {
namespace {

constexpr std::uint64_t kMcChunk = 1 << 16;

// Hits of `n` uniform samples from box a's BEV rectangle inside box b.
std::uint64_t mc_chunk_hits(const Box3D& a, const Box3D& b, std::uint64_t n,
                            std::uint64_t seed) {
  std::uint64_t state = seed;
  const double ca = std::cos(a.r);
  const double sa = std::sin(a.r);
  const double cb = std::cos(b.r);
  const double sb = std::sin(b.r);
  const double hl_b = 0.5 * b.l;
  const double hw_b = 0.5 * b.w;
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    state = splitmix64(state);
    const double u =
        (static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5) * a.l;
    state = splitmix64(state);
    const double v =
        (static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5) * a.w;
    const double x = a.cx + u * ca - v * sa;
    const double y = a.cy + u * sa + v * ca;
    const double dx = x - b.cx;
    const double dy = y - b.cy;
    const double lu = dx * cb + dy * sb;
    const double lv = -dx * sb + dy * cb;
    if (std::abs(lu) <= hl_b && std::abs(lv) <= hw_b) ++hits;
  }
  return hits;
}

double mc_iou_from_hits(const Box3D& a, const Box3D& b, std::uint64_t hits,
                        std::uint64_t samples) {
  const double inter = a.bev_area() * static_cast<double>(hits) /
                       static_cast<double>(samples);
  const double uni = a.bev_area() + b.bev_area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace

int max_threads() {
  if (const char* env = std::getenv("SE3D_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return omp_get_max_threads();
}

void set_threads_from_env() { omp_set_num_threads(max_threads()); }

std::vector<double> iou_matrix_serial(std::span<const Box3D> a,
                                      std::span<const Box3D> b) {
  std::vector<double> out(a.size() * b.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[i * b.size() + j] = geom::iou_bev(a[i], b[j]);
    }
  }
  return out;
}

std::vector<double> iou_matrix(std::span<const Box3D> a,
                               std::span<const Box3D> b) {
  std::vector<double> out(a.size() * b.size(), 0.0);
  const std::int64_t total = static_cast<std::int64_t>(a.size() * b.size());
  const std::int64_t cols = static_cast<std::int64_t>(b.size());
  if (cols == 0) return out;
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < total; ++k) {
    out[static_cast<std::size_t>(k)] =
        geom::iou_bev(a[static_cast<std::size_t>(k / cols)],
                      b[static_cast<std::size_t>(k % cols)]);
  }
  return out;
}

double monte_carlo_iou_bev_serial(const Box3D& a, const Box3D& b,
                                  std::uint64_t samples, std::uint64_t seed) {
  const std::uint64_t chunks = (samples + kMcChunk - 1) / kMcChunk;
  std::uint64_t hits = 0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    const std::uint64_t n = std::min(kMcChunk, samples - c * kMcChunk);
    hits += mc_chunk_hits(a, b, n, splitmix64(seed ^ splitmix64(c + 1)));
  }
  return mc_iou_from_hits(a, b, hits, samples);
}

double monte_carlo_iou_bev(const Box3D& a, const Box3D& b,
                           std::uint64_t samples, std::uint64_t seed) {
  const std::int64_t chunks =
      static_cast<std::int64_t>((samples + kMcChunk - 1) / kMcChunk);
  std::uint64_t hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::uint64_t lo = static_cast<std::uint64_t>(c) * kMcChunk;
    const std::uint64_t n = std::min(kMcChunk, samples - lo);
    hits += mc_chunk_hits(
        a, b, n, splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(c) + 1)));
  }
  return mc_iou_from_hits(a, b, hits, samples);
}

}  // namespace se3d::kernels
