// Copyright (c) 2026 The se3d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "se3d/geom.hpp"

// Data-parallel inner loops, each with a serial reference implementation.
// The OpenMP variants are written so their results are bitwise identical
// to the serial ones for any thread count; tests assert this and the
// bench target times both.
namespace se3d::kernels {

/// Worker cap: SE3D_THREADS when set, else the OpenMP default.
int max_threads();

/// Applies the SE3D_THREADS cap to the OpenMP runtime.
void set_threads_from_env();

/// All-pairs BEV IoU, row-major [a.size() x b.size()].
std::vector<double> iou_matrix(std::span<const Box3D> a,
                               std::span<const Box3D> b);
std::vector<double> iou_matrix_serial(std::span<const Box3D> a,
                                      std::span<const Box3D> b);

// Monte-Carlo BEV IoU estimate: uniform samples inside box a, hit ratio
// against box b. Sampling is chunked with per-chunk seeds, so the result
// does not depend on the thread count.
double monte_carlo_iou_bev(const Box3D& a, const Box3D& b,
                           std::uint64_t samples, std::uint64_t seed);
double monte_carlo_iou_bev_serial(const Box3D& a, const Box3D& b,
                                  std::uint64_t samples, std::uint64_t seed);

}  // namespace se3d::kernels
