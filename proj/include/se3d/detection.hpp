// Copyright (c) 2026 The se3d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "se3d/geom.hpp"

namespace se3d {

/// Numerically stable logistic function.
inline double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// A predicted oriented box with its raw confidence logit.
struct Detection {
  Box3D box;
  double logit = 0.0;

  double score() const { return sigmoid(logit); }
};

using Detections = std::vector<Detection>;

}  // namespace se3d
