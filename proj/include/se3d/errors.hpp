// Copyright (c) 2026 The se3d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace se3d {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A match references a detection index that does not exist.
struct MismatchedIndices : Error {
  using Error::Error;
};

/// A point handed to the pyramid partition lies outside the box.
struct PointOutsideBox : Error {
  using Error::Error;
};

/// Requested sample count outside [1, n].
struct InvalidK : Error {
  using Error::Error;
};

/// Parameter vectors with different layer layouts.
struct LayoutMismatch : Error {
  using Error::Error;
};

/// Gradient / parameter size disagreement.
struct ShapeMismatch : Error {
  using Error::Error;
};

/// Backward pass called with a cache from a different forward pass.
struct StaleCache : Error {
  using Error::Error;
};

/// Velodyne .bin file with a size that is not a multiple of 16 bytes.
struct MalformedBin : Error {
  using Error::Error;
};

/// KITTI label line that does not have 15 (or 16, with score) fields.
struct MalformedLabel : Error {
  using Error::Error;
};

/// Calibration file lacking a required key.
struct MissingCalibKey : Error {
  using Error::Error;
};

/// Generic parse failure in a text input (scene files, logs, configs).
struct ParseError : Error {
  using Error::Error;
};

}  // namespace se3d
