#pragma once

#include <stdexcept>
#include <string>

namespace featsel {

// Base class for runtime failures of the estimation / selection pipeline.
// Argument-contract violations use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A landmark has non-positive depth in the camera frame where a projection
// or Jacobian was requested.
class BehindCameraError : public Error {
 public:
  explicit BehindCameraError(const std::string& what) : Error(what) {}
};

// A single feature's combined-block system is numerically singular.
class DegenerateFeatureError : public Error {
 public:
  explicit DegenerateFeatureError(const std::string& what) : Error(what) {}
};

// The feature set as a whole cannot constrain the pose (rank-deficient
// normal equations, fewer than three usable features, ...).
class DegenerateGeometryError : public Error {
 public:
  explicit DegenerateGeometryError(const std::string& what) : Error(what) {}
};

// Exhaustive enumeration was requested for a search space over the guard.
class ProblemTooLargeError : public Error {
 public:
  explicit ProblemTooLargeError(const std::string& what) : Error(what) {}
};

}  // namespace featsel
