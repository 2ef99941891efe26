#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "featsel/errors.hpp"

namespace featsel {

using Twist = Eigen::Matrix<double, 6, 1>;  // [translation; rotation]
using Landmark = Eigen::Vector3d;
using Mat2x3 = Eigen::Matrix<double, 2, 3>;
using Mat2x6 = Eigen::Matrix<double, 2, 6>;
using Mat3x6 = Eigen::Matrix<double, 3, 6>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Rigid world-to-camera transform: p_cam = rotation * p_world + translation.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

struct CameraIntrinsics {
  double fx = 500.0;
  double fy = 500.0;
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;
};

struct PixelObservation {
  double u = 0.0;
  double v = 0.0;
};

Eigen::Matrix3d skew(const Eigen::Vector3d& w);

Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& p);

// Exponential map; twist ordered [translation; rotation].
Pose se3_exp(const Twist& xi);

// Logarithm map. Requires rotation angle < pi; uses a quaternion-based
// branch near pi for numerical robustness.
Twist se3_log(const Pose& p);

// Pinhole projection. Throws BehindCameraError if depth <= 0 in the camera
// frame.
PixelObservation project(const Pose& pose, const Landmark& p,
                         const CameraIntrinsics& cam);

// Inverse of project at a given camera-frame depth.
Landmark backproject(const Pose& pose, const PixelObservation& px,
                     double depth, const CameraIntrinsics& cam);

bool in_image(const PixelObservation& px, const CameraIntrinsics& cam);

// d(projection)/d(pose twist), 2x6, for a right-multiplicative perturbation
// pose * exp(xi). Throws BehindCameraError on non-positive depth.
Mat2x6 pose_jacobian(const Pose& pose, const Landmark& p,
                     const CameraIntrinsics& cam);

// d(projection)/d(landmark position), 2x3.
Mat2x3 point_jacobian(const Pose& pose, const Landmark& p,
                      const CameraIntrinsics& cam);

// Per-feature combined block: solves [hp; 0 0 1] * Hc = [hx; 0_{1x6}].
// Throws DegenerateFeatureError when the 3x3 system is ill-conditioned
// (condition number > 1e8).
Mat3x6 combined_block(const Mat2x6& hx, const Mat2x3& hp);

struct JacobianBlockSet {
  Pose linearization_pose;
  std::vector<Mat2x6> hx;
  std::vector<Mat2x3> hp;
  std::vector<Mat3x6> hc;

  std::size_t size() const { return hx.size(); }
};

// Evaluates all per-feature blocks at one linearization pose.
JacobianBlockSet compute_jacobian_blocks(const Pose& pose,
                                         std::span<const Landmark> landmarks,
                                         const CameraIntrinsics& cam);

}  // namespace featsel
