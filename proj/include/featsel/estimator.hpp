#pragma once

#include <span>

#include "featsel/geometry.hpp"

namespace featsel {

struct GaussNewtonConfig {
  int max_iters = 20;
  double update_norm_tol = 1e-10;
  // Relative Levenberg damping engaged once if the normal equations are
  // numerically singular: lambda = damping * trace(A) / 6.
  double damping = 1e-6;
};

struct GaussNewtonResult {
  Pose pose;
  int iterations = 0;
};

// Per-axis observation / map noise parameters.
struct NoiseModel {
  double sigma_z = 0.0;                              // pixel std
  Eigen::Vector3d mu_p = Eigen::Vector3d::Zero();    // map-noise mean (m)
  double sigma_p = 0.0;                              // map-noise std (m)
};

struct PoseError {
  double translational_m = 0.0;
  double rotational_deg = 0.0;
};

// Minimizes the total squared reprojection residual r_i = z_i - h(x, p_i)
// over the pose, with right-multiplicative updates pose * exp(delta).
// Features that fall behind the camera during an iteration are dropped for
// that iteration; fewer than three usable features raises
// DegenerateGeometryError.
GaussNewtonResult gauss_newton_pose(const Pose& initial,
                                    std::span<const Landmark> landmarks,
                                    std::span<const PixelObservation> observations,
                                    const CameraIntrinsics& cam,
                                    const GaussNewtonConfig& cfg = {});

// Translation distance (m) and rotation angle (deg) between two poses.
PoseError pose_error(const Pose& estimate, const Pose& truth);

// First-order pose covariance induced by iid pixel noise of std sigma_z:
// sigma_z^2 * (sum_i hx_i^T hx_i)^{-1}.
Mat6 covariance_from_measurement(const JacobianBlockSet& blocks,
                                 double sigma_z);

// First-order pose covariance induced by iid per-axis landmark noise of std
// sigma_p: sigma_p^2 * { sum_i hx_i^T [hp_i hp_i^T]^{-1} hx_i }^{-1}.
Mat6 covariance_from_map(const JacobianBlockSet& blocks, double sigma_p);

// Expected error twist (estimate-to-truth correction) induced by a common
// landmark-noise mean mu_p: (sum hx^T hx)^{-1} sum hx^T hp mu_p.
Twist expected_bias_from_map(const JacobianBlockSet& blocks,
                             const Eigen::Vector3d& mu_p);

}  // namespace featsel
