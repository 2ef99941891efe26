#include "featsel/estimator.hpp"

#include <cmath>

namespace featsel {

namespace {

constexpr double kPivotRel = 1e-12;

struct NormalEq {
  Mat6 a = Mat6::Zero();
  Twist b = Twist::Zero();
  int used = 0;
};

NormalEq accumulate(const Pose& pose, std::span<const Landmark> landmarks,
                    std::span<const PixelObservation> observations,
                    const CameraIntrinsics& cam) {
  NormalEq eq;
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    const Eigen::Vector3d pc =
        pose.rotation * landmarks[i] + pose.translation;
    if (pc.z() <= 0.0) continue;  // drop for this iteration
    const double iz = 1.0 / pc.z();
    Mat2x3 a;
    a << cam.fx * iz, 0.0, -cam.fx * pc.x() * iz * iz,
         0.0, cam.fy * iz, -cam.fy * pc.y() * iz * iz;
    Mat2x6 j;
    j.leftCols<3>() = a * pose.rotation;
    j.rightCols<3>() = -a * pose.rotation * skew(landmarks[i]);
    const Eigen::Vector2d r(
        observations[i].u - (cam.cx + cam.fx * pc.x() * iz),
        observations[i].v - (cam.cy + cam.fy * pc.y() * iz));
    eq.a.noalias() += j.transpose() * j;
    eq.b.noalias() += j.transpose() * r;
    ++eq.used;
  }
  return eq;
}

bool solvable(const Eigen::LDLT<Mat6>& ldlt) {
  if (ldlt.info() != Eigen::Success) return false;
  const auto d = ldlt.vectorD();
  const double dmax = d.maxCoeff();
  return dmax > 0.0 && d.minCoeff() > kPivotRel * dmax;
}

// Solves a * x = b for symmetric PSD a; throws DegenerateGeometryError when
// rank-deficient even after one shot of relative damping.
Twist solve_normal_eq(Mat6 a, const Twist& b, double damping,
                      const char* who) {
  Eigen::LDLT<Mat6> ldlt(a);
  if (!solvable(ldlt)) {
    a.diagonal().array() += damping * a.trace() / 6.0;
    ldlt.compute(a);
    if (!solvable(ldlt)) {
      throw DegenerateGeometryError(std::string(who) +
                                    ": normal equations are rank-deficient");
    }
  }
  return ldlt.solve(b);
}

Mat6 invert_psd(const Mat6& a, const char* who) {
  const Eigen::LDLT<Mat6> ldlt(a);
  if (!solvable(ldlt)) {
    throw DegenerateGeometryError(std::string(who) +
                                  ": information matrix is rank-deficient");
  }
  Mat6 inv = ldlt.solve(Mat6::Identity());
  return 0.5 * (inv + inv.transpose());
}

}  // namespace

GaussNewtonResult gauss_newton_pose(const Pose& initial,
                                    std::span<const Landmark> landmarks,
                                    std::span<const PixelObservation> observations,
                                    const CameraIntrinsics& cam,
                                    const GaussNewtonConfig& cfg) {
  if (landmarks.size() != observations.size()) {
    throw std::invalid_argument(
        "gauss_newton_pose: landmark/observation count mismatch");
  }
  if (landmarks.size() < 3) {
    throw DegenerateGeometryError(
        "gauss_newton_pose: at least 3 features required");
  }
  if (cfg.max_iters < 1) {
    throw std::invalid_argument("gauss_newton_pose: max_iters must be >= 1");
  }

  GaussNewtonResult result;
  result.pose = initial;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const NormalEq eq = accumulate(result.pose, landmarks, observations, cam);
    if (eq.used < 3) {
      throw DegenerateGeometryError(
          "gauss_newton_pose: fewer than 3 features in front of the camera");
    }
    const Twist delta =
        solve_normal_eq(eq.a, eq.b, cfg.damping, "gauss_newton_pose");
    result.pose = compose(result.pose, se3_exp(delta));
    result.iterations = it + 1;
    if (delta.norm() < cfg.update_norm_tol) break;
  }
  return result;
}

PoseError pose_error(const Pose& estimate, const Pose& truth) {
  PoseError err;
  err.translational_m = (estimate.translation - truth.translation).norm();
  const Eigen::Matrix3d rel = estimate.rotation * truth.rotation.transpose();
  // geodesic angle acos((trace - 1) / 2), evaluated through atan2 of the
  // sine (skew part) and cosine for full precision near zero
  const Eigen::Vector3d sine_axis(rel(2, 1) - rel(1, 2),
                                  rel(0, 2) - rel(2, 0),
                                  rel(1, 0) - rel(0, 1));
  const double s = 0.5 * sine_axis.norm();
  const double c = std::clamp(0.5 * (rel.trace() - 1.0), -1.0, 1.0);
  err.rotational_deg = std::atan2(s, c) * 180.0 / M_PI;
  return err;
}

Mat6 covariance_from_measurement(const JacobianBlockSet& blocks,
                                 double sigma_z) {
  Mat6 a = Mat6::Zero();
  for (const Mat2x6& hx : blocks.hx) a.noalias() += hx.transpose() * hx;
  const Mat6 inv = invert_psd(a, "covariance_from_measurement");
  return sigma_z * sigma_z * inv;
}

Mat6 covariance_from_map(const JacobianBlockSet& blocks, double sigma_p) {
  Mat6 a = Mat6::Zero();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Eigen::Matrix2d w = blocks.hp[i] * blocks.hp[i].transpose();
    const double det = w(0, 0) * w(1, 1) - w(0, 1) * w(1, 0);
    if (!(std::abs(det) > 1e-12 * w.squaredNorm())) {
      throw DegenerateGeometryError(
          "covariance_from_map: singular per-feature 2x2 block");
    }
    Eigen::Matrix2d winv;
    winv << w(1, 1), -w(0, 1), -w(1, 0), w(0, 0);
    winv /= det;
    a.noalias() += blocks.hx[i].transpose() * winv * blocks.hx[i];
  }
  const Mat6 inv = invert_psd(a, "covariance_from_map");
  return sigma_p * sigma_p * inv;
}

Twist expected_bias_from_map(const JacobianBlockSet& blocks,
                             const Eigen::Vector3d& mu_p) {
  Mat6 a = Mat6::Zero();
  Twist rhs = Twist::Zero();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    a.noalias() += blocks.hx[i].transpose() * blocks.hx[i];
    rhs.noalias() += blocks.hx[i].transpose() * (blocks.hp[i] * mu_p);
  }
  const Eigen::LDLT<Mat6> ldlt(a);
  if (!solvable(ldlt)) {
    throw DegenerateGeometryError(
        "expected_bias_from_map: information matrix is rank-deficient");
  }
  return ldlt.solve(rhs);
}

}  // namespace featsel
