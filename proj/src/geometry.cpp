#include "featsel/geometry.hpp"

#include <cmath>

namespace featsel {

namespace {

constexpr double kSmallAngle = 1e-12;       // squared-angle series switch
constexpr double kNearPiMargin = 1e-3;      // quaternion branch threshold
constexpr double kFeatureCondLimit = 1e8;

Eigen::Vector3d transform(const Pose& pose, const Landmark& p) {
  return pose.rotation * p + pose.translation;
}

// V(phi) from the closed-form exponential: t = V * rho.
Eigen::Matrix3d so3_left_jacobian(const Eigen::Vector3d& phi) {
  const double theta2 = phi.squaredNorm();
  const Eigen::Matrix3d W = skew(phi);
  if (theta2 < kSmallAngle) {
    return Eigen::Matrix3d::Identity() + 0.5 * W + W * W / 6.0;
  }
  const double theta = std::sqrt(theta2);
  const double a = (1.0 - std::cos(theta)) / theta2;
  const double b = (theta - std::sin(theta)) / (theta2 * theta);
  return Eigen::Matrix3d::Identity() + a * W + b * W * W;
}

Eigen::Matrix3d so3_left_jacobian_inverse(const Eigen::Vector3d& phi) {
  const double theta2 = phi.squaredNorm();
  const Eigen::Matrix3d W = skew(phi);
  double c;
  if (theta2 < kSmallAngle) {
    c = 1.0 / 12.0;
  } else {
    const double theta = std::sqrt(theta2);
    const double half = 0.5 * theta;
    c = (1.0 - half * std::cos(half) / std::sin(half)) / theta2;
  }
  return Eigen::Matrix3d::Identity() - 0.5 * W + c * W * W;
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& phi) {
  const double theta2 = phi.squaredNorm();
  const Eigen::Matrix3d W = skew(phi);
  if (theta2 < kSmallAngle) {
    return Eigen::Matrix3d::Identity() + W + 0.5 * W * W;
  }
  const double theta = std::sqrt(theta2);
  return Eigen::Matrix3d::Identity() + (std::sin(theta) / theta) * W +
         ((1.0 - std::cos(theta)) / theta2) * W * W;
}

Eigen::Vector3d so3_log(const Eigen::Matrix3d& r) {
  const double trace = r.trace();
  const double cos_theta = std::clamp(0.5 * (trace - 1.0), -1.0, 1.0);
  const double theta = std::acos(cos_theta);

  if (theta > M_PI - kNearPiMargin) {
    // Axis extraction through the quaternion is stable as sin(theta) -> 0.
    const Eigen::Quaterniond q(r);
    Eigen::Vector3d axis(q.x(), q.y(), q.z());
    const double s = axis.norm();
    if (s < kSmallAngle) return Eigen::Vector3d::Zero();
    const double angle = 2.0 * std::atan2(s, std::abs(q.w()));
    if (q.w() < 0.0) axis = -axis;
    return (angle / s) * axis;
  }

  const Eigen::Vector3d v(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0),
                          r(1, 0) - r(0, 1));
  if (theta < 1e-6) {
    return 0.5 * (1.0 + theta * theta / 6.0) * v;
  }
  return (theta / (2.0 * std::sin(theta))) * v;
}

}  // namespace

Eigen::Matrix3d skew(const Eigen::Vector3d& w) {
  Eigen::Matrix3d m;
  m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return m;
}

Pose compose(const Pose& a, const Pose& b) {
  return Pose{a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

Pose inverse(const Pose& p) {
  Pose out;
  out.rotation = p.rotation.transpose();
  out.translation = -(out.rotation * p.translation);
  return out;
}

Pose se3_exp(const Twist& xi) {
  const Eigen::Vector3d rho = xi.head<3>();
  const Eigen::Vector3d phi = xi.tail<3>();
  Pose out;
  out.rotation = so3_exp(phi);
  out.translation = so3_left_jacobian(phi) * rho;
  return out;
}

Twist se3_log(const Pose& p) {
  const Eigen::Vector3d phi = so3_log(p.rotation);
  Twist xi;
  xi.tail<3>() = phi;
  xi.head<3>() = so3_left_jacobian_inverse(phi) * p.translation;
  return xi;
}

PixelObservation project(const Pose& pose, const Landmark& p,
                         const CameraIntrinsics& cam) {
  const Eigen::Vector3d pc = transform(pose, p);
  if (pc.z() <= 0.0) {
    throw BehindCameraError("project: landmark depth " +
                            std::to_string(pc.z()) + " <= 0");
  }
  return PixelObservation{cam.cx + cam.fx * pc.x() / pc.z(),
                          cam.cy + cam.fy * pc.y() / pc.z()};
}

Landmark backproject(const Pose& pose, const PixelObservation& px,
                     double depth, const CameraIntrinsics& cam) {
  if (depth <= 0.0) {
    throw BehindCameraError("backproject: depth " + std::to_string(depth) +
                            " <= 0");
  }
  const Eigen::Vector3d pc(depth * (px.u - cam.cx) / cam.fx,
                           depth * (px.v - cam.cy) / cam.fy, depth);
  const Pose inv = inverse(pose);
  return transform(inv, pc);
}

bool in_image(const PixelObservation& px, const CameraIntrinsics& cam) {
  return px.u >= 0.0 && px.u < cam.width && px.v >= 0.0 && px.v < cam.height;
}

namespace {

// Projection derivative w.r.t. the camera-frame point.
Mat2x3 pixel_wrt_camera_point(const Eigen::Vector3d& pc,
                              const CameraIntrinsics& cam) {
  const double iz = 1.0 / pc.z();
  Mat2x3 a;
  a << cam.fx * iz, 0.0, -cam.fx * pc.x() * iz * iz,
       0.0, cam.fy * iz, -cam.fy * pc.y() * iz * iz;
  return a;
}

Eigen::Vector3d camera_point_or_throw(const Pose& pose, const Landmark& p,
                                      const char* who) {
  const Eigen::Vector3d pc = transform(pose, p);
  if (pc.z() <= 0.0) {
    throw BehindCameraError(std::string(who) + ": landmark depth " +
                            std::to_string(pc.z()) + " <= 0");
  }
  return pc;
}

}  // namespace

Mat2x6 pose_jacobian(const Pose& pose, const Landmark& p,
                     const CameraIntrinsics& cam) {
  const Eigen::Vector3d pc = camera_point_or_throw(pose, p, "pose_jacobian");
  const Mat2x3 a = pixel_wrt_camera_point(pc, cam);
  Mat2x6 j;
  j.leftCols<3>() = a * pose.rotation;
  j.rightCols<3>() = -a * pose.rotation * skew(p);
  return j;
}

Mat2x3 point_jacobian(const Pose& pose, const Landmark& p,
                      const CameraIntrinsics& cam) {
  const Eigen::Vector3d pc = camera_point_or_throw(pose, p, "point_jacobian");
  return pixel_wrt_camera_point(pc, cam) * pose.rotation;
}

Mat3x6 combined_block(const Mat2x6& hx, const Mat2x3& hp) {
  Eigen::Matrix3d lhs;
  lhs.topRows<2>() = hp;
  lhs.row(2) << 0.0, 0.0, 1.0;

  // spectral condition number from the Gram matrix: cond(lhs)^2
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(
      lhs.transpose() * lhs, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  const double lmax = es.eigenvalues()(2);
  if (!(lmin > 0.0) ||
      lmax / lmin > kFeatureCondLimit * kFeatureCondLimit) {
    throw DegenerateFeatureError(
        "combined_block: per-feature system condition number exceeds 1e8");
  }

  Eigen::Matrix<double, 3, 6> rhs = Eigen::Matrix<double, 3, 6>::Zero();
  rhs.topRows<2>() = hx;
  return lhs.partialPivLu().solve(rhs);
}

JacobianBlockSet compute_jacobian_blocks(const Pose& pose,
                                         std::span<const Landmark> landmarks,
                                         const CameraIntrinsics& cam) {
  JacobianBlockSet set;
  set.linearization_pose = pose;
  set.hx.reserve(landmarks.size());
  set.hp.reserve(landmarks.size());
  set.hc.reserve(landmarks.size());
  for (const Landmark& p : landmarks) {
    const Eigen::Vector3d pc =
        camera_point_or_throw(pose, p, "compute_jacobian_blocks");
    const Mat2x3 a = pixel_wrt_camera_point(pc, cam);
    Mat2x6 hx;
    hx.leftCols<3>() = a * pose.rotation;
    hx.rightCols<3>() = -a * pose.rotation * skew(p);
    const Mat2x3 hp = a * pose.rotation;
    set.hx.push_back(hx);
    set.hp.push_back(hp);
    set.hc.push_back(combined_block(hx, hp));
  }
  return set;
}

}  // namespace featsel
