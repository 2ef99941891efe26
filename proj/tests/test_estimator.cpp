#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "featsel/estimator.hpp"
#include "test_support.hpp"

using namespace featsel;

namespace {

double total_squared_residual(const Pose& pose,
                              const std::vector<Landmark>& landmarks,
                              const std::vector<PixelObservation>& obs,
                              const CameraIntrinsics& cam) {
  double sum = 0.0;
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    const PixelObservation h = project(pose, landmarks[i], cam);
    sum += (obs[i].u - h.u) * (obs[i].u - h.u) +
           (obs[i].v - h.v) * (obs[i].v - h.v);
  }
  return sum;
}

}  // namespace

TEST_CASE("exact observations from the true pose converge immediately") {
  std::mt19937_64 rng(21);
  const CameraIntrinsics cam;
  const test::TestScene scene = test::exact_scene(rng, 30, cam);
  const GaussNewtonResult res = gauss_newton_pose(
      scene.true_pose, scene.landmarks, scene.observations, cam);
  CHECK(res.iterations <= 2);
  const PoseError err = pose_error(res.pose, scene.true_pose);
  CHECK(err.translational_m < 1e-10);
  CHECK(err.rotational_deg < 1e-10);
}

TEST_CASE("zero-noise solves recover the true pose from the identity guess") {
  std::mt19937_64 rng(22);
  const CameraIntrinsics cam;
  for (int i = 0; i < 20; ++i) {
    const test::TestScene scene = test::exact_scene(rng, 40, cam);
    const GaussNewtonResult res = gauss_newton_pose(
        Pose{}, scene.landmarks, scene.observations, cam);
    const PoseError err = pose_error(res.pose, scene.true_pose);
    CHECK(err.translational_m < 1e-8);
    CHECK(err.rotational_deg < 1e-8);
  }
}

TEST_CASE("solver is deterministic") {
  std::mt19937_64 rng(23);
  const CameraIntrinsics cam;
  const test::TestScene scene = test::exact_scene(rng, 25, cam);
  const GaussNewtonResult a = gauss_newton_pose(
      Pose{}, scene.landmarks, scene.observations, cam);
  const GaussNewtonResult b = gauss_newton_pose(
      Pose{}, scene.landmarks, scene.observations, cam);
  CHECK(a.iterations == b.iterations);
  CHECK((a.pose.rotation - b.pose.rotation).norm() == 0.0);
  CHECK((a.pose.translation - b.pose.translation).norm() == 0.0);
}

TEST_CASE("residual is non-increasing across iterations on clean problems") {
  std::mt19937_64 rng(24);
  const CameraIntrinsics cam;
  const test::TestScene scene = test::exact_scene(rng, 30, cam);
  double prev = total_squared_residual(Pose{}, scene.landmarks,
                                       scene.observations, cam);
  for (int iters = 1; iters <= 8; ++iters) {
    GaussNewtonConfig cfg;
    cfg.max_iters = iters;
    const GaussNewtonResult res = gauss_newton_pose(
        Pose{}, scene.landmarks, scene.observations, cam, cfg);
    const double now = total_squared_residual(res.pose, scene.landmarks,
                                              scene.observations, cam);
    CHECK(now <= prev + 1e-12);
    prev = now;
  }
}

TEST_CASE("argument contracts of the solver") {
  const CameraIntrinsics cam;
  const std::vector<Landmark> two = {Landmark(0, 0, 5), Landmark(0.5, 0, 5)};
  const std::vector<PixelObservation> obs2 = {{320, 240}, {360, 240}};
  CHECK_THROWS_AS(gauss_newton_pose(Pose{}, two, obs2, cam),
                  DegenerateGeometryError);

  const std::vector<Landmark> three = {Landmark(0, 0, 5), Landmark(0.5, 0, 5),
                                       Landmark(0, 0.5, 5)};
  CHECK_THROWS_AS(gauss_newton_pose(Pose{}, three, obs2, cam),
                  std::invalid_argument);

  GaussNewtonConfig cfg;
  cfg.max_iters = 0;
  const std::vector<PixelObservation> obs3 = {{320, 240}, {360, 240},
                                              {320, 280}};
  CHECK_THROWS_AS(gauss_newton_pose(Pose{}, three, obs3, cam, cfg),
                  std::invalid_argument);
}

TEST_CASE("features behind the camera are dropped per iteration") {
  std::mt19937_64 rng(25);
  const CameraIntrinsics cam;
  test::TestScene scene = test::exact_scene(rng, 10, cam);
  // an extra landmark behind the initial pose cannot contribute at first
  scene.landmarks.push_back(Landmark(0.0, 0.0, -3.0));
  scene.observations.push_back(PixelObservation{100.0, 100.0});
  const GaussNewtonResult res = gauss_newton_pose(
      Pose{}, scene.landmarks, scene.observations, cam);
  const PoseError err = pose_error(res.pose, scene.true_pose);
  CHECK(err.translational_m < 1e-6);

  const std::vector<Landmark> mostly_behind = {
      Landmark(0, 0, -5), Landmark(0.5, 0, -5), Landmark(0, 0, 5),
      Landmark(0.2, 0, 5)};
  const std::vector<PixelObservation> obs = {
      {320, 240}, {360, 240}, {320, 240}, {340, 240}};
  CHECK_THROWS_AS(gauss_newton_pose(Pose{}, mostly_behind, obs, cam),
                  DegenerateGeometryError);
}

TEST_CASE("pose error examples") {
  const Pose id;
  const PoseError zero = pose_error(id, id);
  CHECK(zero.translational_m == 0.0);
  CHECK(zero.rotational_deg == 0.0);

  Pose shifted;
  shifted.translation = Eigen::Vector3d(0.3, 0.0, 0.4);
  CHECK(pose_error(shifted, id).translational_m == doctest::Approx(0.5));
  CHECK(pose_error(shifted, id).rotational_deg == doctest::Approx(0.0));

  Twist xi = Twist::Zero();
  xi.tail<3>() = Eigen::Vector3d(0, 10.0 * M_PI / 180.0, 0);
  const Pose rotated = se3_exp(xi);
  CHECK(pose_error(rotated, id).rotational_deg == doctest::Approx(10.0));
  CHECK(pose_error(rotated, id).rotational_deg <= 180.0);
}

TEST_CASE("measurement covariance scales with the noise variance") {
  std::mt19937_64 rng(26);
  const CameraIntrinsics cam;
  const test::TestScene scene = test::exact_scene(rng, 30, cam);
  const JacobianBlockSet blocks =
      compute_jacobian_blocks(scene.true_pose, scene.landmarks, cam);

  const Mat6 zero = covariance_from_measurement(blocks, 0.0);
  CHECK(zero.norm() == 0.0);

  const Mat6 c1 = covariance_from_measurement(blocks, 1.0);
  const Mat6 c2 = covariance_from_measurement(blocks, 2.0);
  CHECK((c2 - 4.0 * c1).norm() < 1e-12 * c2.norm());
  CHECK((c1 - c1.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::SelfAdjointEigenSolver<Mat6> es(c1, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues()(0) > 0.0);
}

TEST_CASE("map covariance is symmetric positive definite and scales") {
  std::mt19937_64 rng(27);
  const CameraIntrinsics cam;
  const test::TestScene scene = test::exact_scene(rng, 30, cam);
  const JacobianBlockSet blocks =
      compute_jacobian_blocks(scene.true_pose, scene.landmarks, cam);

  CHECK(covariance_from_map(blocks, 0.0).norm() == 0.0);
  const Mat6 c1 = covariance_from_map(blocks, 0.01);
  const Mat6 c3 = covariance_from_map(blocks, 0.03);
  CHECK((c3 - 9.0 * c1).norm() < 1e-12 * c3.norm());
  CHECK((c1 - c1.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::SelfAdjointEigenSolver<Mat6> es(c1, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues()(0) > 0.0);
}

TEST_CASE("covariance propagation rejects rank-deficient feature sets") {
  const CameraIntrinsics cam;
  const std::vector<Landmark> one = {Landmark(0, 0, 5)};
  const JacobianBlockSet blocks = compute_jacobian_blocks(Pose{}, one, cam);
  CHECK_THROWS_AS(covariance_from_measurement(blocks, 1.0),
                  DegenerateGeometryError);
  CHECK_THROWS_AS(covariance_from_map(blocks, 0.01), DegenerateGeometryError);
  CHECK_THROWS_AS(expected_bias_from_map(blocks, Eigen::Vector3d(1, 0, 0)),
                  DegenerateGeometryError);
}

TEST_CASE("map covariance rejects singular per-feature blocks") {
  JacobianBlockSet blocks;
  for (int i = 0; i < 6; ++i) {
    Mat2x3 hp;
    hp << 1, 0, 0, 1, 0, 0;  // rank-1 for every feature
    Mat2x6 hx = Mat2x6::Zero();
    hx(0, i % 6) = 1.0;
    blocks.hp.push_back(hp);
    blocks.hx.push_back(hx);
    blocks.hc.push_back(Mat3x6::Zero());
  }
  CHECK_THROWS_AS(covariance_from_map(blocks, 0.01), DegenerateGeometryError);
}

TEST_CASE("expected bias is linear in the noise mean and zero at zero") {
  std::mt19937_64 rng(28);
  const CameraIntrinsics cam;
  const test::TestScene scene = test::exact_scene(rng, 30, cam);
  const JacobianBlockSet blocks =
      compute_jacobian_blocks(scene.true_pose, scene.landmarks, cam);

  CHECK(expected_bias_from_map(blocks, Eigen::Vector3d::Zero()).norm() == 0.0);
  const Eigen::Vector3d mu(0.05, -0.02, 0.01);
  const Twist b1 = expected_bias_from_map(blocks, mu);
  const Twist b2 = expected_bias_from_map(blocks, 2.0 * mu);
  CHECK((b2 - 2.0 * b1).norm() < 1e-12 * b2.norm());
}
