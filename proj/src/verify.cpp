#include "featsel/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "featsel/estimator.hpp"
#include "featsel/rng.hpp"
#include "featsel/selector.hpp"
#include "featsel/simulator.hpp"

namespace featsel::verify {

namespace {

constexpr int kMcSamples = 10000;
constexpr double kCovTol = 0.10;
constexpr double kBiasTol = 0.05;
constexpr double kBiasFloor = 1e-4;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

// Fixed-geometry test scene with exact observations; noise is applied per
// Monte-Carlo sample on top.
SimConfig mc_config() {
  SimConfig cfg;
  cfg.n_points = 50;
  cfg.depth_range = {4.0, 6.0};
  cfg.subset_sizes = {3};
  cfg.methods = {SelectionMethod::All};
  cfg.trials = 1;
  return cfg;
}

struct McStats {
  Twist mean = Twist::Zero();
  Mat6 cov = Mat6::Zero();
};

// Empirical mean / covariance of the estimate-to-truth error twist over
// repeated solves with freshly drawn noise.
McStats monte_carlo_errors(const Scene& base, const SimConfig& cfg,
                           const NoiseModel& noise, int samples,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = static_cast<int>(base.true_landmarks.size());

  Twist sum = Twist::Zero();
  Mat6 sum_sq = Mat6::Zero();
  std::vector<Landmark> landmarks(base.true_landmarks.begin(),
                                  base.true_landmarks.end());
  std::vector<PixelObservation> observations(base.observations.begin(),
                                             base.observations.end());

  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i) {
      Landmark p = base.true_landmarks[i];
      if (noise.sigma_p > 0.0 || noise.mu_p.norm() > 0.0) {
        for (int axis = 0; axis < 3; ++axis) {
          p[axis] += noise.mu_p[axis] + noise.sigma_p * gauss(rng);
        }
      }
      landmarks[i] = p;
      PixelObservation z = base.observations[i];
      if (noise.sigma_z > 0.0) {
        z.u += noise.sigma_z * gauss(rng);
        z.v += noise.sigma_z * gauss(rng);
      }
      observations[i] = z;
    }
    const GaussNewtonResult gn =
        gauss_newton_pose(Pose{}, landmarks, observations, cfg.camera, cfg.gn);
    const Twist eps = se3_log(compose(inverse(gn.pose), base.true_pose));
    sum += eps;
    sum_sq.noalias() += eps * eps.transpose();
  }

  McStats stats;
  stats.mean = sum / samples;
  stats.cov =
      (sum_sq - samples * stats.mean * stats.mean.transpose()) / (samples - 1);
  return stats;
}

double rel_frobenius(const Mat6& a, const Mat6& b) {
  return (a - b).norm() / b.norm();
}

Mat3x6 random_block(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat3x6 b;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 6; ++c) b(r, c) = gauss(rng);
  }
  return b;
}

Mat6 info_sum(const std::vector<Mat3x6>& blocks, const std::vector<int>& s) {
  Mat6 q = Mat6::Zero();
  for (int i : s) q.noalias() += blocks[i].transpose() * blocks[i];
  return q;
}

}  // namespace

std::vector<CheckResult> covariance_suite() {
  std::vector<CheckResult> out;
  const SimConfig cfg = mc_config();
  const Scene scene = generate_scene(cfg, seed_mix({kVerifyStream, 1}));
  const JacobianBlockSet blocks = compute_jacobian_blocks(
      scene.true_pose, scene.true_landmarks, cfg.camera);

  {
    const Mat6 analytic = covariance_from_measurement(blocks, 0.0);
    const McStats mc = monte_carlo_errors(scene, cfg, NoiseModel{}, 50,
                                          seed_mix({kVerifyStream, 2}));
    const bool pass =
        analytic.norm() == 0.0 && mc.cov.cwiseAbs().maxCoeff() < 1e-15;
    out.push_back({"zero-noise covariance is zero", pass,
                   "analytic norm " + fmt(analytic.norm()) + ", empirical max " +
                       fmt(mc.cov.cwiseAbs().maxCoeff())});
  }
  {
    NoiseModel noise;
    noise.sigma_z = 1.0;
    const Mat6 analytic = covariance_from_measurement(blocks, noise.sigma_z);
    const McStats mc = monte_carlo_errors(scene, cfg, noise, kMcSamples,
                                          seed_mix({kVerifyStream, 3}));
    const double err = rel_frobenius(mc.cov, analytic);
    out.push_back({"pixel-noise covariance matches Monte-Carlo",
                   err <= kCovTol,
                   "rel Frobenius error " + fmt(err) + " (tol " +
                       fmt(kCovTol) + ", " + std::to_string(kMcSamples) +
                       " samples)"});
  }
  {
    NoiseModel noise;
    noise.sigma_p = 0.01;
    const Mat6 analytic = covariance_from_map(blocks, noise.sigma_p);
    const McStats mc = monte_carlo_errors(scene, cfg, noise, kMcSamples,
                                          seed_mix({kVerifyStream, 4}));
    const double err = rel_frobenius(mc.cov, analytic);
    out.push_back({"map-noise covariance matches Monte-Carlo",
                   err <= kCovTol,
                   "rel Frobenius error " + fmt(err) + " (tol " +
                       fmt(kCovTol) + ", " + std::to_string(kMcSamples) +
                       " samples)"});
  }
  return out;
}

std::vector<CheckResult> bias_suite() {
  std::vector<CheckResult> out;
  const SimConfig cfg = mc_config();
  const Scene scene = generate_scene(cfg, seed_mix({kVerifyStream, 5}));
  const JacobianBlockSet blocks = compute_jacobian_blocks(
      scene.true_pose, scene.true_landmarks, cfg.camera);

  NoiseModel noise;
  noise.mu_p = Eigen::Vector3d::Constant(0.05);
  noise.sigma_p = 0.01;
  const Twist analytic = expected_bias_from_map(blocks, noise.mu_p);
  const McStats mc = monte_carlo_errors(scene, cfg, noise, kMcSamples,
                                        seed_mix({kVerifyStream, 6}));

  double worst = 0.0;
  int checked = 0;
  for (int i = 0; i < 6; ++i) {
    if (std::abs(analytic[i]) <= kBiasFloor) continue;
    ++checked;
    worst = std::max(worst,
                     std::abs(mc.mean[i] - analytic[i]) / std::abs(analytic[i]));
  }
  const bool pass = checked > 0 && worst <= kBiasTol;
  out.push_back({"map-bias prediction matches Monte-Carlo mean", pass,
                 std::to_string(checked) + " components checked, worst rel error " +
                     fmt(worst) + " (tol " + fmt(kBiasTol) + ")"});
  return out;
}

std::vector<CheckResult> submodular_suite() {
  std::vector<CheckResult> out;
  const double delta = kDefaultDelta;

  {
    std::mt19937_64 rng(seed_mix({kVerifyStream, 7}));
    int failures = 0;
    int mono_failures = 0;
    const int probes = 1000;
    for (int probe = 0; probe < probes; ++probe) {
      std::uniform_int_distribution<int> usize(6, 16);
      const int n = usize(rng);
      std::vector<Mat3x6> blocks(n);
      for (auto& b : blocks) b = random_block(rng);

      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::uniform_int_distribution<int> ua(0, n - 2);
      const int a_size = ua(rng);
      std::uniform_int_distribution<int> ub(a_size, n - 1);
      const int b_size = ub(rng);
      const std::vector<int> set_a(perm.begin(), perm.begin() + a_size);
      const std::vector<int> set_b(perm.begin(), perm.begin() + b_size);
      const int x = perm[b_size];

      const Mat6 qa = info_sum(blocks, set_a);
      const Mat6 qb = info_sum(blocks, set_b);
      const Mat6 gx = blocks[x].transpose() * blocks[x];

      const double fa = metric_value(qa, MetricKind::MaxLogDet, delta);
      const double fb = metric_value(qb, MetricKind::MaxLogDet, delta);
      const double fax = metric_value(qa + gx, MetricKind::MaxLogDet, delta);
      const double fbx = metric_value(qb + gx, MetricKind::MaxLogDet, delta);
      if ((fax - fa) < (fbx - fb) - 1e-9) ++failures;

      if (fax < fa - 1e-9) ++mono_failures;
      for (const MetricKind mk :
           {MetricKind::MaxTrace, MetricKind::MaxMinEig}) {
        if (metric_value(qb + gx, mk, delta) <
            metric_value(qb, mk, delta) - 1e-9) {
          ++mono_failures;
        }
      }
    }
    out.push_back({"log-det gains are diminishing on nested sets",
                   failures == 0,
                   std::to_string(failures) + "/" + std::to_string(probes) +
                       " probes violated"});
    out.push_back({"objectives are monotone under block addition",
                   mono_failures == 0,
                   std::to_string(mono_failures) + " violations"});
  }
  {
    std::mt19937_64 rng(seed_mix({kVerifyStream, 8}));
    int mismatches = 0;
    const int instances = 100;
    for (int inst = 0; inst < instances; ++inst) {
      std::uniform_int_distribution<int> usize(5, 30);
      const int n = usize(rng);
      std::uniform_int_distribution<int> uk(1, n);
      const int k = uk(rng);
      std::vector<Mat3x6> blocks(n);
      for (auto& b : blocks) b = random_block(rng);

      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::vector<double> traces(n);
      for (int i = 0; i < n; ++i) {
        traces[i] = (blocks[i].transpose() * blocks[i]).trace();
      }
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (traces[a] != traces[b]) return traces[a] > traces[b];
        return a < b;
      });
      order.resize(k);

      const SelectionResult greedy =
          greedy_select(blocks, k, MetricKind::MaxTrace, delta);
      if (greedy.chosen != order) ++mismatches;
    }
    out.push_back({"greedy trace selection equals top-k sort",
                   mismatches == 0,
                   std::to_string(mismatches) + "/" +
                       std::to_string(instances) + " instances differ"});
  }
  return out;
}

std::vector<CheckResult> bound_suite() {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(seed_mix({kVerifyStream, 9}));
  const double delta = kDefaultDelta;
  const double bound = 1.0 - 1.0 / std::exp(1.0);
  const int instances = 100;
  const int n = 10;
  const int k = 4;

  double min_ratio = std::numeric_limits<double>::infinity();
  int violations = 0;
  for (int inst = 0; inst < instances; ++inst) {
    std::vector<Mat3x6> blocks(n);
    for (auto& b : blocks) b = random_block(rng);
    const SelectionResult greedy =
        greedy_select(blocks, k, MetricKind::MaxLogDet, delta);
    const SelectionResult exact =
        brute_force_select(blocks, k, MetricKind::MaxLogDet, delta);
    const double g_greedy = logdet_gain(greedy.metric_value, delta);
    const double g_exact = logdet_gain(exact.metric_value, delta);
    const double ratio = g_greedy / g_exact;
    min_ratio = std::min(min_ratio, ratio);
    if (ratio < bound) ++violations;
    if (g_exact < g_greedy - 1e-9) ++violations;  // exhaustive is optimal
  }
  out.push_back({"greedy log-det gain is within 1-1/e of exhaustive",
                 violations == 0,
                 "min gain ratio " + fmt(min_ratio) + " over " +
                     std::to_string(instances) + " instances (bound " +
                     fmt(bound) + ")"});
  return out;
}

std::vector<CheckResult> run_suite(const std::string& name) {
  if (name == "covariance") return covariance_suite();
  if (name == "bias") return bias_suite();
  if (name == "submodular") return submodular_suite();
  if (name == "bound") return bound_suite();
  throw std::invalid_argument("unknown verify suite: " + name);
}

}  // namespace featsel::verify
