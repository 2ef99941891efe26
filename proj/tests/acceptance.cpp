// End-to-end acceptance checks. Each criterion prints a single PASS/FAIL
// line; the exit code is the number of failures. An optional argument
// (e.g. "AC-3") restricts the run to one criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "featsel/estimator.hpp"
#include "featsel/rng.hpp"
#include "featsel/selector.hpp"
#include "featsel/simulator.hpp"
#include "featsel/verify.hpp"
#include "test_support.hpp"

namespace {

using namespace featsel;
using Clock = std::chrono::steady_clock;

struct Criterion {
  std::string id;
  std::string label;
  double budget_s;
  std::function<bool(std::string&)> run;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

bool suite_passes(const std::vector<verify::CheckResult>& checks,
                  std::string& details) {
  bool ok = true;
  for (const auto& c : checks) {
    if (!details.empty()) details += "; ";
    details += c.name + ": " + (c.pass ? "pass" : "FAIL") + " (" + c.details +
               ")";
    ok = ok && c.pass;
  }
  return ok;
}

bool ac1_zero_noise_recovery(std::string& details) {
  std::mt19937_64 rng(seed_mix({kVerifyStream, 100}));
  const CameraIntrinsics cam;
  double worst_t = 0.0;
  double worst_r = 0.0;
  for (int i = 0; i < 100; ++i) {
    const test::TestScene scene = test::exact_scene(rng, 50, cam);
    const GaussNewtonResult res = gauss_newton_pose(
        Pose{}, scene.landmarks, scene.observations, cam);
    const PoseError err = pose_error(res.pose, scene.true_pose);
    worst_t = std::max(worst_t, err.translational_m);
    worst_r = std::max(worst_r, err.rotational_deg);
  }
  details = "100 scenes, worst errors " + fmt(worst_t) + " m / " +
            fmt(worst_r) + " deg (tol 1e-8)";
  return worst_t < 1e-8 && worst_r < 1e-8;
}

bool ac2_jacobians_match_fd(std::string& details) {
  std::mt19937_64 rng(seed_mix({kVerifyStream, 101}));
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const CameraIntrinsics cam = test::random_camera(rng);
    const Pose pose = test::random_pose(rng, 0.5, 0.5);
    const Landmark p =
        test::random_visible_landmark(rng, pose, cam, 0.5, 20.0);
    worst = std::max(
        worst, test::matrix_rel_error(pose_jacobian(pose, p, cam),
                                      test::fd_pose_jacobian(pose, p, cam)));
    worst = std::max(
        worst, test::matrix_rel_error(point_jacobian(pose, p, cam),
                                      test::fd_point_jacobian(pose, p, cam)));
  }
  details = "1000 configurations, worst relative deviation " + fmt(worst) +
            " (tol 1e-5)";
  return worst < 1e-5;
}

struct RmsTable {
  std::map<std::pair<SelectionMethod, int>, RmsEntry> entries;
  int failures = 0;

  explicit RmsTable(const SweepResult& sweep) {
    for (const RmsEntry& e : sweep.rms) {
      entries[{e.method, e.k}] = e;
      failures += e.failures;
    }
  }
  const RmsEntry& at(SelectionMethod m, int k) const {
    return entries.at({m, k});
  }
};

bool ac5_subset_accuracy_sweep(std::string& details) {
  SimConfig cfg;
  cfg.n_points = 200;
  cfg.depth_range = {1.0, 10.0};
  cfg.noise.mu_p = Eigen::Vector3d::Constant(0.05);
  cfg.noise.sigma_p = 0.05;
  cfg.subset_sizes = {80, 100, 120, 140, 160, 180, 200};
  cfg.methods = {SelectionMethod::MaxLogDet, SelectionMethod::Random,
                 SelectionMethod::All};
  cfg.trials = 300;

  bool ok = true;
  for (const double sigma_z : {1.0, 2.0}) {
    cfg.noise.sigma_z = sigma_z;
    cfg.base_seed = 2025 + static_cast<std::uint64_t>(sigma_z);
    const RmsTable table(run_sweep(cfg));

    double worst_ratio_high_k = 0.0;
    for (const int k : {160, 180, 200}) {
      worst_ratio_high_k = std::max(
          worst_ratio_high_k,
          table.at(SelectionMethod::MaxLogDet, k).rms_translational_m /
              table.at(SelectionMethod::All, k).rms_translational_m);
    }
    const bool near_baseline = worst_ratio_high_k <= 1.05;

    int violated_k = 0;
    for (const int k : cfg.subset_sizes) {
      const RmsEntry& ld = table.at(SelectionMethod::MaxLogDet, k);
      const RmsEntry& rnd = table.at(SelectionMethod::Random, k);
      if (ld.rms_translational_m > rnd.rms_translational_m ||
          ld.rms_rotational_deg > rnd.rms_rotational_deg) {
        ++violated_k;
      }
    }
    const bool beats_random = violated_k <= 1;

    const RmsEntry& ld_full = table.at(SelectionMethod::MaxLogDet, 200);
    const RmsEntry& all_full = table.at(SelectionMethod::All, 200);
    const bool full_set_identical =
        ld_full.rms_translational_m == all_full.rms_translational_m &&
        ld_full.rms_rotational_deg == all_full.rms_rotational_deg;

    if (!details.empty()) details += " | ";
    details += "sigma_z=" + fmt(sigma_z) + ": max logdet/all trans ratio@k>=160 " +
               fmt(worst_ratio_high_k) + " (tol 1.05), k violating random " +
               std::to_string(violated_k) + "/7 (tol 1), k=200 identical " +
               (full_set_identical ? "yes" : "NO") + ", failed trials " +
               std::to_string(table.failures);
    ok = ok && near_baseline && beats_random && full_set_identical;
  }
  return ok;
}

bool ac6_stochastic_speedup(std::string& details) {
  std::mt19937_64 rng(seed_mix({kVerifyStream, 102}));
  std::vector<double> speedups;
  std::vector<double> ratios;
  for (int t = 0; t < 50; ++t) {
    const std::vector<Mat3x6> blocks = test::random_blocks(rng, 200, true);
    const SelectionResult greedy =
        greedy_select(blocks, 100, MetricKind::MaxLogDet);
    const SelectionResult stoch = stochastic_greedy_logdet(
        blocks, 100, 0.1, kDefaultDelta, seed_mix({kVerifyStream, 103,
                                                   static_cast<std::uint64_t>(t)}));
    speedups.push_back(greedy.time_us / stoch.time_us);
    ratios.push_back(logdet_gain(stoch.metric_value, kDefaultDelta) /
                     logdet_gain(greedy.metric_value, kDefaultDelta));
  }
  std::sort(speedups.begin(), speedups.end());
  std::sort(ratios.begin(), ratios.end());
  const double med_speedup = speedups[speedups.size() / 2];
  const double med_ratio = ratios[ratios.size() / 2];
  details = "50 instances (n=200, k=100, epsilon=0.1): median speedup " +
            fmt(med_speedup) + "x (need >= 5), median gain ratio " +
            fmt(med_ratio) + " (need >= 0.95)";
  return med_speedup >= 5.0 && med_ratio >= 0.95;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string filter = argc > 1 ? argv[1] : "";

  const std::vector<Criterion> criteria = {
      {"AC-1", "zero-noise pose recovery", 5.0, ac1_zero_noise_recovery},
      {"AC-2", "analytic Jacobians vs finite differences", 5.0,
       ac2_jacobians_match_fd},
      {"AC-3", "covariance predictions vs Monte-Carlo", 60.0,
       [](std::string& d) { return suite_passes(verify::covariance_suite(), d); }},
      {"AC-4", "bias prediction vs Monte-Carlo", 60.0,
       [](std::string& d) { return suite_passes(verify::bias_suite(), d); }},
      {"AC-5", "subset-size accuracy sweep", 900.0, ac5_subset_accuracy_sweep},
      {"AC-6", "stochastic greedy speedup and quality", 60.0,
       ac6_stochastic_speedup},
      {"AC-7", "greedy approximation bound", 30.0,
       [](std::string& d) { return suite_passes(verify::bound_suite(), d); }},
      {"AC-8", "submodularity and selection structure", 10.0,
       [](std::string& d) { return suite_passes(verify::submodular_suite(), d); }},
  };

  int failures = 0;
  int matched = 0;
  for (const Criterion& c : criteria) {
    if (!filter.empty() && filter != c.id) continue;
    ++matched;
    std::string details;
    const auto start = Clock::now();
    bool pass = false;
    try {
      pass = c.run(details);
    } catch (const std::exception& e) {
      details = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_budget = elapsed < c.budget_s;
    if (!in_budget) {
      details += " [over " + fmt(c.budget_s) + " s budget]";
    }
    const bool ok = pass && in_budget;
    std::printf("[%s] %s: %s (%s; %.2f s)\n", c.id.c_str(), c.label.c_str(),
                ok ? "PASS" : "FAIL", details.c_str(), elapsed);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (matched == 0) {
    std::fprintf(stderr, "unknown criterion filter: %s\n", filter.c_str());
    return 2;
  }
  return failures;
}
