#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "featsel/estimator.hpp"
#include "featsel/selector.hpp"

namespace featsel {

enum class SelectionMethod { MaxTrace, MinCond, MaxMinEig, MaxLogDet, Random, All };

// Stable CSV / CLI names: trace, cond, mineig, logdet, random, all.
const char* to_string(SelectionMethod method);
SelectionMethod parse_method(const std::string& name);

// True camera displacement drawn per trial: rotation axis uniform on the
// sphere, angle uniform in [0, max_rotation_deg], translation components
// uniform in [-max_translation_m, max_translation_m].
struct PosePerturbation {
  double max_rotation_deg = 5.0;
  double max_translation_m = 0.1;
};

struct SimConfig {
  int n_points = 200;
  std::pair<double, double> depth_range{1.0, 10.0};
  PosePerturbation pose_perturbation;
  NoiseModel noise;
  std::vector<int> subset_sizes;
  std::vector<SelectionMethod> methods;
  int trials = 1;
  std::uint64_t base_seed = 0;
  CameraIntrinsics camera;
  GaussNewtonConfig gn;
};

// Throws std::invalid_argument naming the offending field.
void validate_config(const SimConfig& cfg);

struct Scene {
  std::vector<Landmark> true_landmarks;
  std::vector<Landmark> perturbed_landmarks;
  Pose true_pose;
  std::vector<PixelObservation> observations;
  std::vector<char> valid;
};

// Samples landmarks uniformly in pixel space at uniform depth (seen from the
// identity pose), applies the per-trial true displacement, map noise and
// pixel noise, and rejection-resamples each landmark until it is visible in
// both views with a usable perturbed copy. Throws Error if a landmark
// exceeds the resampling cap.
Scene generate_scene(const SimConfig& cfg, std::uint64_t rng_seed);

struct TrialRecord {
  int trial = 0;
  SelectionMethod method = SelectionMethod::All;
  int k = 0;
  PoseError error;
  double select_time_us = 0.0;
  int solve_iters = 0;
  bool failed = false;
};

// Selects a k-subset with the given method (All uses every feature, metric
// methods linearize at the identity initial guess using the perturbed map),
// then re-estimates the pose from the subset's noisy observations.
TrialRecord run_trial(const Scene& scene, int k, SelectionMethod method,
                      const SimConfig& cfg, std::uint64_t selection_seed,
                      int trial_id);

struct RmsEntry {
  SelectionMethod method = SelectionMethod::All;
  int k = 0;
  double rms_translational_m = 0.0;
  double rms_rotational_deg = 0.0;
  int failures = 0;
  int trials = 0;
};

struct SweepResult {
  std::vector<TrialRecord> records;  // sorted by (method, k, trial)
  std::vector<RmsEntry> rms;
};

// Full Monte-Carlo sweep over (method, k, trial). Every method and subset
// size sees the same scene and observations within a trial. Trials fan out
// across worker threads (workers <= 0 selects the hardware concurrency).
SweepResult run_sweep(const SimConfig& cfg, int workers = 0);

}  // namespace featsel
