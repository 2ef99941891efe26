#include "featsel/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "featsel/rng.hpp"

namespace featsel {

namespace {

constexpr int kResampleCap = 10000;

MetricKind metric_of(SelectionMethod method) {
  switch (method) {
    case SelectionMethod::MaxTrace:
      return MetricKind::MaxTrace;
    case SelectionMethod::MinCond:
      return MetricKind::MinCond;
    case SelectionMethod::MaxMinEig:
      return MetricKind::MaxMinEig;
    case SelectionMethod::MaxLogDet:
      return MetricKind::MaxLogDet;
    default:
      throw std::invalid_argument("metric_of: method has no metric");
  }
}

double normal_or_zero(std::mt19937_64& rng, double sigma) {
  if (sigma <= 0.0) return 0.0;
  std::normal_distribution<double> d(0.0, sigma);
  return d(rng);
}

Pose sample_true_pose(std::mt19937_64& rng, const PosePerturbation& pp) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Vector3d axis;
  do {
    axis = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
  } while (axis.norm() < 1e-12);
  axis.normalize();

  std::uniform_real_distribution<double> uangle(
      0.0, pp.max_rotation_deg * M_PI / 180.0);
  std::uniform_real_distribution<double> utrans(-pp.max_translation_m,
                                                pp.max_translation_m);
  Twist xi = Twist::Zero();
  xi.tail<3>() = uangle(rng) * axis;
  Pose pose = se3_exp(xi);
  pose.translation = Eigen::Vector3d(utrans(rng), utrans(rng), utrans(rng));
  return pose;
}

}  // namespace

const char* to_string(SelectionMethod method) {
  switch (method) {
    case SelectionMethod::MaxTrace:
      return "trace";
    case SelectionMethod::MinCond:
      return "cond";
    case SelectionMethod::MaxMinEig:
      return "mineig";
    case SelectionMethod::MaxLogDet:
      return "logdet";
    case SelectionMethod::Random:
      return "random";
    case SelectionMethod::All:
      return "all";
  }
  return "?";
}

SelectionMethod parse_method(const std::string& name) {
  if (name == "trace") return SelectionMethod::MaxTrace;
  if (name == "cond") return SelectionMethod::MinCond;
  if (name == "mineig") return SelectionMethod::MaxMinEig;
  if (name == "logdet") return SelectionMethod::MaxLogDet;
  if (name == "random") return SelectionMethod::Random;
  if (name == "all") return SelectionMethod::All;
  throw std::invalid_argument("unknown selection method: " + name);
}

void validate_config(const SimConfig& cfg) {
  if (cfg.n_points < 3) {
    throw std::invalid_argument("n_points: must be >= 3");
  }
  if (!(cfg.depth_range.first > 0.0) ||
      !(cfg.depth_range.second >= cfg.depth_range.first)) {
    throw std::invalid_argument(
        "depth_range: need 0 < min <= max");
  }
  if (cfg.pose_perturbation.max_rotation_deg < 0.0 ||
      cfg.pose_perturbation.max_translation_m < 0.0) {
    throw std::invalid_argument("pose_perturbation: bounds must be >= 0");
  }
  if (cfg.noise.sigma_z < 0.0) {
    throw std::invalid_argument("noise.sigma_z: must be >= 0");
  }
  if (cfg.noise.sigma_p < 0.0) {
    throw std::invalid_argument("noise.sigma_p: must be >= 0");
  }
  if (cfg.subset_sizes.empty()) {
    throw std::invalid_argument("subset_sizes: must be non-empty");
  }
  for (int k : cfg.subset_sizes) {
    if (k < 3) throw std::invalid_argument("subset_sizes: entries must be >= 3");
    if (k > cfg.n_points) {
      throw std::invalid_argument(
          "subset_sizes: entries must not exceed n_points");
    }
  }
  if (cfg.methods.empty()) {
    throw std::invalid_argument("methods: must be non-empty");
  }
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    for (std::size_t j = i + 1; j < cfg.methods.size(); ++j) {
      if (cfg.methods[i] == cfg.methods[j]) {
        throw std::invalid_argument("methods: duplicate entry");
      }
    }
  }
  if (cfg.trials < 1) {
    throw std::invalid_argument("trials: must be >= 1");
  }
  if (cfg.camera.fx <= 0.0 || cfg.camera.fy <= 0.0 || cfg.camera.width <= 0 ||
      cfg.camera.height <= 0) {
    throw std::invalid_argument("camera: focal lengths and size must be > 0");
  }
  if (cfg.gn.max_iters < 1) {
    throw std::invalid_argument("gn.max_iters: must be >= 1");
  }
  if (cfg.gn.update_norm_tol <= 0.0 || cfg.gn.damping < 0.0) {
    throw std::invalid_argument("gn: tolerance must be > 0, damping >= 0");
  }
}

Scene generate_scene(const SimConfig& cfg, std::uint64_t rng_seed) {
  validate_config(cfg);
  std::mt19937_64 rng(rng_seed);
  const CameraIntrinsics& cam = cfg.camera;

  Scene scene;
  scene.true_pose = sample_true_pose(rng, cfg.pose_perturbation);
  scene.true_landmarks.reserve(cfg.n_points);
  scene.perturbed_landmarks.reserve(cfg.n_points);
  scene.observations.reserve(cfg.n_points);

  std::uniform_real_distribution<double> uu(0.0, cam.width);
  std::uniform_real_distribution<double> uv(0.0, cam.height);
  std::uniform_real_distribution<double> ud(cfg.depth_range.first,
                                            cfg.depth_range.second);
  const Pose identity;

  for (int i = 0; i < cfg.n_points; ++i) {
    bool accepted = false;
    for (int attempt = 0; attempt < kResampleCap && !accepted; ++attempt) {
      const PixelObservation seen{uu(rng), uv(rng)};
      const double depth = ud(rng);
      const Landmark p = backproject(identity, seen, depth, cam);

      Landmark perturbed = p;
      for (int axis = 0; axis < 3; ++axis) {
        perturbed[axis] +=
            cfg.noise.mu_p[axis] + normal_or_zero(rng, cfg.noise.sigma_p);
      }

      PixelObservation obs{0.0, 0.0};
      const double du = normal_or_zero(rng, cfg.noise.sigma_z);
      const double dv = normal_or_zero(rng, cfg.noise.sigma_z);

      const Eigen::Vector3d p_true_cam =
          scene.true_pose.rotation * p + scene.true_pose.translation;
      if (p_true_cam.z() <= 0.0) continue;
      obs = project(scene.true_pose, p, cam);
      obs.u += du;
      obs.v += dv;
      if (!in_image(obs, cam)) continue;

      if (perturbed.z() <= 0.0) continue;
      const Eigen::Vector3d pp_true_cam =
          scene.true_pose.rotation * perturbed + scene.true_pose.translation;
      if (pp_true_cam.z() <= 0.0) continue;

      scene.true_landmarks.push_back(p);
      scene.perturbed_landmarks.push_back(perturbed);
      scene.observations.push_back(obs);
      scene.valid.push_back(1);
      accepted = true;
    }
    if (!accepted) {
      throw Error("generate_scene: resampling cap exceeded for a landmark");
    }
  }
  return scene;
}

TrialRecord run_trial(const Scene& scene, int k, SelectionMethod method,
                      const SimConfig& cfg, std::uint64_t selection_seed,
                      int trial_id) {
  const int n = static_cast<int>(scene.true_landmarks.size());
  if (k < 3 || k > n) {
    throw std::invalid_argument("run_trial: need 3 <= k <= scene size");
  }

  TrialRecord rec;
  rec.trial = trial_id;
  rec.method = method;
  rec.k = k;

  try {
    std::vector<int> chosen;
    if (method == SelectionMethod::All) {
      chosen.resize(n);
      std::iota(chosen.begin(), chosen.end(), 0);
    } else if (method == SelectionMethod::Random) {
      const auto start = std::chrono::steady_clock::now();
      chosen = random_select(n, k, selection_seed);
      rec.select_time_us = std::chrono::duration<double, std::micro>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    } else {
      const Pose initial_guess;
      const JacobianBlockSet blocks = compute_jacobian_blocks(
          initial_guess, scene.perturbed_landmarks, cfg.camera);
      const SelectionResult sel =
          greedy_select(blocks.hc, k, metric_of(method));
      chosen = sel.chosen;
      std::sort(chosen.begin(), chosen.end());
      rec.select_time_us = sel.time_us;
    }

    std::vector<Landmark> landmarks;
    std::vector<PixelObservation> observations;
    landmarks.reserve(chosen.size());
    observations.reserve(chosen.size());
    for (int i : chosen) {
      landmarks.push_back(scene.perturbed_landmarks[i]);
      observations.push_back(scene.observations[i]);
    }

    const GaussNewtonResult gn = gauss_newton_pose(
        Pose{}, landmarks, observations, cfg.camera, cfg.gn);
    rec.solve_iters = gn.iterations;
    rec.error = pose_error(gn.pose, scene.true_pose);
  } catch (const Error&) {
    rec.failed = true;
    rec.error.translational_m = std::numeric_limits<double>::quiet_NaN();
    rec.error.rotational_deg = std::numeric_limits<double>::quiet_NaN();
  }
  return rec;
}

SweepResult run_sweep(const SimConfig& cfg, int workers) {
  validate_config(cfg);

  const std::size_t n_methods = cfg.methods.size();
  const std::size_t n_k = cfg.subset_sizes.size();
  const std::size_t n_trials = static_cast<std::size_t>(cfg.trials);

  SweepResult out;
  out.records.resize(n_methods * n_k * n_trials);

  unsigned pool = workers > 0
                      ? static_cast<unsigned>(workers)
                      : std::max(1u, std::thread::hardware_concurrency());
  pool = std::min<unsigned>(pool, n_trials);

  std::atomic<std::size_t> next_trial{0};
  auto work = [&]() {
    while (true) {
      const std::size_t t = next_trial.fetch_add(1);
      if (t >= n_trials) break;
      const Scene scene = generate_scene(
          cfg, seed_mix({cfg.base_seed, kSceneStream, t}));
      for (std::size_t mi = 0; mi < n_methods; ++mi) {
        for (std::size_t ki = 0; ki < n_k; ++ki) {
          const int k = cfg.subset_sizes[ki];
          const std::uint64_t sel_seed =
              seed_mix({cfg.base_seed, kSelectStream, t,
                        static_cast<std::uint64_t>(k)});
          out.records[(mi * n_k + ki) * n_trials + t] =
              run_trial(scene, k, cfg.methods[mi], cfg, sel_seed,
                        static_cast<int>(t));
        }
      }
    }
  };

  if (pool <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (unsigned w = 0; w < pool; ++w) threads.emplace_back(work);
    for (auto& th : threads) th.join();
  }

  std::sort(out.records.begin(), out.records.end(),
            [](const TrialRecord& a, const TrialRecord& b) {
              if (a.method != b.method) return a.method < b.method;
              if (a.k != b.k) return a.k < b.k;
              return a.trial < b.trial;
            });

  for (std::size_t i = 0; i < out.records.size();) {
    const SelectionMethod method = out.records[i].method;
    const int k = out.records[i].k;
    RmsEntry entry;
    entry.method = method;
    entry.k = k;
    double sum_t2 = 0.0;
    double sum_r2 = 0.0;
    int ok = 0;
    while (i < out.records.size() && out.records[i].method == method &&
           out.records[i].k == k) {
      const TrialRecord& rec = out.records[i];
      ++entry.trials;
      if (rec.failed) {
        ++entry.failures;
      } else {
        sum_t2 += rec.error.translational_m * rec.error.translational_m;
        sum_r2 += rec.error.rotational_deg * rec.error.rotational_deg;
        ++ok;
      }
      ++i;
    }
    entry.rms_translational_m =
        ok > 0 ? std::sqrt(sum_t2 / ok)
               : std::numeric_limits<double>::quiet_NaN();
    entry.rms_rotational_deg =
        ok > 0 ? std::sqrt(sum_r2 / ok)
               : std::numeric_limits<double>::quiet_NaN();
    out.rms.push_back(entry);
  }
  return out;
}

}  // namespace featsel
