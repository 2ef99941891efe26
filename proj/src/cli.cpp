#include "featsel/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "featsel/errors.hpp"
#include "featsel/rng.hpp"
#include "featsel/verify.hpp"

namespace featsel::cli {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) {
    throw std::invalid_argument(ctx + ": expected a JSON object");
  }
  for (const auto& item : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return item.key() == a;
        }) == allowed.end()) {
      throw std::invalid_argument(ctx + ": unknown field \"" + item.key() +
                                  "\"");
    }
  }
}

double get_num(const json& j, const std::string& field) {
  if (!j.is_number()) {
    throw std::invalid_argument(field + ": expected a number");
  }
  return j.get<double>();
}

int get_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) {
    throw std::invalid_argument(field + ": expected an integer");
  }
  return j.get<int>();
}

MetricKind parse_metric(const std::string& name) {
  if (name == "trace") return MetricKind::MaxTrace;
  if (name == "cond") return MetricKind::MinCond;
  if (name == "mineig") return MetricKind::MaxMinEig;
  if (name == "logdet") return MetricKind::MaxLogDet;
  throw std::invalid_argument("unknown metric: " + name);
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return buf.str();
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  out.flush();
  return out.good();
}

std::string summary_path_for(const std::string& out_path) {
  const std::string suffix = ".csv";
  if (out_path.size() > suffix.size() &&
      out_path.compare(out_path.size() - suffix.size(), suffix.size(),
                       suffix) == 0) {
    return out_path.substr(0, out_path.size() - suffix.size()) +
           ".summary.json";
  }
  return out_path + ".summary.json";
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SimConfig parse_sim_config(const json& j) {
  check_keys(j, "config",
             {"n_points", "depth_range", "pose_perturbation", "noise",
              "subset_sizes", "methods", "trials", "base_seed", "camera",
              "gn"});
  SimConfig cfg;

  if (j.contains("n_points")) cfg.n_points = get_int(j["n_points"], "n_points");
  if (j.contains("depth_range")) {
    const auto& d = j["depth_range"];
    if (!d.is_array() || d.size() != 2) {
      throw std::invalid_argument("depth_range: expected [min, max]");
    }
    cfg.depth_range = {get_num(d[0], "depth_range[0]"),
                       get_num(d[1], "depth_range[1]")};
  }
  if (j.contains("pose_perturbation")) {
    const auto& p = j["pose_perturbation"];
    check_keys(p, "pose_perturbation",
               {"max_rotation_deg", "max_translation_m"});
    if (p.contains("max_rotation_deg")) {
      cfg.pose_perturbation.max_rotation_deg =
          get_num(p["max_rotation_deg"], "pose_perturbation.max_rotation_deg");
    }
    if (p.contains("max_translation_m")) {
      cfg.pose_perturbation.max_translation_m = get_num(
          p["max_translation_m"], "pose_perturbation.max_translation_m");
    }
  }
  if (j.contains("noise")) {
    const auto& n = j["noise"];
    check_keys(n, "noise", {"sigma_z", "mu_p", "sigma_p"});
    if (n.contains("sigma_z")) {
      cfg.noise.sigma_z = get_num(n["sigma_z"], "noise.sigma_z");
    }
    if (n.contains("sigma_p")) {
      cfg.noise.sigma_p = get_num(n["sigma_p"], "noise.sigma_p");
    }
    if (n.contains("mu_p")) {
      const auto& m = n["mu_p"];
      if (!m.is_array() || m.size() != 3) {
        throw std::invalid_argument("noise.mu_p: expected [x, y, z]");
      }
      for (int i = 0; i < 3; ++i) {
        cfg.noise.mu_p[i] = get_num(m[i], "noise.mu_p");
      }
    }
  }
  if (j.contains("subset_sizes")) {
    const auto& s = j["subset_sizes"];
    if (!s.is_array()) {
      throw std::invalid_argument("subset_sizes: expected an array");
    }
    cfg.subset_sizes.clear();
    for (const auto& e : s) {
      cfg.subset_sizes.push_back(get_int(e, "subset_sizes"));
    }
  }
  if (j.contains("methods")) {
    const auto& m = j["methods"];
    if (!m.is_array()) {
      throw std::invalid_argument("methods: expected an array");
    }
    cfg.methods.clear();
    for (const auto& e : m) {
      if (!e.is_string()) {
        throw std::invalid_argument("methods: expected strings");
      }
      cfg.methods.push_back(parse_method(e.get<std::string>()));
    }
  }
  if (j.contains("trials")) cfg.trials = get_int(j["trials"], "trials");
  if (j.contains("base_seed")) {
    const auto& b = j["base_seed"];
    if (!b.is_number_unsigned() && !b.is_number_integer()) {
      throw std::invalid_argument("base_seed: expected an integer");
    }
    cfg.base_seed = b.get<std::uint64_t>();
  }
  if (j.contains("camera")) {
    const auto& c = j["camera"];
    check_keys(c, "camera", {"fx", "fy", "cx", "cy", "width", "height"});
    if (c.contains("fx")) cfg.camera.fx = get_num(c["fx"], "camera.fx");
    if (c.contains("fy")) cfg.camera.fy = get_num(c["fy"], "camera.fy");
    if (c.contains("cx")) cfg.camera.cx = get_num(c["cx"], "camera.cx");
    if (c.contains("cy")) cfg.camera.cy = get_num(c["cy"], "camera.cy");
    if (c.contains("width")) {
      cfg.camera.width = get_int(c["width"], "camera.width");
    }
    if (c.contains("height")) {
      cfg.camera.height = get_int(c["height"], "camera.height");
    }
  }
  if (j.contains("gn")) {
    const auto& g = j["gn"];
    check_keys(g, "gn", {"max_iters", "update_norm_tol", "damping"});
    if (g.contains("max_iters")) {
      cfg.gn.max_iters = get_int(g["max_iters"], "gn.max_iters");
    }
    if (g.contains("update_norm_tol")) {
      cfg.gn.update_norm_tol =
          get_num(g["update_norm_tol"], "gn.update_norm_tol");
    }
    if (g.contains("damping")) {
      cfg.gn.damping = get_num(g["damping"], "gn.damping");
    }
  }
  return cfg;
}

std::vector<Mat3x6> parse_blocks(const json& j) {
  if (!j.is_object() || !j.contains("blocks") || !j["blocks"].is_array()) {
    throw std::invalid_argument("blocks file: expected {\"blocks\": [...]}");
  }
  std::vector<Mat3x6> out;
  const auto& arr = j["blocks"];
  out.reserve(arr.size());
  for (std::size_t b = 0; b < arr.size(); ++b) {
    const auto& rows = arr[b];
    const std::string ctx = "blocks[" + std::to_string(b) + "]";
    if (!rows.is_array() || rows.size() != 3) {
      throw std::invalid_argument(ctx + ": expected 3 rows");
    }
    Mat3x6 m;
    for (int r = 0; r < 3; ++r) {
      const auto& row = rows[r];
      if (!row.is_array() || row.size() != 6) {
        throw std::invalid_argument(ctx + ": expected rows of 6 numbers");
      }
      for (int c = 0; c < 6; ++c) {
        m(r, c) = get_num(row[c], ctx);
      }
    }
    out.push_back(m);
  }
  return out;
}

std::string format_csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_csv(const std::vector<TrialRecord>& records, std::ostream& os) {
  os << "trial,method,k,trans_err_m,rot_err_deg,select_time_us,solve_iters,"
        "failed\n";
  for (const TrialRecord& r : records) {
    os << r.trial << ',' << to_string(r.method) << ',' << r.k << ','
       << format_csv_double(r.error.translational_m) << ','
       << format_csv_double(r.error.rotational_deg) << ','
       << format_csv_double(r.select_time_us) << ',' << r.solve_iters << ','
       << (r.failed ? 1 : 0) << '\n';
  }
}

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 std::optional<std::uint64_t> seed_override, std::ostream& out,
                 std::ostream& err) {
  const auto raw = read_file(config_path);
  if (!raw) {
    err << "cannot read config file: " << config_path << "\n";
    return kExitIo;
  }
  const json doc = json::parse(*raw, nullptr, false);
  if (doc.is_discarded()) {
    err << "malformed JSON in config file: " << config_path << "\n";
    return kExitUsage;
  }

  SweepResult sweep;
  try {
    SimConfig cfg = parse_sim_config(doc);
    if (seed_override) cfg.base_seed = *seed_override;
    sweep = run_sweep(cfg);
  } catch (const std::invalid_argument& e) {
    err << "invalid config: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "simulation failed: " << e.what() << "\n";
    return kExitUsage;
  }

  std::ostringstream csv;
  write_csv(sweep.records, csv);
  if (!write_file(out_path, csv.str())) {
    err << "cannot write output file: " << out_path << "\n";
    return kExitIo;
  }

  json rms = json::array();
  for (const RmsEntry& e : sweep.rms) {
    rms.push_back({{"method", to_string(e.method)},
                   {"k", e.k},
                   {"rms_trans_m", e.rms_translational_m},
                   {"rms_rot_deg", e.rms_rotational_deg},
                   {"failures", e.failures},
                   {"trials", e.trials}});
  }
  const std::string summary_path = summary_path_for(out_path);
  if (!write_file(summary_path, json{{"rms", rms}}.dump(2) + "\n")) {
    err << "cannot write summary file: " << summary_path << "\n";
    return kExitIo;
  }

  out << "wrote " << sweep.records.size() << " records to " << out_path
      << " (summary: " << summary_path << ")\n";
  return kExitOk;
}

int cmd_select(const std::string& blocks_path, int k,
               const std::string& metric, const std::string& method,
               double epsilon, std::uint64_t seed, std::ostream& out,
               std::ostream& err) {
  const auto raw = read_file(blocks_path);
  if (!raw) {
    err << "cannot read blocks file: " << blocks_path << "\n";
    return kExitIo;
  }
  const json doc = json::parse(*raw, nullptr, false);
  if (doc.is_discarded()) {
    err << "malformed JSON in blocks file: " << blocks_path << "\n";
    return kExitUsage;
  }

  try {
    const std::vector<Mat3x6> blocks = parse_blocks(doc);
    const MetricKind mk = parse_metric(metric);

    SelectionResult result;
    if (method == "greedy") {
      result = greedy_select(blocks, k, mk);
    } else if (method == "stochastic") {
      if (mk != MetricKind::MaxLogDet) {
        err << "stochastic selection supports only the logdet metric\n";
        return kExitUsage;
      }
      result = stochastic_greedy_logdet(blocks, k, epsilon, kDefaultDelta,
                                        seed);
    } else if (method == "bruteforce") {
      result = brute_force_select(blocks, k, mk);
    } else if (method == "random") {
      const auto start = std::chrono::steady_clock::now();
      result.chosen = random_select(static_cast<int>(blocks.size()), k, seed);
      result.time_us = std::chrono::duration<double, std::micro>(
                           std::chrono::steady_clock::now() - start)
                           .count();
      Mat6 q = Mat6::Zero();
      for (int i : result.chosen) {
        q.noalias() += blocks[i].transpose() * blocks[i];
      }
      result.metric_value = metric_value(q, mk);
    } else {
      err << "unknown selection method: " << method << "\n";
      return kExitUsage;
    }

    std::sort(result.chosen.begin(), result.chosen.end());
    out << json{{"chosen", result.chosen},
                {"metric_value", result.metric_value},
                {"time_us", result.time_us}}
               .dump()
        << "\n";
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_bench(int n, int k, double epsilon, int trials,
              const std::string& out_path, std::ostream& out,
              std::ostream& err) {
  if (n < 1 || k < 1 || k > n || trials < 1 || !(epsilon > 0.0) ||
      !(epsilon < 1.0)) {
    err << "bench: need n >= k >= 1, trials >= 1, epsilon in (0, 1)\n";
    return kExitUsage;
  }

  std::ostringstream csv;
  csv << "trial,method,n,k,epsilon,time_us,logdet_gain,evals\n";
  std::vector<double> speedups;
  std::vector<double> ratios;

  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed_mix({0, kBenchStream, static_cast<std::uint64_t>(t)}));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Mat3x6> blocks(n);
    for (auto& b : blocks) {
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 6; ++c) b(r, c) = gauss(rng);
      }
      b.row(2).setZero();
    }

    const SelectionResult greedy =
        greedy_select(blocks, k, MetricKind::MaxLogDet);
    const SelectionResult stochastic = stochastic_greedy_logdet(
        blocks, k, epsilon, kDefaultDelta,
        seed_mix({0, kBenchStream, static_cast<std::uint64_t>(t), 1}));

    const double g_greedy = logdet_gain(greedy.metric_value, kDefaultDelta);
    const double g_stoch = logdet_gain(stochastic.metric_value, kDefaultDelta);
    speedups.push_back(greedy.time_us / stochastic.time_us);
    ratios.push_back(g_stoch / g_greedy);

    const auto row = [&](const char* name, const SelectionResult& r,
                         double gain) {
      csv << t << ',' << name << ',' << n << ',' << k << ','
          << format_csv_double(epsilon) << ',' << format_csv_double(r.time_us)
          << ',' << format_csv_double(gain) << ',' << r.total_evaluations()
          << '\n';
    };
    row("greedy", greedy, g_greedy);
    row("stochastic", stochastic, g_stoch);
  }

  if (!write_file(out_path, csv.str())) {
    err << "cannot write output file: " << out_path << "\n";
    return kExitIo;
  }
  out << json{{"median_speedup", median(speedups)},
              {"median_gain_ratio", median(ratios)}}
             .dump()
      << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& suite, std::ostream& out,
               std::ostream& err) {
  std::vector<verify::CheckResult> checks;
  try {
    checks = verify::run_suite(suite);
  } catch (const std::invalid_argument& e) {
    err << e.what() << " (expected: covariance, bias, submodular, bound)\n";
    return kExitUsage;
  }
  bool all_pass = true;
  for (const auto& c : checks) {
    out << c.name << ": " << (c.pass ? "PASS" : "FAIL") << " (" << c.details
        << ")\n";
    all_pass = all_pass && c.pass;
  }
  return all_pass ? kExitOk : 1;
}

}  // namespace featsel::cli
