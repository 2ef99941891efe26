#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "featsel/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Feature subset selection for least-squares pose estimation"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand(
      "simulate", "Run a Monte-Carlo sweep from a JSON config");
  std::string sim_config;
  std::string sim_out;
  std::optional<std::uint64_t> sim_seed;
  simulate->add_option("--config", sim_config, "JSON config file")->required();
  simulate->add_option("--out", sim_out, "Output CSV path")->required();
  simulate->add_option("--seed", sim_seed, "Override base_seed");

  auto* select = app.add_subcommand(
      "select", "Select a feature subset from a JSON block file");
  std::string sel_blocks;
  int sel_k = 0;
  std::string sel_metric;
  std::string sel_method;
  double sel_epsilon = 0.1;
  std::uint64_t sel_seed = 0;
  select->add_option("--blocks", sel_blocks, "JSON file of 3x6 blocks")
      ->required();
  select->add_option("--k", sel_k, "Subset size")->required();
  select->add_option("--metric", sel_metric, "trace|cond|mineig|logdet")
      ->required();
  select
      ->add_option("--method", sel_method,
                   "greedy|stochastic|bruteforce|random")
      ->required();
  select->add_option("--epsilon", sel_epsilon,
                     "Stochastic sampling parameter (default 0.1)");
  select->add_option("--seed", sel_seed, "RNG seed (default 0)");

  auto* bench = app.add_subcommand(
      "bench", "Time greedy vs. stochastic greedy on synthetic blocks");
  int bench_n = 0;
  int bench_k = 0;
  double bench_epsilon = 0.1;
  int bench_trials = 1;
  std::string bench_out;
  bench->add_option("--n", bench_n, "Number of blocks")->required();
  bench->add_option("--k", bench_k, "Subset size")->required();
  bench->add_option("--epsilon", bench_epsilon, "Sampling parameter");
  bench->add_option("--trials", bench_trials, "Repetitions");
  bench->add_option("--out", bench_out, "Output CSV path")->required();

  auto* verify = app.add_subcommand(
      "verify", "Run a named statistical verification suite");
  std::string verify_suite;
  verify->add_option("--suite", verify_suite,
                     "covariance|bias|submodular|bound")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return featsel::cli::kExitUsage;
  }

  if (app.got_subcommand(simulate)) {
    return featsel::cli::cmd_simulate(sim_config, sim_out, sim_seed, std::cout,
                                      std::cerr);
  }
  if (app.got_subcommand(select)) {
    return featsel::cli::cmd_select(sel_blocks, sel_k, sel_metric, sel_method,
                                    sel_epsilon, sel_seed, std::cout,
                                    std::cerr);
  }
  if (app.got_subcommand(bench)) {
    return featsel::cli::cmd_bench(bench_n, bench_k, bench_epsilon,
                                   bench_trials, bench_out, std::cout,
                                   std::cerr);
  }
  return featsel::cli::cmd_verify(verify_suite, std::cout, std::cerr);
}
