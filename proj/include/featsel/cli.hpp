#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "featsel/simulator.hpp"

namespace featsel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

// Strict JSON -> SimConfig mapping; unknown or ill-typed fields throw
// std::invalid_argument naming the field. Absent fields keep defaults.
SimConfig parse_sim_config(const nlohmann::json& j);

// Parses a {"blocks": [[row0, row1, row2], ...]} document of 3x6 blocks.
std::vector<Mat3x6> parse_blocks(const nlohmann::json& j);

// Decimal with 9 significant digits, the CSV number format.
std::string format_csv_double(double v);

void write_csv(const std::vector<TrialRecord>& records, std::ostream& os);

// Runs the sweep described by a JSON config file and writes the per-trial
// CSV plus an RMS summary JSON next to it.
int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 std::optional<std::uint64_t> seed_override, std::ostream& out,
                 std::ostream& err);

// Selects k blocks from a JSON block file and prints the chosen subset.
int cmd_select(const std::string& blocks_path, int k,
               const std::string& metric, const std::string& method,
               double epsilon, std::uint64_t seed, std::ostream& out,
               std::ostream& err);

// Greedy vs. stochastic-greedy timing comparison on synthetic blocks.
int cmd_bench(int n, int k, double epsilon, int trials,
              const std::string& out_path, std::ostream& out,
              std::ostream& err);

// Runs one named verification suite, printing one PASS/FAIL line per check.
int cmd_verify(const std::string& suite, std::ostream& out, std::ostream& err);

}  // namespace featsel::cli
