#pragma once

#include <string>
#include <vector>

namespace featsel::verify {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string details;
};

// Analytic covariance formulas vs. the empirical covariance of repeated
// noisy Gauss-Newton solves (pixel noise and map noise separately).
std::vector<CheckResult> covariance_suite();

// Analytic mean-shift prediction vs. the Monte-Carlo mean error twist under
// biased map noise.
std::vector<CheckResult> bias_suite();

// Diminishing-returns and monotonicity probes of the regularized objectives,
// plus the equivalence of greedy trace selection with a top-k sort.
std::vector<CheckResult> submodular_suite();

// Greedy log-det objective gain vs. exhaustive search on small instances
// (classical 1 - 1/e guarantee).
std::vector<CheckResult> bound_suite();

// Dispatch by suite name; throws std::invalid_argument for unknown names.
std::vector<CheckResult> run_suite(const std::string& name);

}  // namespace featsel::verify
