#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "featsel/geometry.hpp"

namespace featsel {

enum class MetricKind { MaxTrace, MinCond, MaxMinEig, MaxLogDet };

// Regularizer added to the information sum before every metric evaluation.
inline constexpr double kDefaultDelta = 1e-6;

// Scalar score of an information matrix q (6x6, symmetric within 1e-9;
// violations raise std::invalid_argument). Evaluated on q + delta * I.
// MinCond is a to-be-minimized score; the others are maximized.
double metric_value(const Mat6& q, MetricKind metric,
                    double delta = kDefaultDelta);

// Incrementally maintained information sum over chosen blocks.
struct SelectionState {
  Mat6 q = Mat6::Zero();
  std::vector<int> chosen;
  double delta = kDefaultDelta;

  void add(int index, const Mat3x6& block);
};

struct SelectionResult {
  std::vector<int> chosen;
  double metric_value = 0.0;
  std::vector<int> evaluations_per_round;
  double time_us = 0.0;

  int total_evaluations() const;
};

// Greedy forward selection of k blocks; ties broken toward the lowest index.
SelectionResult greedy_select(std::span<const Mat3x6> blocks, int k,
                              MetricKind metric, double delta = kDefaultDelta);

// Stochastic greedy for the log-det objective: each round scores a uniform
// without-replacement sample of s = ceil((n/k) * ln(1/epsilon)) remaining
// candidates (clamped to the pool size).
SelectionResult stochastic_greedy_logdet(std::span<const Mat3x6> blocks,
                                         int k, double epsilon,
                                         double delta, std::uint64_t seed);

// Exhaustive search over all C(n, k) subsets; refuses to enumerate more
// than 1e6 (ProblemTooLargeError). Ties resolve to the lexicographically
// smallest index set.
SelectionResult brute_force_select(std::span<const Mat3x6> blocks, int k,
                                   MetricKind metric,
                                   double delta = kDefaultDelta);

// Uniform k-subset of {0..n-1}, returned ascending.
std::vector<int> random_select(int n, int k, std::uint64_t seed);

// Log-det objective gain over the empty (delta-regularized) set.
inline double logdet_gain(double logdet_value, double delta) {
  return logdet_value - 6.0 * std::log(delta);
}

}  // namespace featsel
