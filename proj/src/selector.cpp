#include "featsel/selector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "featsel/errors.hpp"

namespace featsel {

namespace {

constexpr double kSymmetryTol = 1e-9;
constexpr double kBruteForceGuard = 1e6;

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start)
      .count();
}

// Orientation such that "larger is better" for every metric.
double oriented(double value, MetricKind metric) {
  return metric == MetricKind::MinCond ? -value : value;
}

double logdet_psd(const Mat6& m) {
  const Eigen::LLT<Mat6> llt(m);
  if (llt.info() != Eigen::Success) {
    return -std::numeric_limits<double>::infinity();
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

std::vector<Mat6> info_blocks(std::span<const Mat3x6> blocks) {
  std::vector<Mat6> g(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    g[i].noalias() = blocks[i].transpose() * blocks[i];
  }
  return g;
}

void check_k(int k, std::size_t n, const char* who) {
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument(std::string(who) + ": k must be in [1, " +
                                std::to_string(n) + "], got " +
                                std::to_string(k));
  }
}

}  // namespace

double metric_value(const Mat6& q, MetricKind metric, double delta) {
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
    throw std::invalid_argument("metric_value: matrix is not symmetric");
  }
  const Mat6 m = q + delta * Mat6::Identity();
  switch (metric) {
    case MetricKind::MaxTrace:
      return m.trace();
    case MetricKind::MinCond: {
      const Eigen::SelfAdjointEigenSolver<Mat6> es(m,
                                                   Eigen::EigenvaluesOnly);
      return es.eigenvalues()(5) / es.eigenvalues()(0);
    }
    case MetricKind::MaxMinEig: {
      const Eigen::SelfAdjointEigenSolver<Mat6> es(m,
                                                   Eigen::EigenvaluesOnly);
      return es.eigenvalues()(0);
    }
    case MetricKind::MaxLogDet:
      return logdet_psd(m);
  }
  throw std::invalid_argument("metric_value: unknown metric");
}

void SelectionState::add(int index, const Mat3x6& block) {
  q.noalias() += block.transpose() * block;
  chosen.push_back(index);
}

int SelectionResult::total_evaluations() const {
  return std::accumulate(evaluations_per_round.begin(),
                         evaluations_per_round.end(), 0);
}

SelectionResult greedy_select(std::span<const Mat3x6> blocks, int k,
                              MetricKind metric, double delta) {
  const std::size_t n = blocks.size();
  check_k(k, n, "greedy_select");

  const auto start = Clock::now();
  const std::vector<Mat6> g = info_blocks(blocks);
  std::vector<char> used(n, 0);
  SelectionState state;
  state.delta = delta;

  SelectionResult result;
  result.evaluations_per_round.reserve(k);
  for (int round = 0; round < k; ++round) {
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    int evals = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      const double score =
          oriented(metric_value(state.q + g[i], metric, delta), metric);
      ++evals;
      if (score > best_score) {
        best_score = score;
        best = static_cast<int>(i);
      }
    }
    used[best] = 1;
    state.q += g[best];
    state.chosen.push_back(best);
    result.evaluations_per_round.push_back(evals);
  }
  result.chosen = state.chosen;
  result.metric_value = metric_value(state.q, metric, delta);
  result.time_us = elapsed_us(start);
  return result;
}

SelectionResult stochastic_greedy_logdet(std::span<const Mat3x6> blocks,
                                         int k, double epsilon, double delta,
                                         std::uint64_t seed) {
  const std::size_t n = blocks.size();
  check_k(k, n, "stochastic_greedy_logdet");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument(
        "stochastic_greedy_logdet: epsilon must be in (0, 1)");
  }

  const auto start = Clock::now();
  const std::vector<Mat6> g = info_blocks(blocks);
  const int s = static_cast<int>(std::ceil(
      (static_cast<double>(n) / k) * std::log(1.0 / epsilon)));

  std::mt19937_64 rng(seed);
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<int> sample;

  SelectionState state;
  state.delta = delta;
  SelectionResult result;
  result.evaluations_per_round.reserve(k);

  for (int round = 0; round < k; ++round) {
    const int m = std::min<std::size_t>(s, pool.size());
    for (int j = 0; j < m; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, pool.size() - 1);
      std::swap(pool[j], pool[pick(rng)]);
    }
    sample.assign(pool.begin(), pool.begin() + m);
    std::sort(sample.begin(), sample.end());

    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i : sample) {
      const double score =
          metric_value(state.q + g[i], MetricKind::MaxLogDet, delta);
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    state.q += g[best];
    state.chosen.push_back(best);
    result.evaluations_per_round.push_back(m);
    pool.erase(std::find(pool.begin(), pool.end(), best));
  }
  result.chosen = state.chosen;
  result.metric_value = metric_value(state.q, MetricKind::MaxLogDet, delta);
  result.time_us = elapsed_us(start);
  return result;
}

SelectionResult brute_force_select(std::span<const Mat3x6> blocks, int k,
                                   MetricKind metric, double delta) {
  const std::size_t n = blocks.size();
  check_k(k, n, "brute_force_select");

  double combos = 1.0;
  for (int i = 1; i <= k; ++i) {
    combos *= static_cast<double>(n - k + i) / i;
    if (combos > kBruteForceGuard) {
      throw ProblemTooLargeError(
          "brute_force_select: C(n, k) exceeds 1e6 subsets");
    }
  }

  const auto start = Clock::now();
  const std::vector<Mat6> g = info_blocks(blocks);

  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int> best_idx;
  double best_score = -std::numeric_limits<double>::infinity();
  double best_value = 0.0;
  int evals = 0;

  while (true) {
    Mat6 q = Mat6::Zero();
    for (int i : idx) q += g[i];
    const double value = metric_value(q, metric, delta);
    ++evals;
    if (const double score = oriented(value, metric); score > best_score) {
      best_score = score;
      best_value = value;
      best_idx = idx;
    }

    // next combination in lexicographic order
    int pos = k - 1;
    while (pos >= 0 &&
           idx[pos] == static_cast<int>(n) - k + pos) {
      --pos;
    }
    if (pos < 0) break;
    ++idx[pos];
    for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }

  SelectionResult result;
  result.chosen = best_idx;
  result.metric_value = best_value;
  result.evaluations_per_round.push_back(evals);
  result.time_us = elapsed_us(start);
  return result;
}

std::vector<int> random_select(int n, int k, std::uint64_t seed) {
  if (n < 0 || k < 0 || k > n) {
    throw std::invalid_argument("random_select: need 0 <= k <= n");
  }
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  std::mt19937_64 rng(seed);
  for (int j = 0; j < k; ++j) {
    std::uniform_int_distribution<std::size_t> pick(j, pool.size() - 1);
    std::swap(pool[j], pool[pick(rng)]);
  }
  std::vector<int> out(pool.begin(), pool.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace featsel
