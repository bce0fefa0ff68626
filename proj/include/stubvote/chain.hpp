#pragma once

// Birth-death generator of the voter model with stubborn nodes on a clique.
//
// N1(t), the number of state-1 nodes, lives on {s1, ..., n - s0}. From state k
// it moves down at rate (k - s1)(n - k)/(n - 1) and up at rate
// k(n - k - s0)/(n - 1), with one exponential clock of rate 1 per node.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "error.hpp"

namespace stubvote {

/// Population size and stubborn counts; always a member of S_n.
class StubbornConfig {
 public:
  StubbornConfig(int n, int s0, int s1) : n_(n), s0_(s0), s1_(s1) {
    if (n == 1) {
      throw Error(ErrorKind::Parameter, "degenerate population: n must be at least 2");
    }
    if (n < 1 || s0 < 0 || s1 < 0 || s0 + s1 < 1 || s0 + s1 > n) {
      throw Error(ErrorKind::Parameter,
                  "stubborn couple (" + std::to_string(s0) + ", " + std::to_string(s1) +
                      ") is not in S_n for n = " + std::to_string(n));
    }
  }

  int n() const noexcept { return n_; }
  int s0() const noexcept { return s0_; }
  int s1() const noexcept { return s1_; }

  int lowest_state() const noexcept { return s1_; }
  int highest_state() const noexcept { return n_ - s0_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(n_ - s0_ - s1_ + 1); }
  bool contains(int k) const noexcept { return k >= lowest_state() && k <= highest_state(); }
  bool frozen() const noexcept { return s0_ + s1_ == n_; }

  friend bool operator==(const StubbornConfig&, const StubbornConfig&) = default;

 private:
  int n_;
  int s0_;
  int s1_;
};

/// Tridiagonal rate matrix; index i stands for state s1 + i. Rates per year.
struct Generator {
  StubbornConfig config;
  std::vector<double> lower;  // q_{k,k-1}
  std::vector<double> diag;   // q_{k,k}
  std::vector<double> upper;  // q_{k,k+1}

  std::size_t dimension() const noexcept { return diag.size(); }
  int state_at(std::size_t i) const noexcept { return config.lowest_state() + static_cast<int>(i); }
  std::size_t index_of(int k) const noexcept { return static_cast<std::size_t>(k - config.lowest_state()); }

  /// Uniformization rate, max_k |q_{k,k}|.
  double max_exit_rate() const noexcept {
    double rate = 0.0;
    for (double d : diag) rate = std::max(rate, -d);
    return rate;
  }
};

inline Generator build_generator(const StubbornConfig& config) {
  const std::size_t dim = config.dimension();
  const long n = config.n();
  const long s0 = config.s0();
  const long s1 = config.s1();
  const double scale = static_cast<double>(n - 1);

  Generator gen{config, std::vector<double>(dim), std::vector<double>(dim), std::vector<double>(dim)};
  for (std::size_t i = 0; i < dim; ++i) {
    const long k = s1 + static_cast<long>(i);
    const double down = static_cast<double>((k - s1) * (n - k)) / scale;
    const double up = static_cast<double>(k * (n - k - s0)) / scale;
    gen.lower[i] = down;
    gen.upper[i] = up;
    gen.diag[i] = -(down + up);
  }
  return gen;
}

struct StationaryDistribution {
  int lowest_state = 0;
  std::vector<double> probs;

  double mean() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) m += (lowest_state + static_cast<double>(i)) * probs[i];
    return m;
  }
};

/// Detailed balance, pi_{k+1} / pi_k = q_{k,k+1} / q_{k+1,k}, accumulated in log space.
///
/// Without stubborn 1-nodes state 0 is absorbing (and state n without stubborn
/// 0-nodes), so the law is a point mass there.
inline StationaryDistribution stationary_distribution(const Generator& gen) {
  const std::size_t dim = gen.dimension();
  StationaryDistribution pi{gen.config.lowest_state(), std::vector<double>(dim, 0.0)};
  if (gen.config.s1() == 0) {
    pi.probs.front() = 1.0;
    return pi;
  }
  if (gen.config.s0() == 0) {
    pi.probs.back() = 1.0;
    return pi;
  }

  std::vector<double> log_weight(dim, 0.0);
  for (std::size_t i = 1; i < dim; ++i) {
    log_weight[i] = log_weight[i - 1] + std::log(gen.upper[i - 1]) - std::log(gen.lower[i]);
  }
  double peak = -std::numeric_limits<double>::infinity();
  for (double w : log_weight) peak = std::max(peak, w);
  double total = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    pi.probs[i] = std::exp(log_weight[i] - peak);
    total += pi.probs[i];
  }
  for (double& p : pi.probs) p /= total;
  return pi;
}

/// Mean of the stationary law, n * s1 / (s0 + s1).
inline double equilibrium_expectation(const StubbornConfig& config) noexcept {
  return static_cast<double>(config.n()) * config.s1() / (config.s0() + config.s1());
}

}  // namespace stubvote
