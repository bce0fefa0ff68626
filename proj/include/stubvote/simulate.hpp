#pragma once

// Exact stochastic simulation of the count chain N1(t).
//
// On the clique the n node clocks aggregate into a birth-death jump process:
// holding time Exp(q_down + q_up) at state k, then +1 with probability
// q_up / (q_down + q_up). Streams come from std::mt19937_64, whose output
// sequence is fixed by the standard, and all variates are derived from raw
// 64-bit draws so that trajectories are identical across platforms.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "chain.hpp"
#include "transient.hpp"
#include "error.hpp"
#include "parallel.hpp"

namespace stubvote {

struct Trajectory {
  int initial = 0;
  double horizon = 0.0;
  std::vector<double> times;  // strictly increasing event times
  std::vector<int> counts;    // N1 right after each event

  int terminal() const noexcept { return counts.empty() ? initial : counts.back(); }
  std::size_t events() const noexcept { return times.size(); }
};

namespace detail {

/// Uniform variate in (0, 1].
inline double open_uniform(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

inline std::mt19937_64 run_stream(std::uint64_t seed, std::uint64_t run) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(run >> 32)};
  return std::mt19937_64(seq);
}

template <typename OnEvent>
int simulate_path(const Generator& gen, int n1, double horizon, std::mt19937_64& rng, OnEvent&& on_event) {
  double time = 0.0;
  int state = n1;
  for (;;) {
    const std::size_t i = gen.index_of(state);
    const double down = gen.lower[i];
    const double up = gen.upper[i];
    const double total = down + up;
    if (total == 0.0) break;
    time += -std::log(open_uniform(rng)) / total;
    if (time > horizon) break;
    state += open_uniform(rng) * total <= up ? 1 : -1;
    on_event(time, state);
  }
  return state;
}

inline void check_simulation_args(const StubbornConfig& config, int n1, double horizon) {
  if (!config.contains(n1)) {
    throw Error(ErrorKind::Domain, "initial state " + std::to_string(n1) + " outside [" +
                                       std::to_string(config.lowest_state()) + ", " +
                                       std::to_string(config.highest_state()) + "]");
  }
  if (!(horizon >= 0.0)) throw Error(ErrorKind::Domain, "horizon must be non-negative");
}

}  // namespace detail

/// One trajectory on [0, horizon], fully determined by `seed`.
inline Trajectory gillespie_run(const StubbornConfig& config, int n1, double horizon, std::uint64_t seed) {
  detail::check_simulation_args(config, n1, horizon);
  const Generator gen = build_generator(config);
  auto rng = detail::run_stream(seed, 0);
  Trajectory traj{n1, horizon, {}, {}};
  detail::simulate_path(gen, n1, horizon, rng, [&](double t, int k) {
    traj.times.push_back(t);
    traj.counts.push_back(k);
  });
  return traj;
}

/// Frequencies of N1(t) over `runs` independent trajectories. Run r uses its
/// own substream derived from (seed, r), so the result does not depend on the
/// worker count.
inline DistributionRow empirical_distribution(const StubbornConfig& config, int n1, double t, std::size_t runs,
                                              std::uint64_t seed, unsigned workers = 0) {
  detail::check_simulation_args(config, n1, t);
  if (runs == 0) throw Error(ErrorKind::Parameter, "at least one run is required");
  const Generator gen = build_generator(config);

  std::vector<int> terminal(runs);
  parallel_for(runs, workers, [&](std::size_t r) {
    auto rng = detail::run_stream(seed, r);
    terminal[r] = detail::simulate_path(gen, n1, t, rng, [](double, int) {});
  });

  DistributionRow freq{n1, t, config.lowest_state(), std::vector<double>(config.dimension(), 0.0)};
  std::vector<std::size_t> hits(config.dimension(), 0);
  for (int k : terminal) ++hits[gen.index_of(k)];
  for (std::size_t i = 0; i < hits.size(); ++i) {
    freq.probs[i] = static_cast<double>(hits[i]) / static_cast<double>(runs);
  }
  return freq;
}

}  // namespace stubvote
