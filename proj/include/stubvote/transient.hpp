#pragma once

// Transient law of N1(t): the row [e^{tQ}]_{n1, .} by uniformization.
//
// With Lambda = max_k |q_kk| the kernel P = I + Q / Lambda is stochastic and
// e^{tQ} = sum_m Poisson(m; Lambda t) P^m. The row vector is pushed through P
// and the Poisson-weighted iterates are accumulated until the weights cover
// 1 - 1e-12 of the mass.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "chain.hpp"
#include "error.hpp"

namespace stubvote {

struct DistributionRow {
  int start = 0;
  double t = 0.0;
  int lowest_state = 0;
  std::vector<double> probs;

  double probability_of(int k) const noexcept {
    const long i = static_cast<long>(k) - lowest_state;
    if (i < 0 || i >= static_cast<long>(probs.size())) return 0.0;
    return probs[static_cast<std::size_t>(i)];
  }

  double mean() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) m += (lowest_state + static_cast<double>(i)) * probs[i];
    return m;
  }
};

namespace detail {

inline constexpr double kPoissonTailMass = 1e-12;
// Largest Lambda * t handled in one uniformization pass; e^{-500} is still a
// normal double, so the Poisson weights can be built by plain recurrence.
inline constexpr double kMaxChunkIntensity = 500.0;

/// Reusable buffers; keep one per worker.
struct UniformizationScratch {
  std::vector<double> stay, from_below, from_above;
  std::vector<double> iterate, next, accum;
};

inline void check_transition_args(const Generator& gen, int n1, double t) {
  if (!gen.config.contains(n1)) {
    throw Error(ErrorKind::Domain, "initial state " + std::to_string(n1) + " outside [" +
                                       std::to_string(gen.config.lowest_state()) + ", " +
                                       std::to_string(gen.config.highest_state()) + "]");
  }
  if (!(t >= 0.0)) {
    throw Error(ErrorKind::Domain, "elapsed time must be non-negative");
  }
}

/// Replaces `row` (a distribution over the generator's states) by row * e^{tQ}.
inline void propagate(const Generator& gen, std::vector<double>& row, double t, UniformizationScratch& s) {
  const std::size_t dim = gen.dimension();
  const double rate = gen.max_exit_rate();
  if (rate == 0.0 || t == 0.0) return;

  s.stay.resize(dim);
  s.from_below.resize(dim);
  s.from_above.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    s.stay[j] = 1.0 + gen.diag[j] / rate;
    s.from_below[j] = j > 0 ? gen.upper[j - 1] / rate : 0.0;
    s.from_above[j] = j + 1 < dim ? gen.lower[j + 1] / rate : 0.0;
  }

  const double total_intensity = rate * t;
  const auto chunks = static_cast<std::size_t>(std::ceil(total_intensity / kMaxChunkIntensity));
  const double intensity = total_intensity / static_cast<double>(chunks);
  const auto max_steps = static_cast<std::size_t>(intensity + 60.0 * std::sqrt(intensity) + 100.0);

  s.iterate.resize(dim);
  s.next.resize(dim);
  s.accum.resize(dim);
  for (std::size_t c = 0; c < chunks; ++c) {
    std::copy(row.begin(), row.end(), s.iterate.begin());
    // nonzero support of the iterate
    std::size_t lo = dim, hi = 0;
    for (std::size_t j = 0; j < dim; ++j) {
      if (row[j] != 0.0) {
        lo = std::min(lo, j);
        hi = j;
      }
    }
    if (lo == dim) return;

    double weight = std::exp(-intensity);
    double mass = weight;
    for (std::size_t j = 0; j < dim; ++j) s.accum[j] = weight * s.iterate[j];

    for (std::size_t m = 1; mass < 1.0 - kPoissonTailMass && m <= max_steps; ++m) {
      const std::size_t new_lo = lo > 0 ? lo - 1 : 0;
      const std::size_t new_hi = hi + 1 < dim ? hi + 1 : hi;
      for (std::size_t j = new_lo; j <= new_hi; ++j) {
        double v = s.stay[j] * s.iterate[j];
        if (j > 0) v += s.from_below[j] * s.iterate[j - 1];
        if (j + 1 < dim) v += s.from_above[j] * s.iterate[j + 1];
        s.next[j] = v;
      }
      for (std::size_t j = new_lo; j <= new_hi; ++j) s.iterate[j] = s.next[j];
      lo = new_lo;
      hi = new_hi;

      weight *= intensity / static_cast<double>(m);
      mass += weight;
      for (std::size_t j = lo; j <= hi; ++j) s.accum[j] += weight * s.iterate[j];
    }

    double total = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      double p = s.accum[j];
      if (p < 0.0) {
        if (p < -1e-15) throw Error(ErrorKind::Internal, "negative transition probability");
        p = 0.0;
      }
      row[j] = p;
      total += p;
    }
    for (double& p : row) p /= total;
  }
}

inline double transition_probability(const Generator& gen, int k, int l, double t, UniformizationScratch& s) {
  check_transition_args(gen, k, t);
  if (!gen.config.contains(l)) return 0.0;
  std::vector<double> row(gen.dimension(), 0.0);
  row[gen.index_of(k)] = 1.0;
  propagate(gen, row, t, s);
  return row[gen.index_of(l)];
}

}  // namespace detail

/// Law of N1(t) given N1(0) = n1.
inline DistributionRow transition_row(const Generator& gen, int n1, double t) {
  detail::check_transition_args(gen, n1, t);
  DistributionRow out{n1, t, gen.config.lowest_state(), std::vector<double>(gen.dimension(), 0.0)};
  out.probs[gen.index_of(n1)] = 1.0;
  detail::UniformizationScratch scratch;
  detail::propagate(gen, out.probs, t, scratch);
  return out;
}

/// [e^{tQ}]_{k,l}. A target `l` outside the state space has probability 0.
inline double transition_probability(const Generator& gen, int k, int l, double t) {
  detail::UniformizationScratch scratch;
  return detail::transition_probability(gen, k, l, t, scratch);
}

/// E[N1(t) | N1(0) = n1].
inline double expected_count(const Generator& gen, int n1, double t) {
  if (t == 0.0) {
    detail::check_transition_args(gen, n1, t);
    return n1;
  }
  return transition_row(gen, n1, t).mean();
}

}  // namespace stubvote
