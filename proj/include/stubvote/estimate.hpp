#pragma once

// Maximum-likelihood estimation of the stubborn couple (s0, s1).
//
// Observations x_1..x_m at times t_1..t_m are treated as snapshots of one
// realisation of N1; the log-likelihood of a couple is
//   sum_j log [e^{(t_{j+1} - t_j) Q}]_{x_j, x_{j+1}},
// maximised by scoring every admissible couple.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "chain.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "transient.hpp"

namespace stubvote {

struct Observation {
  double time = 0.0;  // years
  int count = 0;      // on the 0..n scale
};

/// Time-ordered integer observations of one party on a 0..n scale.
class ObservationSeries {
 public:
  ObservationSeries(int n, std::vector<Observation> points) : n_(n), points_(std::move(points)) {
    if (n < 2) throw Error(ErrorKind::Parameter, "scale n must be at least 2");
    if (points_.empty()) throw Error(ErrorKind::InsufficientData, "series needs at least one observation");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const auto& p = points_[i];
      if (p.count < 0 || p.count > n_) {
        throw Error(ErrorKind::Domain, "observation " + std::to_string(p.count) + " outside [0, " +
                                           std::to_string(n_) + "]");
      }
      if (!std::isfinite(p.time)) throw Error(ErrorKind::Domain, "observation time must be finite");
      if (i > 0 && !(p.time > points_[i - 1].time)) {
        throw Error(ErrorKind::Ordering, "observation times must be strictly increasing");
      }
    }
  }

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return points_.size(); }
  const Observation& operator[](std::size_t i) const noexcept { return points_[i]; }
  std::span<const Observation> points() const noexcept { return points_; }

  int min_count() const noexcept {
    return std::min_element(points_.begin(), points_.end(), by_count)->count;
  }
  int max_count() const noexcept {
    return std::max_element(points_.begin(), points_.end(), by_count)->count;
  }

  /// First `count` observations.
  ObservationSeries prefix(std::size_t count) const {
    return ObservationSeries(n_, std::vector<Observation>(points_.begin(), points_.begin() + count));
  }

 private:
  static bool by_count(const Observation& a, const Observation& b) { return a.count < b.count; }

  int n_;
  std::vector<Observation> points_;
};

/// Natural-log likelihood with an explicit "impossible" value ordered below
/// every real.
class LogLikelihood {
 public:
  constexpr LogLikelihood() = default;
  constexpr explicit LogLikelihood(double value) : value_(value), possible_(true) {}
  static constexpr LogLikelihood impossible() { return LogLikelihood{}; }

  constexpr bool is_impossible() const noexcept { return !possible_; }
  /// -infinity when impossible.
  constexpr double value() const noexcept {
    return possible_ ? value_ : -std::numeric_limits<double>::infinity();
  }

  friend constexpr bool operator==(const LogLikelihood& a, const LogLikelihood& b) noexcept {
    return a.possible_ == b.possible_ && (!a.possible_ || a.value_ == b.value_);
  }
  friend constexpr std::partial_ordering operator<=>(const LogLikelihood& a, const LogLikelihood& b) noexcept {
    if (a.possible_ != b.possible_) return a.possible_ <=> b.possible_;
    if (!a.possible_) return std::partial_ordering::equivalent;
    return a.value_ <=> b.value_;
  }

 private:
  double value_ = 0.0;
  bool possible_ = false;
};

struct Couple {
  int s0 = 0;
  int s1 = 0;
  friend auto operator<=>(const Couple&, const Couple&) = default;
};

struct SurfacePoint {
  Couple couple;
  LogLikelihood loglik;
};

struct FitResult {
  StubbornConfig best;
  LogLikelihood loglik;
  std::vector<SurfacePoint> surface;  // in grid order: s0 ascending, then s1
  std::size_t evaluated = 0;
};

namespace detail {

inline UniformizationScratch& worker_scratch() {
  thread_local UniformizationScratch scratch;
  return scratch;
}

/// log p_{from,to}(dt), or impossible. Both states must already be admissible.
inline LogLikelihood transition_term(const Generator& gen, int from, int to, double dt) {
  const double p = transition_probability(gen, from, to, dt, worker_scratch());
  if (!(p > 0.0)) return LogLikelihood::impossible();
  return LogLikelihood(std::log(p));
}

inline LogLikelihood series_log_likelihood(const Generator& gen, std::span<const Observation> points) {
  for (const auto& p : points) {
    if (!gen.config.contains(p.count)) return LogLikelihood::impossible();
  }
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < points.size(); ++j) {
    const auto term = transition_term(gen, points[j].count, points[j + 1].count,
                                      points[j + 1].time - points[j].time);
    if (term.is_impossible()) return term;
    sum += term.value();
  }
  return LogLikelihood(sum);
}

/// Index of the best point; the earliest in grid order wins ties.
inline std::size_t argmax(std::span<const SurfacePoint> surface) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < surface.size(); ++i) {
    if (surface[i].loglik > surface[best].loglik) best = i;
  }
  return best;
}

inline void require_two_points(const ObservationSeries& series) {
  if (series.size() < 2) throw Error(ErrorKind::InsufficientData, "at least two datapoints required");
}

}  // namespace detail

/// Log-likelihood of the consecutive transitions of `series` under `config`.
inline LogLikelihood log_likelihood(const StubbornConfig& config, const ObservationSeries& series) {
  detail::require_two_points(series);
  if (config.n() != series.n()) throw Error(ErrorKind::Parameter, "config and series use different scales");
  return detail::series_log_likelihood(build_generator(config), series.points());
}

/// Every couple of S_n, s0 ascending then s1 ascending.
inline std::vector<Couple> all_couples(int n) {
  std::vector<Couple> out;
  for (int s0 = 0; s0 <= n; ++s0) {
    for (int s1 = 0; s0 + s1 <= n; ++s1) {
      if (s0 + s1 >= 1) out.push_back({s0, s1});
    }
  }
  return out;
}

/// Couples that can explain every observation: s1 <= min x and s0 <= n - max x.
inline std::vector<Couple> feasible_grid(int n, const ObservationSeries& series) {
  const int s1_cap = series.min_count();
  const int s0_cap = n - series.max_count();
  std::vector<Couple> out;
  for (int s0 = 0; s0 <= s0_cap; ++s0) {
    for (int s1 = 0; s1 <= s1_cap; ++s1) {
      if (s0 + s1 >= 1 && s0 + s1 <= n) out.push_back({s0, s1});
    }
  }
  return out;
}

/// Scores `grid` (already in tie-break order) and returns the surface.
inline std::vector<SurfacePoint> score_grid(int n, std::span<const Couple> grid, const ObservationSeries& series,
                                            unsigned workers = 0) {
  std::vector<SurfacePoint> surface(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    const Generator gen = build_generator(StubbornConfig(n, grid[i].s0, grid[i].s1));
    surface[i] = {grid[i], detail::series_log_likelihood(gen, series.points())};
  });
  return surface;
}

/// Exhaustive maximum-likelihood couple. Ties go to the smallest s0, then the
/// smallest s1.
inline FitResult fit_stubborn(const ObservationSeries& series, int n, unsigned workers = 0) {
  detail::require_two_points(series);
  if (n != series.n()) throw Error(ErrorKind::Parameter, "fit scale differs from series scale");
  const auto grid = feasible_grid(n, series);
  if (grid.empty()) throw Error(ErrorKind::NoFeasibleModel, "no stubborn couple is compatible with the data");

  auto surface = score_grid(n, grid, series, workers);
  const std::size_t best = detail::argmax(surface);
  if (surface[best].loglik.is_impossible()) {
    throw Error(ErrorKind::NoFeasibleModel, "every admissible couple gives the data probability zero");
  }
  const auto c = surface[best].couple;
  const auto ll = surface[best].loglik;
  const std::size_t evaluated = surface.size();
  return FitResult{StubbornConfig(n, c.s0, c.s1), ll, std::move(surface), evaluated};
}

}  // namespace stubvote
