#pragma once

// Rolling-origin backtest. For election i >= 3 the couple is refitted on
// elections 1..i-1 and the forecast is E[N1(t_i - t_{i-1}) | N1(0) = x_{i-1}]
// under that couple. The previous result serves as the baseline predictor.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "chain.hpp"
#include "error.hpp"
#include "estimate.hpp"
#include "parallel.hpp"
#include "transient.hpp"

namespace stubvote {

struct ForecastRow {
  double time = 0.0;
  int actual = 0;
  double prediction = 0.0;
  double baseline = 0.0;
  double abs_error = 0.0;
  double baseline_abs_error = 0.0;
  Couple fitted;
  LogLikelihood loglik;
};

/// Forecast for an election that has not happened yet.
struct NextForecast {
  double time = 0.0;
  double prediction = 0.0;
  Couple fitted;
};

struct ForecastReport {
  std::vector<ForecastRow> rows;
  double start_time = -std::numeric_limits<double>::infinity();
  double mae = 0.0;
  double baseline_mae = 0.0;
  std::size_t scored = 0;
  std::optional<NextForecast> next;
};

struct ForecastOptions {
  double start_time = -std::numeric_limits<double>::infinity();
  std::optional<double> target_time;
  unsigned workers = 0;
};

struct TraceEntry {
  double time = 0.0;
  Couple couple;
};

/// Mean of |prediction - actual| over elections with time >= start_time.
inline double mean_absolute_error(std::span<const double> predictions, std::span<const double> actuals,
                                  std::span<const double> times, double start_time) {
  if (predictions.size() != actuals.size() || predictions.size() != times.size()) {
    throw Error(ErrorKind::Parameter, "prediction, actual and time vectors differ in length");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (times[i] >= start_time) {
      sum += std::abs(predictions[i] - actuals[i]);
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorKind::EmptyEvaluation, "no election at or after the evaluation cutoff");
  return sum / static_cast<double>(count);
}

/// x_{i-1} as the prediction for elections i = 2..m.
inline std::vector<double> baseline_forecast(const ObservationSeries& series) {
  detail::require_two_points(series);
  std::vector<double> out;
  out.reserve(series.size() - 1);
  for (std::size_t i = 1; i < series.size(); ++i) out.push_back(series[i - 1].count);
  return out;
}

namespace detail {

/// Log-likelihood surface over all of S_n, extended one observation at a time.
/// After observations 1..j have been added, the surface equals what
/// fit_stubborn scores on that prefix, term for term in the same order;
/// couples outside the prefix's feasible grid hold the impossible value.
class SurfaceAccumulator {
 public:
  SurfaceAccumulator(int n, unsigned workers) : n_(n), workers_(workers), grid_(all_couples(n)) {
    sums_.assign(grid_.size(), 0.0);
    alive_.assign(grid_.size(), 1);
  }

  void add(const Observation& obs) {
    const std::optional<Observation> prev = last_;
    parallel_for(grid_.size(), workers_, [&](std::size_t i) {
      if (!alive_[i]) return;
      const StubbornConfig config(n_, grid_[i].s0, grid_[i].s1);
      if (!config.contains(obs.count)) {
        alive_[i] = 0;
        return;
      }
      if (!prev) return;
      const auto term = transition_term(build_generator(config), prev->count, obs.count, obs.time - prev->time);
      if (term.is_impossible()) {
        alive_[i] = 0;
        return;
      }
      sums_[i] += term.value();
    });
    last_ = obs;
    ++observed_;
  }

  std::size_t observed() const noexcept { return observed_; }

  /// Best couple; ties resolved in grid order exactly as fit_stubborn does.
  std::optional<SurfacePoint> best() const {
    std::optional<SurfacePoint> top;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      if (!alive_[i]) continue;
      const LogLikelihood ll(sums_[i]);
      if (!top || ll > top->loglik) top = SurfacePoint{grid_[i], ll};
    }
    return top;
  }

 private:
  int n_;
  unsigned workers_;
  std::vector<Couple> grid_;
  std::vector<double> sums_;
  std::vector<char> alive_;
  std::optional<Observation> last_;
  std::size_t observed_ = 0;
};

inline SurfacePoint require_best(const SurfaceAccumulator& acc) {
  auto best = acc.best();
  if (!best) throw Error(ErrorKind::NoFeasibleModel, "no stubborn couple is compatible with the data");
  return *best;
}

inline double predict(int n, Couple c, int from, double dt) {
  return expected_count(build_generator(StubbornConfig(n, c.s0, c.s1)), from, dt);
}

}  // namespace detail

/// Backtest over elections 3..m, scored from `options.start_time` on.
inline ForecastReport rolling_forecast(const ObservationSeries& series, int n, const ForecastOptions& options = {}) {
  if (series.size() < 3) {
    throw Error(ErrorKind::InsufficientData, "at least three datapoints required for a backtest");
  }
  if (n != series.n()) throw Error(ErrorKind::Parameter, "forecast scale differs from series scale");

  ForecastReport report;
  report.start_time = options.start_time;
  detail::SurfaceAccumulator acc(n, options.workers);
  acc.add(series[0]);
  for (std::size_t i = 2; i < series.size(); ++i) {
    acc.add(series[i - 1]);
    const auto best = detail::require_best(acc);
    const auto& prev = series[i - 1];
    const auto& cur = series[i];
    ForecastRow row;
    row.time = cur.time;
    row.actual = cur.count;
    row.prediction = detail::predict(n, best.couple, prev.count, cur.time - prev.time);
    row.baseline = prev.count;
    row.abs_error = std::abs(row.prediction - row.actual);
    row.baseline_abs_error = std::abs(row.baseline - row.actual);
    row.fitted = best.couple;
    row.loglik = best.loglik;
    report.rows.push_back(row);
  }

  std::vector<double> preds, bases, actuals, times;
  for (const auto& r : report.rows) {
    preds.push_back(r.prediction);
    bases.push_back(r.baseline);
    actuals.push_back(r.actual);
    times.push_back(r.time);
  }
  report.mae = mean_absolute_error(preds, actuals, times, options.start_time);
  report.baseline_mae = mean_absolute_error(bases, actuals, times, options.start_time);
  for (double t : times) report.scored += t >= options.start_time ? 1 : 0;

  if (options.target_time) {
    const auto& last = series[series.size() - 1];
    if (!(*options.target_time > last.time)) {
      throw Error(ErrorKind::Domain, "target time must come after the last observation");
    }
    acc.add(last);
    const auto best = detail::require_best(acc);
    report.next = NextForecast{*options.target_time,
                               detail::predict(n, best.couple, last.count, *options.target_time - last.time),
                               best.couple};
  }
  return report;
}

/// Fitted couple behind each forecast of rolling_forecast, keyed by the time
/// of the election being forecast.
inline std::vector<TraceEntry> stubborn_trace(const ObservationSeries& series, int n, unsigned workers = 0) {
  ForecastOptions options;
  options.workers = workers;
  const auto report = rolling_forecast(series, n, options);
  std::vector<TraceEntry> out;
  out.reserve(report.rows.size());
  for (const auto& r : report.rows) out.push_back({r.time, r.fitted});
  return out;
}

}  // namespace stubvote
