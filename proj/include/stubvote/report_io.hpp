#pragma once

// JSON and CSV renderings of fit and forecast results. Numbers are written in
// shortest round-trip form so output is byte-stable.

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

#include <json.hpp>

#include "estimate.hpp"
#include "forecast.hpp"

namespace stubvote {

inline constexpr const char* kForecastCsvHeader =
    "time,actual,prediction,baseline,abs_error,baseline_abs_error,s0_star,s1_star";

inline std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline nlohmann::json loglik_json(const LogLikelihood& ll) {
  return ll.is_impossible() ? nlohmann::json(nullptr) : nlohmann::json(ll.value());
}

inline nlohmann::json couple_json(const Couple& c) { return {{"s0", c.s0}, {"s1", c.s1}}; }

inline nlohmann::json to_json(const FitResult& fit, bool with_surface = false) {
  nlohmann::json j{
      {"n", fit.best.n()},
      {"best", couple_json({fit.best.s0(), fit.best.s1()})},
      {"loglik", loglik_json(fit.loglik)},
      {"evaluated", fit.evaluated},
  };
  if (with_surface) {
    auto& surface = j["surface"] = nlohmann::json::array();
    for (const auto& p : fit.surface) {
      surface.push_back({{"s0", p.couple.s0}, {"s1", p.couple.s1}, {"loglik", loglik_json(p.loglik)}});
    }
  }
  return j;
}

inline nlohmann::json to_json(const ForecastReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({
        {"time", r.time},
        {"actual", r.actual},
        {"prediction", r.prediction},
        {"baseline", r.baseline},
        {"abs_error", r.abs_error},
        {"baseline_abs_error", r.baseline_abs_error},
        {"s0_star", r.fitted.s0},
        {"s1_star", r.fitted.s1},
        {"loglik", loglik_json(r.loglik)},
    });
  }
  nlohmann::json j{
      {"start_time", std::isfinite(report.start_time) ? nlohmann::json(report.start_time) : nlohmann::json(nullptr)},
      {"mae", report.mae},
      {"baseline_mae", report.baseline_mae},
      {"scored", report.scored},
      {"rows", std::move(rows)},
  };
  if (report.next) {
    j["next"] = {{"time", report.next->time},
                 {"prediction", report.next->prediction},
                 {"s0_star", report.next->fitted.s0},
                 {"s1_star", report.next->fitted.s1}};
  }
  return j;
}

inline void write_csv(std::ostream& out, const ForecastReport& report) {
  out << kForecastCsvHeader << '\n';
  for (const auto& r : report.rows) {
    out << format_number(r.time) << ',' << r.actual << ',' << format_number(r.prediction) << ','
        << format_number(r.baseline) << ',' << format_number(r.abs_error) << ','
        << format_number(r.baseline_abs_error) << ',' << r.fitted.s0 << ',' << r.fitted.s1 << '\n';
  }
}

}  // namespace stubvote
