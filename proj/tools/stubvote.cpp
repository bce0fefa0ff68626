// stubvote: fit stubborn-voter models to election series, backtest forecasts,
// and simulate the underlying chain.
//
// Exit codes: 0 ok, 2 input error, 3 no feasible model, 4 empty evaluation.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <stubvote/chain.hpp>
#include <stubvote/estimate.hpp>
#include <stubvote/forecast.hpp>
#include <stubvote/ingest.hpp>
#include <stubvote/report_io.hpp>
#include <stubvote/simulate.hpp>
#include <stubvote/transient.hpp>

namespace {

using namespace stubvote;
using nlohmann::json;

constexpr int kExitInput = 2;
constexpr int kExitNoModel = 3;
constexpr int kExitEmpty = 4;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoFeasibleModel:
      return kExitNoModel;
    case ErrorKind::EmptyEvaluation:
      return kExitEmpty;
    case ErrorKind::Internal:
      return 1;
    default:
      return kExitInput;
  }
}

struct Common {
  std::string input;
  std::string party;
  int n = 100;
  std::string format = "text";
  std::string output;
  unsigned workers = 0;
};

/// Writes to --output when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(ErrorKind::Parameter, "cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
};

ObservationSeries load_series(const Common& c) {
  const auto series = binarize(load_elections(c.input), c.party);
  if (c.n != 100) {
    throw Error(ErrorKind::Parameter, "election series are on the 0..100 scale; --n must be 100");
  }
  return series;
}

int cmd_fit(const Common& c, std::optional<double> upto, bool surface) {
  auto series = load_series(c);
  if (upto) {
    std::size_t keep = 0;
    while (keep < series.size() && series[keep].time <= *upto) ++keep;
    if (keep == 0) throw Error(ErrorKind::InsufficientData, "at least two datapoints required");
    series = series.prefix(keep);
  }
  const auto fit = fit_stubborn(series, c.n, c.workers);
  Sink sink(c.output);
  if (c.format == "json") {
    sink.stream() << to_json(fit, surface).dump(2) << '\n';
  } else {
    sink.stream() << "best s0=" << fit.best.s0() << " s1=" << fit.best.s1() << '\n'
                  << "loglik " << format_number(fit.loglik.value()) << '\n'
                  << "grid " << fit.evaluated << '\n';
  }
  return 0;
}

int cmd_forecast(const Common& c, std::optional<double> cutoff, std::optional<double> target) {
  const auto series = load_series(c);
  ForecastOptions opts;
  if (cutoff) opts.start_time = *cutoff;
  opts.target_time = target;
  opts.workers = c.workers;
  const auto report = rolling_forecast(series, c.n, opts);

  Sink sink(c.output);
  std::ostream& summary = sink.to_file() ? std::cout : std::cerr;
  if (c.format == "json") {
    sink.stream() << to_json(report).dump(2) << '\n';
  } else if (c.format == "csv") {
    write_csv(sink.stream(), report);
  } else {
    auto& out = sink.stream();
    for (const auto& r : report.rows) {
      out << format_number(r.time) << "  actual " << r.actual << "  predicted " << format_number(r.prediction)
          << "  (" << r.fitted.s0 << ", " << r.fitted.s1 << ")\n";
    }
    if (report.next) {
      out << format_number(report.next->time) << "  next        predicted " << format_number(report.next->prediction)
          << "  (" << report.next->fitted.s0 << ", " << report.next->fitted.s1 << ")\n";
    }
  }
  summary << "mae " << format_number(report.mae) << '\n'
          << "baseline_mae " << format_number(report.baseline_mae) << '\n';
  return 0;
}

struct SimArgs {
  int s0 = 0;
  int s1 = 0;
  int start = 0;
  double t = 0.0;
  long runs = 10000;
  std::uint64_t seed = 1;
};

int cmd_simulate(const Common& c, const SimArgs& a) {
  if (a.runs < 1) throw Error(ErrorKind::Parameter, "--runs must be at least 1");
  const StubbornConfig config(c.n, a.s0, a.s1);
  const auto freq = empirical_distribution(config, a.start, a.t, static_cast<std::size_t>(a.runs), a.seed, c.workers);
  const auto exact = transition_row(build_generator(config), a.start, a.t);
  double tv = 0.0;
  for (std::size_t i = 0; i < freq.probs.size(); ++i) tv += std::abs(freq.probs[i] - exact.probs[i]);
  tv /= 2.0;

  Sink sink(c.output);
  if (c.format == "json") {
    json states = json::array();
    for (std::size_t i = 0; i < freq.probs.size(); ++i) {
      states.push_back({{"state", freq.lowest_state + static_cast<int>(i)},
                        {"frequency", freq.probs[i]},
                        {"analytic", exact.probs[i]}});
    }
    json j{{"n", c.n}, {"s0", a.s0}, {"s1", a.s1}, {"start", a.start}, {"t", a.t},
           {"runs", a.runs}, {"seed", a.seed}, {"total_variation", tv}, {"states", std::move(states)}};
    sink.stream() << j.dump(2) << '\n';
  } else {
    auto& out = sink.stream();
    out << "state,frequency,analytic\n";
    for (std::size_t i = 0; i < freq.probs.size(); ++i) {
      out << freq.lowest_state + static_cast<int>(i) << ',' << format_number(freq.probs[i]) << ','
          << format_number(exact.probs[i]) << '\n';
    }
    if (!sink.to_file()) std::cerr << "total_variation " << format_number(tv) << '\n';
    else std::cout << "total_variation " << format_number(tv) << '\n';
  }
  return 0;
}

struct RunSpec {
  std::string label;
  std::string path;
  std::string party;
  double cutoff;
};

RunSpec parse_run(const std::string& spec) {
  // FILE:PARTY[:CUTOFF]
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() < 2 || parts.size() > 3) {
    throw Error(ErrorKind::Parameter, "--run expects FILE:PARTY[:CUTOFF], got '" + spec + "'");
  }
  double cutoff = -std::numeric_limits<double>::infinity();
  if (parts.size() == 3) {
    try {
      cutoff = std::stod(parts[2]);
    } catch (...) {
      throw Error(ErrorKind::Parameter, "invalid cutoff in '" + spec + "'");
    }
  }
  return {parts[1] + "@" + parts[0], parts[0], parts[1], cutoff};
}

std::vector<RunSpec> default_runs(const std::string& data_dir, double uk_cutoff, double us_cutoff) {
  const std::string uk = data_dir + "/uk_elections.csv";
  const std::string us = data_dir + "/us_elections.csv";
  return {{"UK CON", uk, "CON", uk_cutoff},
          {"UK LAB", uk, "LAB", uk_cutoff},
          {"US REP", us, "REP", us_cutoff},
          {"US DEM", us, "DEM", us_cutoff}};
}

int cmd_evaluate(const Common& c, std::vector<RunSpec> runs) {
  json per_run = json::array();
  double mae_sum = 0.0, base_sum = 0.0, abs_sum = 0.0, base_abs_sum = 0.0;
  std::size_t scored = 0;
  for (const auto& run : runs) {
    Common rc = c;
    rc.input = run.path;
    rc.party = run.party;
    ForecastOptions opts;
    opts.start_time = run.cutoff;
    opts.workers = c.workers;
    const auto report = rolling_forecast(load_series(rc), c.n, opts);
    mae_sum += report.mae;
    base_sum += report.baseline_mae;
    for (const auto& r : report.rows) {
      if (r.time >= run.cutoff) {
        abs_sum += r.abs_error;
        base_abs_sum += r.baseline_abs_error;
      }
    }
    scored += report.scored;
    per_run.push_back({{"label", run.label},
                       {"cutoff", std::isfinite(run.cutoff) ? json(run.cutoff) : json(nullptr)},
                       {"scored", report.scored},
                       {"mae", report.mae},
                       {"baseline_mae", report.baseline_mae}});
  }
  const double k = static_cast<double>(runs.size());
  const double s = static_cast<double>(scored);
  json j{{"runs", per_run},
         {"mean_mae", mae_sum / k},
         {"mean_baseline_mae", base_sum / k},
         {"pooled_mae", abs_sum / s},
         {"pooled_baseline_mae", base_abs_sum / s}};

  Sink sink(c.output);
  if (c.format == "json") {
    sink.stream() << j.dump(2) << '\n';
  } else {
    auto& out = sink.stream();
    for (const auto& r : per_run) {
      out << r["label"].get<std::string>() << "  mae " << format_number(r["mae"].get<double>()) << "  baseline "
          << format_number(r["baseline_mae"].get<double>()) << "  scored " << r["scored"].get<std::size_t>() << '\n';
    }
    out << "mean mae " << format_number(j["mean_mae"].get<double>()) << "  baseline "
        << format_number(j["mean_baseline_mae"].get<double>()) << '\n'
        << "pooled mae " << format_number(j["pooled_mae"].get<double>()) << "  baseline "
        << format_number(j["pooled_baseline_mae"].get<double>()) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stubborn-voter model: fit, forecast, simulate, evaluate"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool needs_data) {
    if (needs_data) {
      sub->add_option("--input", common.input, "Election CSV (year,party,share_percent)")->required();
      sub->add_option("--party", common.party, "Party label to model as state 1")->required();
    }
    sub->add_option("--n", common.n, "Population size");
    sub->add_option("--output", common.output, "Write the result here instead of stdout");
    sub->add_option("--workers", common.workers, "Worker threads (default: $STUBVOTE_WORKERS or all cores)");
  };

  auto* fit = app.add_subcommand("fit", "Maximum-likelihood stubborn couple for a party");
  add_common(fit, true);
  std::optional<double> upto;
  bool surface = false;
  fit->add_option("--format", common.format)->check(CLI::IsMember({"text", "json"}));
  fit->add_option("--upto", upto, "Only use elections up to this time");
  fit->add_flag("--surface", surface, "Include the full likelihood surface in JSON output");

  auto* forecast = app.add_subcommand("forecast", "Rolling backtest with previous-result baseline");
  add_common(forecast, true);
  std::optional<double> cutoff, target;
  forecast->add_option("--format", common.format)->check(CLI::IsMember({"text", "json", "csv"}));
  forecast->add_option("--cutoff", cutoff, "Score only elections at or after this time");
  forecast->add_option("--target", target, "Also forecast a future election at this time");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo law of N1(t) next to the analytic row");
  add_common(simulate, false);
  SimArgs sim;
  simulate->add_option("--s0", sim.s0)->required();
  simulate->add_option("--s1", sim.s1)->required();
  simulate->add_option("--start", sim.start, "Initial count n1")->required();
  simulate->add_option("--t", sim.t, "Elapsed time in years")->required();
  simulate->add_option("--runs", sim.runs);
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--format", common.format)->check(CLI::IsMember({"text", "csv", "json"}));

  auto* evaluate = app.add_subcommand("evaluate", "MAE across several party backtests");
  add_common(evaluate, false);
  std::vector<std::string> run_specs;
  std::string data_dir = STUBVOTE_DATA_DIR;
  double uk_cutoff = 1960, us_cutoff = 1940;
  evaluate->add_option("--run", run_specs, "FILE:PARTY[:CUTOFF]; default is the bundled UK and US series");
  evaluate->add_option("--data-dir", data_dir, "Location of the bundled fixtures");
  evaluate->add_option("--uk-cutoff", uk_cutoff);
  evaluate->add_option("--us-cutoff", us_cutoff);
  evaluate->add_option("--format", common.format)->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (*fit) return cmd_fit(common, upto, surface);
    if (*forecast) return cmd_forecast(common, cutoff, target);
    if (*simulate) return cmd_simulate(common, sim);
    std::vector<RunSpec> runs;
    if (run_specs.empty()) {
      runs = default_runs(data_dir, uk_cutoff, us_cutoff);
    } else {
      for (const auto& s : run_specs) runs.push_back(parse_run(s));
    }
    return cmd_evaluate(common, std::move(runs));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  }
}
