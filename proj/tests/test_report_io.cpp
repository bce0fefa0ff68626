#include <sstream>

#include <gtest/gtest.h>

#include <stubvote/report_io.hpp>

using namespace stubvote;

namespace {

ForecastReport small_report() {
  std::vector<Observation> obs{{0, 30}, {2, 33}, {4, 31}, {6.5, 36}};
  return rolling_forecast(ObservationSeries(60, obs), 60);
}

}  // namespace

TEST(ReportIo, CsvColumnsInFixedOrder) {
  std::ostringstream out;
  write_csv(out, small_report());
  std::istringstream in(out.str());
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header, "time,actual,prediction,baseline,abs_error,baseline_abs_error,s0_star,s1_star");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 7);
    ++rows;
  }
  EXPECT_EQ(rows, 2);
}

TEST(ReportIo, NumbersRoundTrip) {
  EXPECT_EQ(format_number(4.5), "4.5");
  EXPECT_EQ(format_number(1974.12), "1974.12");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(ReportIo, JsonCarriesSummaryAndRows) {
  const auto report = small_report();
  const auto j = to_json(report);
  EXPECT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["mae"].get<double>(), report.mae);
  EXPECT_TRUE(j["start_time"].is_null());
  EXPECT_EQ(j["rows"][0]["s0_star"].get<int>(), report.rows[0].fitted.s0);
  EXPECT_EQ(to_json(report).dump(), j.dump());
}

TEST(ReportIo, ImpossibleLikelihoodIsNull) {
  FitResult fit{StubbornConfig(10, 1, 1), LogLikelihood(-3.0), {{{0, 1}, LogLikelihood::impossible()}}, 1};
  const auto j = to_json(fit, true);
  EXPECT_TRUE(j["surface"][0]["loglik"].is_null());
  EXPECT_EQ(j["loglik"].get<double>(), -3.0);
}
