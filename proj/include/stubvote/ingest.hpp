#pragma once

// Election results in long CSV format:
//
//   year,party,share_percent
//   1974.12,CON,37.9
//
// Rows for one election share a `year` and must be contiguous; elections
// appear in strictly increasing time order.

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "estimate.hpp"

namespace stubvote {

struct ElectionRecord {
  double time = 0.0;
  std::map<std::string, double> shares;  // percent
};

inline constexpr std::string_view kElectionHeader = "year,party,share_percent";

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] inline void parse_fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + msg);
}

inline double parse_decimal(std::string_view field, std::size_t line, const char* what) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    parse_fail(line, std::string("invalid ") + what + " '" + std::string(field) + "'");
  }
  return v;
}

inline bool is_party_token(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_')) return false;
  }
  return true;
}

}  // namespace detail

inline std::vector<ElectionRecord> load_elections(std::istream& in) {
  std::vector<ElectionRecord> records;
  std::string raw;
  std::size_t line = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = detail::trim(raw);
    if (!header_seen) {
      std::string_view h = text;
      if (h.starts_with("\xEF\xBB\xBF")) h.remove_prefix(3);
      if (h != kElectionHeader) detail::parse_fail(line, "expected header '" + std::string(kElectionHeader) + "'");
      header_seen = true;
      continue;
    }
    if (text.empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    for (;;) {
      const auto comma = text.find(',', pos);
      fields.push_back(detail::trim(text.substr(pos, comma - pos)));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (fields.size() != 3) detail::parse_fail(line, "expected 3 fields, found " + std::to_string(fields.size()));

    const double year = detail::parse_decimal(fields[0], line, "year");
    if (!detail::is_party_token(fields[1])) {
      detail::parse_fail(line, "party must be an uppercase token, got '" + std::string(fields[1]) + "'");
    }
    const double share = detail::parse_decimal(fields[2], line, "share");
    if (share < 0.0 || share > 100.0) detail::parse_fail(line, "share outside [0, 100]");

    if (records.empty() || year != records.back().time) {
      if (!records.empty() && !(year > records.back().time)) {
        throw Error(ErrorKind::Ordering, "line " + std::to_string(line) + ": election times must be strictly increasing");
      }
      records.push_back({year, {}});
    }
    auto& rec = records.back();
    if (!rec.shares.emplace(std::string(fields[1]), share).second) {
      detail::parse_fail(line, "duplicate party '" + std::string(fields[1]) + "'");
    }
    double total = 0.0;
    for (const auto& [party, s] : rec.shares) total += s;
    if (total > 100.5) detail::parse_fail(line, "shares of one election exceed 100%");
  }
  if (!header_seen) detail::parse_fail(line + 1, "missing header");
  return records;
}

inline std::vector<ElectionRecord> load_elections(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open '" + path + "'");
  return load_elections(in);
}

/// Rounds a percentage to the 0..100 scale, ties to even (38.5 -> 38).
inline int round_share(double share) {
  const double floor = std::floor(share);
  const double frac = share - floor;
  double r = floor;
  if (frac > 0.5 || (frac == 0.5 && std::fmod(floor, 2.0) != 0.0)) r += 1.0;
  return static_cast<int>(r);
}

/// Target party versus everyone else, as integer counts out of n = 100.
inline ObservationSeries binarize(const std::vector<ElectionRecord>& records, const std::string& target_party) {
  std::vector<Observation> points;
  points.reserve(records.size());
  for (const auto& rec : records) {
    const auto it = rec.shares.find(target_party);
    if (it == rec.shares.end()) {
      std::ostringstream msg;
      msg << "party '" << target_party << "' missing from election at " << rec.time;
      throw Error(ErrorKind::MissingData, msg.str());
    }
    points.push_back({rec.time, round_share(it->second)});
  }
  return ObservationSeries(100, std::move(points));
}

}  // namespace stubvote
