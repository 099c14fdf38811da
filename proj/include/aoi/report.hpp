#pragma once

// CSV output and range parsing shared by the command-line tool.

#include "aoi/analysis.hpp"
#include "aoi/simulator.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aoi::report {

/// 12 significant digits, shortest form ("2.5", "1.07306796821").
inline std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline const char* flag(bool b) noexcept { return b ? "true" : "false"; }

inline double parse_number(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty())
    throw std::invalid_argument(std::string(what) + ": '" + std::string(s) + "' is not a number");
  return v;
}

/// "x" (single value), "start:stop:count" (linear, inclusive) or
/// "log:start:stop:count" (log-spaced, inclusive).
inline std::vector<double> parse_range(std::string_view spec) {
  bool log = false;
  if (spec.starts_with("log:")) {
    log = true;
    spec.remove_prefix(4);
  }
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = spec.find(':', pos);
    parts.push_back(spec.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  if (parts.size() == 1 && !log) return {parse_number(parts[0], "range")};
  if (parts.size() != 3)
    throw std::invalid_argument("range '" + std::string(spec) + "': expected start:stop:count or log:start:stop:count");
  const double a = parse_number(parts[0], "range start");
  const double b = parse_number(parts[1], "range stop");
  const double n = parse_number(parts[2], "range count");
  if (!(n >= 1.0) || n != std::floor(n)) throw std::invalid_argument("range count must be a positive integer");
  if (!(b >= a)) throw std::invalid_argument("range stop must be >= start");
  const auto count = static_cast<std::size_t>(n);
  return log ? analysis::logspace(a, b, count) : analysis::linspace(a, b, count);
}

/// Writes "# config: key=value" lines.
inline void write_config(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& config) {
  for (const auto& [k, v] : config) os << "# config: " << k << '=' << v << '\n';
}

inline void write_bound_report(std::ostream& os, const analysis::BoundReport& r) {
  const auto name = analysis::to_string(r.proposition);
  for (const auto& row : r.rows)
    os << name << ',' << num(row.rho) << ',' << num(row.value) << ',' << num(row.lower) << ',' << num(row.upper) << ','
       << flag(row.pass) << '\n';
}

inline constexpr std::string_view kBoundHeader = "prop,rho,ratio,lower,upper,pass";
inline constexpr std::string_view kSweepHeader = "lambda2,model,objective,aaoi,method,ci95";
inline constexpr std::string_view kEstimateHeader = "model,lambda1,lambda2,mu,source,mean_age,ci95,seed,events";
inline constexpr std::string_view kTraceHeader = "time,age,source";

inline void write_sweep_rows(std::ostream& os, const std::vector<analysis::SweepRow>& rows) {
  for (const auto& r : rows)
    os << num(r.lambda2) << ',' << analysis::to_string(r.model) << ',' << analysis::to_string(r.objective) << ','
       << num(r.aaoi) << ',' << analysis::to_string(r.method) << ',' << num(r.ci95) << '\n';
}

/// One row per source; sources are numbered from 1.
inline void write_estimate_rows(std::ostream& os, std::string_view model, const sim::SimConfig& c,
                                const sim::SimEstimate& e) {
  const double l1 = c.lambdas.size() > 0 ? c.lambdas[0] : 0.0;
  const double l2 = c.lambdas.size() > 1 ? c.lambdas[1] : 0.0;
  for (std::size_t s = 0; s < e.sources.size(); ++s)
    os << model << ',' << num(l1) << ',' << num(l2) << ',' << num(c.mu) << ',' << s + 1 << ','
       << num(e.sources[s].mean_age) << ',' << num(e.sources[s].ci95) << ',' << e.seed << ',' << e.events << '\n';
}

inline void write_trace_rows(std::ostream& os, const std::vector<sim::TracePoint>& trace, std::size_t source) {
  for (const auto& p : trace) os << num(p.time) << ',' << num(p.age) << ',' << source + 1 << '\n';
}

} // namespace aoi::report
