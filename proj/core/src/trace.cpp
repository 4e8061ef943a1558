#include "irns/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

namespace irns {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_run_csv(const std::filesystem::path& path,
                   const std::vector<TraceRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_run_csv: cannot open " + path.string());
  out << kRunCsvHeader << '\n';
  for (const TraceRecord& r : records) {
    out << r.run_id << ',' << r.k << ',' << r.fev << ',' << r.n_k << ','
        << fmt(r.theta_k) << ',' << fmt(r.alpha_k) << ',' << fmt(r.metric) << ','
        << fmt(r.wall_time_ms) << '\n';
  }
  if (!out) throw std::runtime_error("write_run_csv: write failed: " + path.string());
}

std::vector<AggregateRow> aggregate_traces(
    const std::vector<std::vector<TraceRecord>>& runs, std::size_t grid_points) {
  if (runs.empty()) throw std::invalid_argument("aggregate_traces: no runs");
  if (grid_points < 2) throw std::invalid_argument("aggregate_traces: grid too small");
  for (const auto& run : runs)
    if (run.empty()) throw std::invalid_argument("aggregate_traces: empty run");

  double lo = std::numeric_limits<double>::infinity();
  double hi = 1.0;
  for (const auto& run : runs) {
    lo = std::min(lo, static_cast<double>(run.front().fev));
    hi = std::max(hi, static_cast<double>(run.back().fev));
  }
  lo = std::max(lo, 1.0);
  hi = std::max(hi, lo);

  std::vector<AggregateRow> rows(grid_points);
  std::vector<std::size_t> cursor(runs.size(), 0);
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double t = static_cast<double>(g) / static_cast<double>(grid_points - 1);
    // pin the endpoints: exp(log x) can land an ulp short of x
    const double fev = g == 0                ? lo
                       : g == grid_points - 1 ? hi
                                              : std::exp(log_lo + t * (log_hi - log_lo));
    AggregateRow& row = rows[g];
    row.fev = fev;
    double sum = 0.0;
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t ri = 0; ri < runs.size(); ++ri) {
      const auto& run = runs[ri];
      std::size_t& c = cursor[ri];
      while (c + 1 < run.size() && static_cast<double>(run[c + 1].fev) <= fev) ++c;
      // Before the first observation the first metric is carried backward.
      const double v = run[c].metric;
      sum += v;
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    row.mean_metric = sum / static_cast<double>(runs.size());
    row.min_metric = mn;
    row.max_metric = mx;
  }
  return rows;
}

void write_aggregate_csv(const std::filesystem::path& path,
                         const std::vector<AggregateRow>& rows) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_aggregate_csv: cannot open " + path.string());
  out << kAggregateCsvHeader << '\n';
  for (const AggregateRow& r : rows)
    out << fmt(r.fev) << ',' << fmt(r.mean_metric) << ',' << fmt(r.min_metric) << ','
        << fmt(r.max_metric) << '\n';
  if (!out)
    throw std::runtime_error("write_aggregate_csv: write failed: " + path.string());
}

}  // namespace irns
