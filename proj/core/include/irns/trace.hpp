#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace irns {

// One CSV row. wall_time_ms is 0 unless timing is enabled (IRNS_TIMING=1);
// data files are byte-reproducible by default and wall-clock measurements
// would break that.
struct TraceRecord {
  std::uint64_t run_id = 0;
  std::size_t k = 0;
  std::uint64_t fev = 0;
  std::size_t n_k = 0;
  double theta_k = 0;
  double alpha_k = 0;
  double metric = 0;
  double wall_time_ms = 0;
};

inline constexpr const char* kRunCsvHeader =
    "run_id,k,fev,N_k,theta_k,alpha_k,metric,wall_time_ms";
inline constexpr const char* kAggregateCsvHeader =
    "fev,mean_metric,min_metric,max_metric";

void write_run_csv(const std::filesystem::path& path,
                   const std::vector<TraceRecord>& records);

struct AggregateRow {
  double fev = 0;
  double mean_metric = 0;
  double min_metric = 0;
  double max_metric = 0;
};

// Interpolates each run's metric onto a common log-spaced FEV grid with
// last-observation-carried-forward (first observation carried backward for
// grid points before a run's first record), then reduces across runs.
std::vector<AggregateRow> aggregate_traces(
    const std::vector<std::vector<TraceRecord>>& runs, std::size_t grid_points = 200);

void write_aggregate_csv(const std::filesystem::path& path,
                         const std::vector<AggregateRow>& rows);

}  // namespace irns
