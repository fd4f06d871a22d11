#pragma once

// Replicated simulation grid: every (K, replicate) cell draws one dataset and
// runs each configured method on it.

#include <filesystem>
#include <string>
#include <vector>

#include "hjive/config.hpp"

namespace hjive {

struct ResultRow {
  std::string method;
  Index K = 0;
  Index replicate = 0;
  double error = 0.0;  // NaN when the replicate failed
  double theta_realized = 0.0;
  double spectral_gap = 0.0;
  std::vector<double> weights;
  double wallclock_ms = 0.0;
  std::string reason;  // empty on success
};

struct SummaryRow {
  std::string method;
  Index K = 0;
  double mean = 0.0;
  double se = 0.0;
  Index ok = 0;
  Index failed = 0;
};

struct ReplicateInstance {
  JiveGroundTruth truth;
  MultiViewData data;
};

/// Dataset seed for a grid cell. Methods share it, so comparisons are paired.
std::uint64_t replicate_seed(std::uint64_t master, Index K, Index replicate);

ReplicateInstance make_replicate(const ExperimentConfig& config, Index K, Index replicate);

/// All rows for one cell, one per configured method, in config order.
std::vector<ResultRow> run_cell(const ExperimentConfig& config, Index K, Index replicate);

/// Rows ordered by (method, K, replicate). `jobs` ≤ 1 runs inline.
std::vector<ResultRow> run_simulation(const ExperimentConfig& config, unsigned jobs = 1);

std::vector<SummaryRow> summarize(const ExperimentConfig& config, const std::vector<ResultRow>& rows);

/// Everything except wall-clock time, so reruns are byte-identical.
void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
void write_timings_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);

}  // namespace hjive
