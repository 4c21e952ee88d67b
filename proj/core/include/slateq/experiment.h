#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "slateq/config.h"

namespace slateq {

struct MetricsRow {
  std::string agent_name;
  double avg_return = 0.0;
  double avg_quality = 0.0;
  double pct_return_vs_baseline = 0.0;
  double pct_quality_vs_baseline = 0.0;
  std::int64_t train_steps = 0;
  std::uint64_t seed = 0;
  double wall_clock_s = 0.0;
  double seconds_per_step = 0.0;
  std::int64_t gradient_steps = 0;
};

struct SuiteResult {
  std::vector<MetricsRow> rows;  // RANDOM first
};

// Trains and evaluates every variant of `config`, RANDOM first as the
// baseline (added if missing). When `out_dir` is non-empty it receives
//   metrics.csv        deterministic metrics, one row per agent
//   timing.csv         wall-clock figures
//   curve_<AGENT>.csv  step, smoothed_return
//   <AGENT>.ckpt.json  trained agent
// Files are rewritten after each completed run. Every file starts with a
// "# config_hash=... seed=..." line.
SuiteResult run_suite(const ExperimentConfig& config,
                      const std::filesystem::path& out_dir);

// Final evaluation seed shared by all agents of a suite, so they face the
// same users.
std::uint64_t final_eval_seed(std::uint64_t seed);
std::uint64_t training_seed(std::uint64_t seed, const std::string& agent_name);

std::string metrics_csv(const ExperimentConfig& config,
                        const std::vector<MetricsRow>& rows);

}  // namespace slateq
