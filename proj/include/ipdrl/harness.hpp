#pragma once

// Experiment orchestration: Monte-Carlo sampling over seeds, equilibrium
// fraction time series with Wilson bands, robustness grids, and result
// files.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ipdrl/config.hpp"
#include "ipdrl/learners.hpp"
#include "ipdrl/stats.hpp"

namespace ipdrl {

enum class ExperimentKind { Phase, Mbrn, Learnability, Online, Batch, Robustness };

std::string_view to_string(ExperimentKind kind);
/// Throws ConfigError for an unknown name.
ExperimentKind parse_experiment_kind(std::string_view name);

struct TrajectoryRecord {
  std::int64_t t;
  double frac_wsls;
  double frac_gt;
  double frac_alld;
  double frac_other;
  Interval wsls;
  Interval gt;
  Interval alld;
  std::optional<double> coop_rate;  // online runs only
};

/// Fractions and 95% Wilson intervals of one cross-section of samples.
TrajectoryRecord make_record(std::int64_t t, std::span<const StrategyPair> pairs,
                             std::optional<double> coop_rate = std::nullopt);

struct BatchExperiment {
  GameParams params;
  double alpha;
  double epsilon;
  double delta;
  std::int64_t batch_size;
  std::int64_t steps;
  int samples;
  std::uint64_t seed;
  std::uint64_t cell = 0;
  InitRange init;
};

/// One record per adaptation, at t = (b + 1) * K. Sample k draws its initial
/// tables and its trajectory from seed_stream(seed, {StreamTag::Batch, cell, k}).
std::vector<TrajectoryRecord> batch_trajectory(const BatchExperiment& e, unsigned workers = 0);

struct OnlineExperiment {
  GameParams params;
  double alpha;
  double epsilon;
  double delta;
  std::int64_t steps;
  std::int64_t stride;
  std::int64_t window;
  int samples;
  std::uint64_t seed;
  InitRange init;
};

/// One record per `stride` steps; coop_rate is the mean over samples of the
/// trailing (C, C) share.
std::vector<TrajectoryRecord> online_trajectory(const OnlineExperiment& e, unsigned workers = 0);

struct RobustnessCell {
  double temptation;
  double sucker;
  double delta;
  std::int64_t batch_size;
  double alpha;
  double epsilon;
  int n;
  double final_wsls_frac;
  std::optional<std::int64_t> time_to_threshold;
};

/// K from sweep.batch_sizes crossed with sweep.robust_alphas (epsilon fixed
/// at learner.epsilon) and with sweep.robust_epsilons (alpha fixed at
/// learner.alpha); repeated (K, alpha, epsilon) combinations appear once.
std::vector<RobustnessCell> robustness_sweep(const ExperimentConfig& config, unsigned workers = 0);

/// Creates the directory results are written to: `base` itself with
/// `force`, otherwise a fresh timestamped subdirectory of `base`.
std::filesystem::path prepare_output_dir(const std::filesystem::path& base, ExperimentKind kind,
                                         bool force);

struct ExperimentResult {
  std::filesystem::path directory;
  std::vector<std::string> files;
};

/// Runs one experiment kind and writes its CSV files plus summary.json into
/// `out_dir`. Throws ConfigError for an invalid configuration.
ExperimentResult run_experiment(const ExperimentConfig& config, ExperimentKind kind,
                                const std::filesystem::path& out_dir);

/// Stable 64-bit FNV-1a digest of the canonical configuration, as hex.
std::string config_hash(const ExperimentConfig& config);

}  // namespace ipdrl
