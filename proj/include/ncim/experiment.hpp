#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncim/config.hpp"
#include "ncim/metrics.hpp"

namespace ncim {

/// One Monte Carlo realization (codebook, activity, channels, noise) scored by every configured detector.
/// All detectors see the same realization.
std::vector<TrialMetrics> run_trial(const SimConfig& cfg, std::uint64_t trial_seed);

struct PointSummary {
  std::string algorithm;
  int trials = 0;
  double nmse_mean = 0.0;
  double ader_mean = 0.0;
  double ber_mean = 0.0;
  double iterations_mean = 0.0;
  long errors_total = 0;  // trials with any activity or bit error
  double cm = 0.0;
  double ec = 0.0;
};

/// Runs cfg.trials trials seeded by derive_seed(master_seed, stream, t) on `threads` workers
/// (0 = hardware concurrency). Reduction is in trial order, so the result does not depend on `threads`.
std::vector<PointSummary> run_point(const SimConfig& cfg, std::uint64_t stream, int threads = 0);

/// Table-style complexity of `algorithm` at T = T0.
double algorithm_complexity(const SimConfig& cfg, const std::string& algorithm);

/// CSV text for a full sweep (header plus one row per sweep point and algorithm).
std::string experiment_csv(const ExperimentSpec& spec, int threads = 0);

/// Writes <out_dir>/<spec.name>.csv and returns its path. Throws std::runtime_error if unwritable.
std::string run_experiment(const ExperimentSpec& spec, const std::string& out_dir, int threads = 0);

}  // namespace ncim
