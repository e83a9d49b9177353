#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "afpr/ambiguity.hpp"
#include "afpr/initializer.hpp"
#include "afpr/sampling.hpp"
#include "afpr/signal.hpp"
#include "afpr/solver.hpp"

namespace afpr {

/// Which cells of the AF a scenario keeps. removed_fraction >= 0 overrides
/// kind: uniformly spaced delay rows with that fraction removed (see
/// uniform_delay_removal). Removed cells are zero in the measured map; whether
/// the solver fits them is SolverConfig::mask_mode.
struct MaskConfig {
  MaskKind kind = MaskKind::full;
  MaskParams params;
  double removed_fraction = -1.0;

  SamplingMask build(std::size_t n) const;
};

struct ExperimentConfig {
  WaveformRecipe recipe;
  MaskConfig mask;
  NoiseSpec noise;  // noise.seed is ignored; each trial derives its own
  InitConfig init;
  PipelineConfig pipeline;
  std::size_t trials = 10;
  double success_threshold = 1e-6;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  bool spectrum_known = false;  // for the identifiability count
  bool deterministic = false;   // zero all timings so reports are byte-identical

  void validate() const;
  /// Restores 100 trials per cell for full-size statistics.
  void apply_full_scale() { trials = 100; }
};

/// Seeds of one trial, all derived from (base seed, trial index) so a single
/// trial can be rerun in isolation.
struct TrialSeeds {
  std::uint64_t trial = 0;
  std::uint64_t signal = 0;
  std::uint64_t noise = 0;
  std::uint64_t init = 0;
  std::uint64_t solver = 0;
  std::uint64_t perturbation = 0;
};

TrialSeeds trial_seeds(std::uint64_t base, std::size_t trial);

/// One trial of a scenario. rel_error is the AF distance of the recovered
/// signal to the clean, complete AF of the generated waveform.
struct RecoveryReport {
  std::size_t trial = 0;
  TrialSeeds seeds;
  bool ok = false;
  std::string error;
  double rel_error = 0.0;
  double init_error = 0.0;    // x0 from the initializer
  double coarse_error = 0.0;  // after the unconstrained stage
  std::size_t iterations = 0;
  double final_mu = 0.0;
  std::size_t chosen_restart = 0;
  double seconds = 0.0;
  std::optional<ComplexSignal> recovered;
  SolverTrace trace;
  std::vector<std::string> warnings;
};

struct ScenarioSummary {
  ExperimentConfig config;
  IdentifiabilityReport identifiability;
  std::vector<RecoveryReport> trials;
  double median_rel_error = 0.0;  // failed trials count as +inf
  double mean_rel_error = 0.0;    // over successful trials; NaN if none
  std::size_t failures = 0;
  double success_rate = 0.0;      // fraction with rel_error < success_threshold
  std::vector<std::string> warnings;
};

/// generate -> AF -> mask -> noise -> initialize -> recover, per trial.
/// Solver or initializer failures are recorded per trial; the batch continues.
ScenarioSummary run_scenario(const ExperimentConfig& config);

struct SuccessMap {
  std::vector<double> deltas;
  std::vector<double> removals;
  std::vector<std::vector<double>> rates;  // rates[removal][delta]
  std::size_t trials = 0;
};

/// Empirical success rate of the recovery pipeline started at
/// x + delta * rms(x) * zeta, zeta uniformly in {-1, +1} per sample, with
/// `removal` of the delay rows removed uniformly. Success means
/// rel_error < config.success_threshold.
SuccessMap success_rate_map(const ExperimentConfig& config, const std::vector<double>& deltas,
                            const std::vector<double>& removals);

std::vector<double> default_delta_grid();  // 0, 0.1, ..., 1.0

struct InitComparisonRow {
  double removal = 0.0;
  std::optional<double> snr_db;  // nullopt: noiseless
  double mean_init_error = 0.0;  // x_init
  double mean_x0_error = 0.0;    // initializer output
  std::size_t trials = 0;
  std::size_t failures = 0;      // excluded from the means
};

/// Mean AF distance of x_init and of the initializer output x0 to the clean AF,
/// per (removal fraction, SNR) cell. Failed trials are excluded from the means.
std::vector<InitComparisonRow> init_comparison(const ExperimentConfig& config, const std::vector<double>& removals,
                                               const std::vector<std::optional<double>>& snrs);

}  // namespace afpr
