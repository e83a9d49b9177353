#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "afpr/ambiguity.hpp"
#include "afpr/sampling.hpp"
#include "afpr/signal.hpp"

namespace afpr {

/// One (delay, Doppler) cell of the measurement grid.
struct Cell {
  std::uint32_t p = 0;
  std::uint32_t k = 0;
};

/// Square-rooted measurements plus the cells an objective sums over.
struct Measurements {
  RMatrix sqrt_amplitude;
  BMatrix active;

  std::size_t size() const { return static_cast<std::size_t>(sqrt_amplitude.rows()); }
  std::vector<Cell> active_cells() const;
};

/// sqrt(max(A,0)) with removed cells zeroed; active cells follow the mask mode.
Measurements make_measurements(const AmbiguityMap& A, const SamplingMask& mask);
Measurements make_measurements(const AmbiguityMap& A);

/// h(z, mu) = (1/N^2) sum over active cells of (sqrt(|S_z|^2 + mu^2) - sqrt(A))^2.
double smoothed_objective(const CVector& z, const Measurements& m, double mu);
double smoothed_objective(const ComplexSignal& z, const Measurements& m, double mu);

/// Gradient of h with respect to conj(z), including the 1/N^2 prefactor.
/// When mu == 0, cells with S == 0 are skipped and counted in *skipped.
CVector wirtinger_gradient(const CVector& z, const Measurements& m, double mu, std::size_t* skipped = nullptr);
ComplexSignal wirtinger_gradient(const ComplexSignal& z, const Measurements& m, double mu);

/// Unscaled sum of the per-cell gradient terms over `batch`.
CVector minibatch_gradient(const CVector& z, const Measurements& m, double mu, std::span<const Cell> batch);
ComplexSignal minibatch_gradient(const ComplexSignal& z, const Measurements& m, double mu, std::span<const Cell> batch);

/// How the sampled direction d_Gamma is scaled before the mu test.
/// mean: (1/Q) sum over the batch, an unbiased estimate of the full gradient.
/// sum:  the bare sum over the batch.
enum class GradientScaling { mean, sum };

struct SolverConfig {
  double gamma1 = 0.1;
  double gamma = 0.1;
  double alpha = 0.6;
  double mu0 = 65.0;
  double epsilon = 1e-10;
  std::size_t max_iters = 20000;
  std::size_t batch_size = 0;  // Q; 0 means N
  std::uint64_t seed = 0;
  MaskMode mask_mode = MaskMode::exclude;
  GradientScaling gradient_scaling = GradientScaling::mean;
  // Solve for z / s against A / s^4, s = A[0,0]^(1/4) (or ||x0|| when that
  // cell is unavailable), so mu0 and alpha act on a unit-energy problem.
  bool normalize_scale = true;
  // Restrict iterates to signals with this support (offset fixed by the
  // translation/modulation ambiguity). kind none disables the restriction.
  SupportSpec support;
  double divergence_factor = 10.0;
  std::size_t trace_every = 1;
  // Step size per iteration; defaults to the constant alpha.
  std::function<double(std::size_t t, double alpha)> step_schedule;

  void validate(std::size_t n) const;
};

struct TraceRecord {
  std::size_t t = 0;
  double mu = 0.0;
  double grad_norm = 0.0;  // ||d_Gamma||_2 at iteration t
  double objective = 0.0;  // h(x^(t+1), mu^(t+1)), NaN when not sampled
  std::optional<double> dist_truth;
};

struct SolverTrace {
  std::vector<TraceRecord> records;
  std::vector<double> mu_history;  // mu^(0), mu^(1), ... for every iteration
};

enum class StopReason { gradient_tolerance, max_iterations };

struct RecoveryResult {
  ComplexSignal recovered;
  SolverTrace trace;
  StopReason stop_reason = StopReason::max_iterations;
  std::size_t iterations = 0;
  double final_mu = 0.0;
  double scale = 1.0;  // normalization factor s
  double initial_full_grad_norm = 0.0;  // ||grad h(x0, mu0)|| in normalized units
  double final_full_grad_norm = 0.0;    // ||grad h(x_T, mu_T)||
  double af_distance_to_input = 0.0;    // over active cells of the supplied A
  std::vector<std::string> warnings;
};

/// Trust-region smoothed amplitude solver with minibatch Wirtinger gradients.
/// Throws NumericalFailure on divergence.
RecoveryResult run_recovery(const AmbiguityMap& A, const SamplingMask& mask, const ComplexSignal& x0,
                            const SolverConfig& config, const std::optional<ComplexSignal>& truth = std::nullopt);

/// Number of interleaved subsequences the kept delay rows never couple:
/// d = gcd(N, every delay index with a kept cell). For d > 1 the measurements
/// are unchanged by independent phases on the samples n = r (mod d).
std::size_t delay_residue_classes(const SamplingMask& mask);

/// Moves z within the set of signals sharing its measurements so that as much
/// energy as possible falls inside the support window: searches reflection and
/// modulation (band_limited) or circular shift (time_limited), and for
/// band_limited signals also the phases of the `residues` interleaved
/// subsequences. Returns z unchanged for SupportKind::none.
CVector align_to_support(const CVector& z, const SupportSpec& spec, std::size_t residues = 1);

/// Recovery driver around run_recovery.
///
/// Stage 1 runs the solver without a support constraint `restarts` times (each
/// with its own minibatch seed) and keeps the run with the smallest distance to
/// the supplied measurements. If a support is declared and `refine` is set,
/// stage 2 aligns that estimate to the support, projects it, and runs the
/// solver again restricted to the support, starting from mu = refine_mu0.
struct PipelineConfig {
  SolverConfig solver;
  std::size_t restarts = 3;
  bool refine = true;
  double refine_mu0 = 0.01;
  std::size_t refine_iters = 10000;

  void validate(std::size_t n) const;
};

struct PipelineResult {
  ComplexSignal recovered;
  RecoveryResult coarse;
  std::optional<RecoveryResult> refined;
  std::size_t chosen_restart = 0;
  std::vector<double> restart_fits;  // distance to the measurements per restart
  std::size_t residue_classes = 1;
  std::vector<std::string> warnings;

  const RecoveryResult& final_stage() const { return refined ? *refined : coarse; }
};

PipelineResult recover_signal(const AmbiguityMap& A, const SamplingMask& mask, const ComplexSignal& x0,
                              const SupportSpec& support, const PipelineConfig& config,
                              const std::optional<ComplexSignal>& truth = std::nullopt);

std::string to_string(StopReason r);
std::string to_string(GradientScaling g);
GradientScaling gradient_scaling_from_string(const std::string& s);

}  // namespace afpr
