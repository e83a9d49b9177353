#include "afpr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "afpr/random.hpp"

namespace afpr {

SamplingMask MaskConfig::build(std::size_t n) const {
  if (removed_fraction >= 0.0) return uniform_delay_removal(removed_fraction, n);
  return make_mask(kind, params, n);
}

void ExperimentConfig::validate() const {
  recipe.validate();
  if (trials < 1) throw InvalidArgument("ExperimentConfig: trials must be at least 1");
  if (!(success_threshold > 0.0)) throw InvalidArgument("ExperimentConfig: success_threshold must be positive");
  if (threads < 1) throw InvalidArgument("ExperimentConfig: threads must be at least 1");
  if (std::isnan(noise.snr_db)) throw InvalidArgument("ExperimentConfig: snr_db must not be NaN");
  if (mask.kind == MaskKind::custom && mask.removed_fraction < 0.0) {
    throw InvalidArgument("ExperimentConfig: custom masks cannot be built from a config");
  }
  init.validate();
  pipeline.validate(recipe.n_len);
}

TrialSeeds trial_seeds(std::uint64_t base, std::size_t trial) {
  TrialSeeds s;
  s.trial = derive_seed(base, trial);
  s.signal = derive_seed(s.trial, 1);
  s.noise = derive_seed(s.trial, 2);
  s.init = derive_seed(s.trial, 3);
  s.solver = derive_seed(s.trial, 4);
  s.perturbation = derive_seed(s.trial, 5);
  return s;
}

namespace {

// Runs task(i) for i in [0, count) on `threads` workers. Results are written by
// index, so the outcome does not depend on scheduling.
template <typename Task>
void parallel_for(std::size_t count, std::size_t threads, Task task) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) task(i);
    });
  }
  for (auto& t : pool) t.join();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct TrialData {
  GeneratedWaveform waveform;
  AmbiguityMap clean;
  AmbiguityMap measured;
};

TrialData make_trial_data(const ExperimentConfig& config, const SamplingMask& mask, const TrialSeeds& seeds) {
  WaveformRecipe recipe = config.recipe;
  recipe.seed = seeds.signal;
  GeneratedWaveform g = generate(recipe);
  AmbiguityMap clean = ambiguity_map(g.signal);
  NoiseSpec noise = config.noise;
  noise.seed = seeds.noise;
  AmbiguityMap measured = apply_mask(add_noise(clean, noise), mask.with_mode(MaskMode::zero_fill));
  return {std::move(g), std::move(clean), std::move(measured)};
}

std::optional<SamplingMask> partial(const SamplingMask& mask) {
  if (mask.kept_count() == mask.size() * mask.size()) return std::nullopt;
  return mask;
}

}  // namespace

ScenarioSummary run_scenario(const ExperimentConfig& config) {
  config.validate();
  const std::size_t n = config.recipe.n_len;
  const SamplingMask mask = config.mask.build(n);

  ScenarioSummary summary;
  summary.config = config;
  {
    WaveformRecipe probe = config.recipe;
    probe.seed = trial_seeds(config.seed, 0).signal;
    const SupportSpec support = generate(probe).support;
    if (support.kind != SupportKind::none) {
      summary.identifiability = identifiability_check(mask, support, config.spectrum_known);
      if (summary.identifiability.verdict != IdentifiabilityVerdict::ok) {
        summary.warnings.push_back("identifiability: " + to_string(summary.identifiability.verdict));
      }
    }
  }

  summary.trials.resize(config.trials);
  parallel_for(config.trials, config.threads, [&](std::size_t i) {
    RecoveryReport& rep = summary.trials[i];
    rep.trial = i;
    rep.seeds = trial_seeds(config.seed, i);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const TrialData data = make_trial_data(config, mask, rep.seeds);
      InitConfig init_cfg = config.init;
      init_cfg.seed = rep.seeds.init;
      const InitResult init = run_initialization(data.measured, init_cfg, partial(mask));
      rep.init_error = af_distance(data.clean, ambiguity_map(init.x0));

      PipelineConfig pipe = config.pipeline;
      pipe.solver.seed = rep.seeds.solver;
      const PipelineResult res = recover_signal(data.measured, mask, init.x0, data.waveform.support, pipe);
      rep.coarse_error = af_distance(data.clean, ambiguity_map(res.coarse.recovered));
      rep.rel_error = af_distance(data.clean, ambiguity_map(res.recovered));
      rep.iterations = res.coarse.iterations + (res.refined ? res.refined->iterations : 0);
      rep.final_mu = res.final_stage().final_mu;
      rep.chosen_restart = res.chosen_restart;
      rep.trace = res.final_stage().trace;
      rep.recovered = res.recovered;
      rep.warnings = init.warnings;
      rep.warnings.insert(rep.warnings.end(), res.warnings.begin(), res.warnings.end());
      rep.ok = true;
    } catch (const std::exception& e) {
      rep.ok = false;
      rep.error = e.what();
      rep.rel_error = std::numeric_limits<double>::infinity();
    }
    rep.seconds = config.deterministic ? 0.0 : seconds_since(t0);
  });

  std::vector<double> errors;
  double sum = 0.0;
  std::size_t ok = 0;
  std::size_t successes = 0;
  for (const auto& rep : summary.trials) {
    errors.push_back(rep.rel_error);
    if (!rep.ok) {
      ++summary.failures;
      continue;
    }
    sum += rep.rel_error;
    ++ok;
    if (rep.rel_error < config.success_threshold) ++successes;
  }
  std::sort(errors.begin(), errors.end());
  const std::size_t m = errors.size();
  summary.median_rel_error = m % 2 == 1 ? errors[m / 2] : 0.5 * (errors[m / 2 - 1] + errors[m / 2]);
  summary.mean_rel_error = ok > 0 ? sum / static_cast<double>(ok) : std::numeric_limits<double>::quiet_NaN();
  summary.success_rate = static_cast<double>(successes) / static_cast<double>(m);
  return summary;
}

std::vector<double> default_delta_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.1 * i);
  return grid;
}

SuccessMap success_rate_map(const ExperimentConfig& config, const std::vector<double>& deltas,
                            const std::vector<double>& removals) {
  config.validate();
  if (deltas.empty() || removals.empty()) throw InvalidArgument("success_rate_map: grids must be non-empty");
  for (double d : deltas) {
    if (!(d >= 0.0)) throw InvalidArgument("success_rate_map: delta must be non-negative");
  }
  const std::size_t n = config.recipe.n_len;
  std::vector<SamplingMask> masks;
  for (double r : removals) masks.push_back(uniform_delay_removal(r, n));

  const std::size_t per_cell = config.trials;
  const std::size_t count = removals.size() * deltas.size() * per_cell;
  std::vector<char> success(count, 0);
  parallel_for(count, config.threads, [&](std::size_t task) {
    const std::size_t trial = task % per_cell;
    const std::size_t di = (task / per_cell) % deltas.size();
    const std::size_t ri = task / (per_cell * deltas.size());
    const TrialSeeds seeds = trial_seeds(config.seed, trial);
    try {
      const TrialData data = make_trial_data(config, masks[ri], seeds);
      Rng rng(derive_seed(seeds.perturbation, di));
      CVector x0 = data.waveform.signal.samples();
      const double rms = x0.norm() / std::sqrt(static_cast<double>(x0.size()));
      for (Eigen::Index i = 0; i < x0.size(); ++i) x0[i] += deltas[di] * rms * (rng.below(2) == 0 ? -1.0 : 1.0);
      PipelineConfig pipe = config.pipeline;
      pipe.solver.seed = seeds.solver;
      pipe.solver.trace_every = std::max(pipe.solver.max_iters, pipe.refine_iters) + 1;
      const PipelineResult res =
          recover_signal(data.measured, masks[ri], ComplexSignal(std::move(x0)), data.waveform.support, pipe);
      success[task] = af_distance(data.clean, ambiguity_map(res.recovered)) < config.success_threshold ? 1 : 0;
    } catch (const std::exception&) {
      success[task] = 0;
    }
  });

  SuccessMap out{deltas, removals, {}, per_cell};
  out.rates.assign(removals.size(), std::vector<double>(deltas.size(), 0.0));
  for (std::size_t task = 0; task < count; ++task) {
    const std::size_t di = (task / per_cell) % deltas.size();
    const std::size_t ri = task / (per_cell * deltas.size());
    out.rates[ri][di] += success[task] ? 1.0 / static_cast<double>(per_cell) : 0.0;
  }
  return out;
}

std::vector<InitComparisonRow> init_comparison(const ExperimentConfig& config, const std::vector<double>& removals,
                                               const std::vector<std::optional<double>>& snrs) {
  config.validate();
  if (removals.empty() || snrs.empty()) throw InvalidArgument("init_comparison: grids must be non-empty");
  const std::size_t n = config.recipe.n_len;
  const std::size_t cells = removals.size() * snrs.size();
  const std::size_t count = cells * config.trials;
  std::vector<double> err_init(count, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> err_x0(count, std::numeric_limits<double>::quiet_NaN());
  std::vector<SamplingMask> masks;
  for (double r : removals) masks.push_back(uniform_delay_removal(r, n));

  parallel_for(count, config.threads, [&](std::size_t task) {
    const std::size_t trial = task % config.trials;
    const std::size_t cell = task / config.trials;
    const std::size_t ri = cell / snrs.size();
    const std::size_t si = cell % snrs.size();
    const TrialSeeds seeds = trial_seeds(config.seed, trial);
    ExperimentConfig local = config;
    local.noise.snr_db = snrs[si] ? *snrs[si] : std::numeric_limits<double>::infinity();
    try {
      const TrialData data = make_trial_data(local, masks[ri], seeds);
      InitConfig init_cfg = config.init;
      init_cfg.seed = seeds.init;
      const InitResult init = run_initialization(data.measured, init_cfg, partial(masks[ri]));
      err_init[task] = af_distance(data.clean, ambiguity_map(init.x_init));
      err_x0[task] = af_distance(data.clean, ambiguity_map(init.x0));
    } catch (const std::exception&) {
      // left as NaN and counted as a failure
    }
  });

  std::vector<InitComparisonRow> rows;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    InitComparisonRow row;
    row.removal = removals[cell / snrs.size()];
    row.snr_db = snrs[cell % snrs.size()];
    row.trials = config.trials;
    for (std::size_t t = 0; t < config.trials; ++t) {
      const double ei = err_init[cell * config.trials + t];
      const double e0 = err_x0[cell * config.trials + t];
      if (std::isnan(ei) || std::isnan(e0)) {
        ++row.failures;
        continue;
      }
      row.mean_init_error += ei;
      row.mean_x0_error += e0;
    }
    const std::size_t ok = config.trials - row.failures;
    row.mean_init_error = ok > 0 ? row.mean_init_error / static_cast<double>(ok) : std::numeric_limits<double>::quiet_NaN();
    row.mean_x0_error = ok > 0 ? row.mean_x0_error / static_cast<double>(ok) : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace afpr
