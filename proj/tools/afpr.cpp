// afpr command line. stdout carries data or an output path; diagnostics and
// errors go to stderr. Exit codes: 0 ok, 1 usage or bad input, 2 numerical failure.

#include <cctype>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "afpr/io.hpp"
#include "afpr/random.hpp"

#ifndef AFPR_VERSION
#define AFPR_VERSION "0.0.0"
#endif

namespace {

using afpr::io::Json;

// Everything a command can be configured with. One JSON schema serves all
// commands: the experiment keys plus an optional "support".
struct CliConfig {
  afpr::ExperimentConfig exp;
  std::optional<afpr::SupportSpec> support;
};

void load_config_file(const std::string& path, CliConfig& cfg) {
  Json j;
  try {
    j = Json::parse(afpr::io::read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw afpr::io::FormatError(path + ": " + e.what());
  }
  if (!j.is_object()) throw afpr::io::FormatError(path + ": expected a JSON object");
  if (j.contains("support")) {
    cfg.support = afpr::io::support_from_json(j.at("support"));
    j.erase("support");
  }
  cfg.exp = afpr::io::experiment_config_from_json(j, cfg.exp);
}

// "-n,--mu0" -> AFPR_MU0
std::string env_name(const std::string& names) {
  const std::string flag = names.substr(names.rfind(',') == std::string::npos ? 0 : names.rfind(',') + 1);
  std::string out = "AFPR_";
  for (char c : flag.substr(flag.find_first_not_of('-'))) {
    out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

// Flag values are applied on top of the config file only when given (on the
// command line or through the environment), so flag > env > file > default.
class Overrides {
 public:
  template <typename T, typename Apply>
  CLI::Option* add(CLI::App* app, const std::string& name, const std::string& help, T init, Apply apply) {
    auto holder = std::make_shared<T>(std::move(init));
    CLI::Option* opt = app->add_option(name, *holder, help)->capture_default_str()->envname(env_name(name));
    items_.push_back({opt, [holder, apply] { apply(*holder); }});
    return opt;
  }
  CLI::Option* flag(CLI::App* app, const std::string& name, const std::string& help, std::function<void()> apply) {
    CLI::Option* opt = app->add_flag(name, help);
    items_.push_back({opt, std::move(apply)});
    return opt;
  }
  void apply() const {
    for (const auto& [opt, fn] : items_) {
      if (opt->count() > 0) fn();
    }
  }

 private:
  std::vector<std::pair<CLI::Option*, std::function<void()>>> items_;
};

void emit_json(const Json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    afpr::io::write_text(out, text);
    std::cout << out << "\n";
  }
}

void emit_signal(const afpr::ComplexSignal& x, const std::string& out) {
  if (out.empty() || out == "-") {
    afpr::io::write_signal_csv(std::cout, x);
  } else {
    afpr::io::save_signal(out, x);
    std::cout << out << "\n";
  }
}

std::optional<afpr::SupportSpec> sidecar_support(const std::string& path) {
  const auto side = afpr::io::sidecar_path(path);
  if (!std::filesystem::exists(side)) return std::nullopt;
  const Json j = Json::parse(afpr::io::read_text(side));
  if (!j.contains("support")) return std::nullopt;
  return afpr::io::support_from_json(j.at("support"));
}

void add_recipe_flags(CLI::App* cmd, Overrides& ov, CliConfig& cfg) {
  const afpr::WaveformRecipe d;
  auto& r = cfg.exp.recipe;
  ov.add(cmd, "--kind", "gaussian_spectrum | lfm | nlfm", afpr::to_string(d.kind),
         [&r](const std::string& s) { r.kind = afpr::waveform_kind_from_string(s); });
  ov.add(cmd, "-n,--n", "signal length N", d.n_len, [&r](std::size_t v) { r.n_len = v; });
  ov.add(cmd, "--support", "band_limited | time_limited", afpr::to_string(d.support),
         [&r](const std::string& s) { r.support = afpr::support_kind_from_string(s); });
  ov.add(cmd, "--width", "support width (0: ceil((N-1)/2))", d.width, [&r](std::size_t v) { r.width = v; });
  ov.add(cmd, "--center-hz", "Gaussian spectrum center", d.center_hz, [&r](double v) { r.center_hz = v; });
  ov.add(cmd, "--cutoff", "Gaussian spectrum cutoff", d.cutoff, [&r](double v) { r.cutoff = v; });
  ov.add(cmd, "--sample-rate", "sample rate in Hz", d.sample_rate_hz, [&r](double v) { r.sample_rate_hz = v; });
  ov.add(cmd, "--pulse-T", "chirp pulse length in s (0: (N/2 - 1) dt)", d.pulse_T, [&r](double v) { r.pulse_T = v; });
  ov.add(cmd, "--sweep-df", "chirp sweep in Hz", d.sweep_df, [&r](double v) { r.sweep_df = v; });
  ov.add(cmd, "--nlfm-L", "NLFM series length", d.nlfm_L, [&r](std::size_t v) { r.nlfm_L = v; });
  ov.add(cmd, "--dt", "chirp sample spacing in s", d.dt, [&r](double v) { r.dt = v; });
}

void add_mask_flags(CLI::App* cmd, Overrides& ov, CliConfig& cfg) {
  const afpr::MaskConfig d;
  auto& m = cfg.exp.mask;
  ov.add(cmd, "--mask-kind", "full | uniform_delay | block_delay | block_doppler", afpr::to_string(d.kind),
         [&m](const std::string& s) { m.kind = afpr::mask_kind_from_string(s); });
  ov.add(cmd, "--keep-every", "uniform_delay: keep delays 0, d, 2d, ...", d.params.keep_every,
         [&m](std::size_t v) { m.params.keep_every = v; });
  ov.add(cmd, "--frac-first", "block masks: fraction removed at the start of the axis", d.params.frac_first,
         [&m](double v) { m.params.frac_first = v; });
  ov.add(cmd, "--frac-last", "block masks: fraction removed at the end of the axis", d.params.frac_last,
         [&m](double v) { m.params.frac_last = v; });
  ov.add(cmd, "--centered", "block masks: true (centered axis), false (index order), auto (delays false, Dopplers true)",
         std::string("auto"), [&m](const std::string& s) {
           if (s == "auto") {
             m.params.centered.reset();
           } else if (s == "true" || s == "false") {
             m.params.centered = s == "true";
           } else {
             throw afpr::InvalidArgument("--centered must be auto, true or false");
           }
         });
  ov.add(cmd, "--removed-fraction", "remove this fraction of delay rows uniformly (overrides --mask-kind)", -1.0,
         [&m](double v) { m.removed_fraction = v; });
}

void add_noise_flags(CLI::App* cmd, Overrides& ov, CliConfig& cfg) {
  auto& n = cfg.exp.noise;
  ov.add(cmd, "--snr", "SNR in dB (inf: noiseless)", std::string("inf"),
         [&n](const std::string& s) { n.snr_db = s == "inf" ? std::numeric_limits<double>::infinity() : std::stod(s); });
}

void add_init_flags(CLI::App* cmd, Overrides& ov, CliConfig& cfg) {
  const afpr::InitConfig d;
  auto& c = cfg.exp.init;
  ov.add(cmd, "--init-iters", "alternating iterations T", d.iters_T, [&c](std::size_t v) { c.iters_T = v; });
  ov.add(cmd, "--lambda", "proximal weight", d.lambda, [&c](double v) { c.lambda = v; });
  ov.add(cmd, "--lambda-mode", "fixed | premise", afpr::to_string(d.lambda_mode),
         [&c](const std::string& s) { c.lambda_mode = afpr::lambda_mode_from_string(s); });
  ov.add(cmd, "--scale-mode", "fourth_root | fit_scale", afpr::to_string(d.scale_mode),
         [&c](const std::string& s) { c.scale_mode = afpr::scale_mode_from_string(s); });
  ov.add(cmd, "--power-iters", "power iteration cap", d.power_iters, [&c](std::size_t v) { c.power_iters = v; });
}

void add_solver_flags(CLI::App* cmd, Overrides& ov, CliConfig& cfg) {
  const afpr::PipelineConfig d;
  auto& p = cfg.exp.pipeline;
  ov.add(cmd, "--mu0", "initial smoothing", d.solver.mu0, [&p](double v) { p.solver.mu0 = v; });
  ov.add(cmd, "--alpha", "trust region radius factor", d.solver.alpha, [&p](double v) { p.solver.alpha = v; });
  ov.add(cmd, "--gamma", "mu test threshold", d.solver.gamma, [&p](double v) { p.solver.gamma = v; });
  ov.add(cmd, "--gamma1", "mu decay factor", d.solver.gamma1, [&p](double v) { p.solver.gamma1 = v; });
  ov.add(cmd, "--epsilon", "stop when mu falls below", d.solver.epsilon, [&p](double v) { p.solver.epsilon = v; });
  ov.add(cmd, "--max-iters", "iteration cap per run", d.solver.max_iters, [&p](std::size_t v) { p.solver.max_iters = v; });
  ov.add(cmd, "--batch", "minibatch size Q (0: N)", d.solver.batch_size, [&p](std::size_t v) { p.solver.batch_size = v; });
  ov.add(cmd, "--mask-mode", "exclude | zero_fill", afpr::to_string(d.solver.mask_mode),
         [&p](const std::string& s) { p.solver.mask_mode = afpr::mask_mode_from_string(s); });
  ov.add(cmd, "--restarts", "unconstrained runs to choose from", d.restarts, [&p](std::size_t v) { p.restarts = v; });
  ov.add(cmd, "--refine", "support-restricted second stage", d.refine, [&p](bool v) { p.refine = v; });
  ov.add(cmd, "--refine-iters", "iteration cap of the second stage", d.refine_iters,
         [&p](std::size_t v) { p.refine_iters = v; });
  ov.add(cmd, "--trace-every", "trace sampling period", d.solver.trace_every,
         [&p](std::size_t v) { p.solver.trace_every = v; });
}

void add_support_flags(CLI::App* cmd, Overrides& ov, CliConfig& cfg) {
  auto spec = [&cfg]() -> afpr::SupportSpec& {
    if (!cfg.support) cfg.support = afpr::SupportSpec{};
    return *cfg.support;
  };
  ov.add(cmd, "--support-kind", "none | band_limited | time_limited (default: from the AF sidecar)", std::string("none"),
         [spec](const std::string& s) { spec().kind = afpr::support_kind_from_string(s); });
  ov.add(cmd, "--support-width", "support width", std::size_t{0}, [spec](std::size_t v) { spec().width = v; });
  ov.add(cmd, "--support-offset", "support offset", std::size_t{0}, [spec](std::size_t v) { spec().offset = v; });
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw afpr::InvalidArgument("'" + item + "' is not a number");
    }
  }
  if (out.empty()) throw afpr::InvalidArgument("empty list");
  return out;
}

std::string error_json(const std::string& kind, const std::string& message, int code) {
  Json j;
  j["error"] = kind;
  j["message"] = message;
  j["exit_code"] = code;
  return j.dump();
}

int run(int argc, char** argv) {
  CLI::App app{"Ambiguity function computation and waveform recovery from AF magnitudes"};
  app.set_version_flag("--version", std::string("afpr ") + AFPR_VERSION);
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  CliConfig cfg;
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  auto* seed_opt = app.add_option("--seed", seed, "base seed for every random stream")
                       ->envname("AFPR_SEED")
                       ->capture_default_str();
  auto* det_opt = app.add_flag("--deterministic", "zero timings so repeated runs are byte-identical")
                      ->envname("AFPR_DETERMINISTIC");
  auto* threads_opt =
      app.add_option("--threads", threads, "worker threads for trial batches")->envname("AFPR_THREADS")->capture_default_str();
  app.add_option("--config", config_path, "JSON config; flags override it")->envname("AFPR_CONFIG");

  Overrides ov;
  std::string in, out, mask_path, init_path, report, trace_path, truth_path, mask_out, ip_out, out_dir;
  std::string deltas = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1", removals = "0,0.25,0.5", snrs = "inf,20";
  bool full_scale = false;

  auto* gen = app.add_subcommand("generate", "synthesize a waveform; writes the signal CSV");
  add_recipe_flags(gen, ov, cfg);
  gen->add_option("-o,--out", out, "output CSV (default stdout)");

  auto* af = app.add_subcommand("af", "ambiguity function of a signal CSV");
  af->add_option("-i,--in", in, "signal CSV")->required();
  af->add_option("-o,--out", out, "output AF CSV (default stdout)");
  af->add_option("--inner-product", ip_out, "also write the complex map S");

  auto* mask = app.add_subcommand("mask", "remove AF cells; removed cells are zero in the output");
  mask->add_option("-i,--in", in, "AF CSV")->required();
  mask->add_option("-o,--out", out, "masked AF CSV (default stdout)");
  mask->add_option("--mask-out", mask_out, "write the kept-cell mask");
  add_mask_flags(mask, ov, cfg);

  auto* noise = app.add_subcommand("noise", "add white Gaussian noise to an AF");
  noise->add_option("-i,--in", in, "AF CSV")->required();
  noise->add_option("-o,--out", out, "noisy AF CSV (default stdout)");
  add_noise_flags(noise, ov, cfg);

  auto* init = app.add_subcommand("init", "spectral initialization from an AF");
  init->add_option("--af", in, "AF CSV")->required();
  init->add_option("--mask", mask_path, "kept-cell mask CSV");
  init->add_option("-o,--out", out, "initial estimate CSV (default stdout)");
  init->add_option("--report", report, "diagnostics JSON");
  init->add_option("--truth", truth_path, "true signal, for correlation errors");
  add_init_flags(init, ov, cfg);

  auto* rec = app.add_subcommand("recover", "recover a waveform from an AF");
  rec->add_option("--af", in, "AF CSV")->required();
  rec->add_option("--mask", mask_path, "kept-cell mask CSV");
  rec->add_option("--init", init_path, "starting point CSV (default: spectral initialization)");
  rec->add_option("-o,--out", out, "recovered signal CSV (default stdout)");
  rec->add_option("--report", report, "run summary JSON");
  rec->add_option("--trace", trace_path, "solver trace CSV of the final stage");
  rec->add_option("--truth", truth_path, "true signal, adds rel_error to the report");
  add_init_flags(rec, ov, cfg);
  add_solver_flags(rec, ov, cfg);
  add_support_flags(rec, ov, cfg);

  auto add_batch_flags = [&](CLI::App* cmd) {
    add_recipe_flags(cmd, ov, cfg);
    add_init_flags(cmd, ov, cfg);
    add_solver_flags(cmd, ov, cfg);
    ov.add(cmd, "--trials", "trials per cell", cfg.exp.trials, [&cfg](std::size_t v) { cfg.exp.trials = v; });
    cmd->add_flag("--paper-scale", full_scale, "100 trials");
    cmd->add_option("--out-dir", out_dir, "write JSON and CSV here; prints the JSON path");
  };

  auto* scen = app.add_subcommand("scenario", "seeded recovery trials; prints aggregate JSON");
  add_batch_flags(scen);
  add_mask_flags(scen, ov, cfg);
  add_noise_flags(scen, ov, cfg);
  ov.add(scen, "--threshold", "success threshold on rel_error", cfg.exp.success_threshold,
         [&cfg](double v) { cfg.exp.success_threshold = v; });
  ov.flag(scen, "--spectrum-known", "count the spectrum magnitude as known (identifiability check)",
          [&cfg] { cfg.exp.spectrum_known = true; });

  auto* smap = app.add_subcommand("success-map", "success rate over perturbation size and delay removal");
  add_batch_flags(smap);
  smap->add_option("--deltas", deltas, "comma-separated perturbation sizes")->capture_default_str();
  smap->add_option("--removals", removals, "comma-separated removed delay fractions")->capture_default_str();
  ov.add(smap, "--threshold", "success threshold on rel_error", cfg.exp.success_threshold,
         [&cfg](double v) { cfg.exp.success_threshold = v; });

  auto* icmp = app.add_subcommand("init-compare", "x_init vs spectral initialization error");
  add_batch_flags(icmp);
  icmp->add_option("--removals", removals, "comma-separated removed delay fractions")->capture_default_str();
  icmp->add_option("--snrs", snrs, "comma-separated SNRs in dB, inf for noiseless")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << error_json("usage", e.what(), 1) << "\n";
    return 1;
  }

  // default < file < env < flag
  if (!config_path.empty()) load_config_file(config_path, cfg);
  ov.apply();
  auto& exp = cfg.exp;
  if (seed_opt->count() > 0) {
    exp.seed = seed;
    exp.recipe.seed = seed;
    exp.noise.seed = afpr::derive_seed(seed, 2);
    exp.init.seed = afpr::derive_seed(seed, 3);
    exp.pipeline.solver.seed = afpr::derive_seed(seed, 4);
  }
  if (det_opt->count() > 0) exp.deterministic = true;
  if (threads_opt->count() > 0) exp.threads = threads;
  if (full_scale) exp.apply_full_scale();

  if (*gen) {
    exp.recipe.validate();
    const auto g = afpr::generate(exp.recipe);
    emit_signal(g.signal, out);
    if (!out.empty() && out != "-") {
      Json extra;
      extra["recipe"] = afpr::io::to_json(exp.recipe);
      extra["support"] = afpr::io::to_json(g.support);
      afpr::io::write_sidecar(out, "signal", g.signal.size(), extra);
    }
    return 0;
  }

  if (*af) {
    const auto x = afpr::io::load_signal(in);
    const auto A = afpr::ambiguity_map(x);
    Json extra;
    if (auto s = sidecar_support(in)) extra["support"] = afpr::io::to_json(*s);
    if (out.empty() || out == "-") {
      afpr::io::write_ambiguity_csv(std::cout, A);
    } else {
      afpr::io::save_ambiguity(out, A, extra);
      std::cout << out << "\n";
    }
    if (!ip_out.empty()) {
      std::ostringstream s;
      afpr::io::write_inner_product_csv(s, afpr::inner_product_map(x));
      afpr::io::write_text(ip_out, s.str());
    }
    return 0;
  }

  if (*mask) {
    const auto A = afpr::io::load_ambiguity(in);
    const auto m = exp.mask.build(A.size());
    const auto masked = afpr::apply_mask(A, m);
    Json extra;
    if (auto s = sidecar_support(in)) extra["support"] = afpr::io::to_json(*s);
    extra["mask"] = afpr::io::to_json(exp.mask);
    if (out.empty() || out == "-") {
      afpr::io::write_ambiguity_csv(std::cout, masked);
    } else {
      afpr::io::save_ambiguity(out, masked, extra);
      std::cout << out << "\n";
    }
    if (!mask_out.empty()) afpr::io::save_mask(mask_out, m);
    return 0;
  }

  if (*noise) {
    const auto A = afpr::io::load_ambiguity(in);
    const auto noisy = afpr::add_noise(A, exp.noise);
    Json extra;
    if (auto s = sidecar_support(in)) extra["support"] = afpr::io::to_json(*s);
    extra["noise"] = afpr::io::to_json(exp.noise);
    extra["noise"]["seed"] = exp.noise.seed;
    extra["realized_snr_db"] = afpr::realized_snr_db(A, noisy);
    if (out.empty() || out == "-") {
      afpr::io::write_ambiguity_csv(std::cout, noisy);
    } else {
      afpr::io::save_ambiguity(out, noisy, extra);
      std::cout << out << "\n";
    }
    return 0;
  }

  std::optional<afpr::ComplexSignal> truth;
  if (!truth_path.empty()) truth = afpr::io::load_signal(truth_path);

  if (*init) {
    const auto A = afpr::io::load_ambiguity(in);
    std::optional<afpr::SamplingMask> m;
    if (!mask_path.empty()) m = afpr::io::load_mask(mask_path);
    const auto r = afpr::run_initialization(A, exp.init, m, truth);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    emit_signal(r.x0, out);
    if (!report.empty()) {
      Json j = afpr::io::to_json(r);
      j["config"] = afpr::io::to_json(exp.init);
      afpr::io::write_text(report, j.dump(2) + "\n");
    }
    return 0;
  }

  if (*rec) {
    const auto A = afpr::io::load_ambiguity(in);
    const auto n = A.size();
    const auto m = mask_path.empty() ? afpr::SamplingMask::full(n) : afpr::io::load_mask(mask_path);
    if (m.size() != n) throw afpr::InvalidArgument("mask size does not match the AF");
    afpr::SupportSpec support;
    if (cfg.support) {
      support = *cfg.support;
    } else if (auto s = sidecar_support(in)) {
      support = *s;
    }
    const auto zero_filled = afpr::apply_mask(A, m);
    std::optional<afpr::InitResult> ir;
    if (init_path.empty()) {
      const bool partial = m.kept_count() < n * n;
      ir = afpr::run_initialization(zero_filled, exp.init, partial ? std::optional(m) : std::nullopt, truth);
    }
    const auto x0 = ir ? ir->x0 : afpr::io::load_signal(init_path);
    const auto r = afpr::recover_signal(zero_filled, m, x0, support, exp.pipeline, truth);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    emit_signal(r.recovered, out);
    if (!report.empty()) {
      Json j = afpr::io::to_json(r);
      if (truth) j["rel_error"] = afpr::af_distance(afpr::ambiguity_map(*truth), afpr::ambiguity_map(r.recovered));
      if (ir) j["init"] = afpr::io::to_json(*ir);
      j["support"] = afpr::io::to_json(support);
      j["config"] = {{"init", afpr::io::to_json(exp.init)}, {"pipeline", afpr::io::to_json(exp.pipeline)}};
      afpr::io::write_text(report, j.dump(2) + "\n");
    }
    if (!trace_path.empty()) {
      std::ostringstream s;
      afpr::io::write_trace_csv(s, r.final_stage().trace);
      afpr::io::write_text(trace_path, s.str());
    }
    return 0;
  }

  auto emit_batch = [&](const Json& j, const std::string& csv_name, const std::function<void(std::ostream&)>& csv) {
    if (out_dir.empty()) {
      emit_json(j, "");
      return;
    }
    std::ostringstream s;
    csv(s);
    afpr::io::write_text(std::filesystem::path(out_dir) / csv_name, s.str());
    emit_json(j, (std::filesystem::path(out_dir) / "summary.json").string());
  };

  if (*scen) {
    const auto s = afpr::run_scenario(exp);
    for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
    emit_batch(afpr::io::to_json(s), "trials.csv", [&](std::ostream& o) { afpr::io::write_trials_csv(o, s); });
    return 0;
  }

  if (*smap) {
    const auto d = parse_list(deltas);
    const auto r = parse_list(removals);
    const auto map = afpr::success_rate_map(exp, d, r);
    Json j = afpr::io::to_json(map);
    j["delta_grid_note"] = "perturbation sizes relative to the RMS amplitude of the true signal";
    j["config"] = afpr::io::to_json(exp);
    emit_batch(j, "success_map.csv", [&](std::ostream& o) { afpr::io::write_success_map_csv(o, map); });
    return 0;
  }

  if (*icmp) {
    const auto r = parse_list(removals);
    std::vector<std::optional<double>> snr_list;
    std::stringstream ss(snrs);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item == "inf") {
        snr_list.emplace_back(std::nullopt);
      } else {
        snr_list.emplace_back(parse_list(item).front());
      }
    }
    const auto rows = afpr::init_comparison(exp, r, snr_list);
    Json j;
    j["rows"] = afpr::io::to_json(rows);
    j["config"] = afpr::io::to_json(exp);
    emit_batch(j, "init_comparison.csv", [&](std::ostream& o) { afpr::io::write_init_comparison_csv(o, rows); });
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const afpr::InvalidArgument& e) {
    std::cerr << error_json("invalid_input", e.what(), 1) << "\n";
    return 1;
  } catch (const afpr::NumericalFailure& e) {
    std::cerr << error_json("numerical_failure", e.what(), 2) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << error_json("internal", e.what(), 2) << "\n";
    return 2;
  }
}
