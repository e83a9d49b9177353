#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "afpr/ambiguity.hpp"
#include "afpr/harness.hpp"
#include "afpr/initializer.hpp"
#include "afpr/sampling.hpp"
#include "afpr/signal.hpp"
#include "afpr/solver.hpp"

namespace afpr::io {

using Json = nlohmann::ordered_json;

/// Malformed input file or config.
class FormatError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// CSV formats. Numbers are written with 17 significant digits.
//   signal          n,re,im        one row per sample, n ascending
//   ambiguity map   p,k,value      row-major
//   inner product   p,k,re,im      row-major
//   mask            p,k,kept       kept in {0,1}
//   trace           t,mu,grad_norm,objective[,dist_truth]
void write_signal_csv(std::ostream& out, const ComplexSignal& x);
ComplexSignal read_signal_csv(std::istream& in);
void write_ambiguity_csv(std::ostream& out, const AmbiguityMap& A);
AmbiguityMap read_ambiguity_csv(std::istream& in);
void write_inner_product_csv(std::ostream& out, const InnerProductMap& S);
InnerProductMap read_inner_product_csv(std::istream& in);
void write_mask_csv(std::ostream& out, const SamplingMask& mask);
SamplingMask read_mask_csv(std::istream& in);
void write_trace_csv(std::ostream& out, const SolverTrace& trace);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// "<path>.json" next to a matrix file, carrying {"kind", "n", ...}.
std::filesystem::path sidecar_path(const std::filesystem::path& path);
void write_sidecar(const std::filesystem::path& path, const std::string& kind, std::size_t n, Json extra = Json::object());
/// Checks N against the sidecar when one exists.
void check_sidecar(const std::filesystem::path& path, std::size_t n);

// File helpers that also handle the sidecar.
ComplexSignal load_signal(const std::filesystem::path& path);
void save_signal(const std::filesystem::path& path, const ComplexSignal& x);
AmbiguityMap load_ambiguity(const std::filesystem::path& path);
void save_ambiguity(const std::filesystem::path& path, const AmbiguityMap& A, Json extra = Json::object());
SamplingMask load_mask(const std::filesystem::path& path);
void save_mask(const std::filesystem::path& path, const SamplingMask& mask);

// JSON. to_json materializes every field; the readers start from `base` and
// override the keys present, rejecting unknown keys.
Json to_json(const WaveformRecipe& r);
WaveformRecipe recipe_from_json(const Json& j, WaveformRecipe base = {});
Json to_json(const SupportSpec& s);
SupportSpec support_from_json(const Json& j, SupportSpec base = {});
Json to_json(const MaskConfig& m);
MaskConfig mask_config_from_json(const Json& j, MaskConfig base = {});
Json to_json(const NoiseSpec& n);  // snr_db null means noiseless
NoiseSpec noise_from_json(const Json& j, NoiseSpec base = {});
Json to_json(const InitConfig& c);
InitConfig init_config_from_json(const Json& j, InitConfig base = {});
Json to_json(const SolverConfig& c);  // the step schedule hook is not serialized
SolverConfig solver_config_from_json(const Json& j, SolverConfig base = {});
Json to_json(const PipelineConfig& c);
PipelineConfig pipeline_config_from_json(const Json& j, PipelineConfig base = {});
Json to_json(const ExperimentConfig& c);
ExperimentConfig experiment_config_from_json(const Json& j, ExperimentConfig base = {});

Json to_json(const IdentifiabilityReport& r);
Json to_json(const PropertyReport& r);
Json to_json(const InitResult& r);  // scalars and per-iteration diagnostics
Json to_json(const RecoveryResult& r);  // summary without the trace
Json to_json(const PipelineResult& r);
Json to_json(const RecoveryReport& r);
Json to_json(const ScenarioSummary& s);
Json to_json(const SuccessMap& m);
Json to_json(const std::vector<InitComparisonRow>& rows);

/// Per-trial CSV: trial,seed,ok,rel_error,init_error,coarse_error,iterations,final_mu,seconds,error
void write_trials_csv(std::ostream& out, const ScenarioSummary& s);
/// removal,delta,rate
void write_success_map_csv(std::ostream& out, const SuccessMap& m);
/// removal,snr_db,mean_init_error,mean_x0_error,trials,failures
void write_init_comparison_csv(std::ostream& out, const std::vector<InitComparisonRow>& rows);

}  // namespace afpr::io
