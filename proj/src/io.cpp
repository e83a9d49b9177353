#include "afpr/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace afpr::io {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

double parse_double(const std::string& s, std::size_t line) {
  const std::string t = strip(s);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw FormatError("line " + std::to_string(line) + ": '" + t + "' is not a number");
  }
  return v;
}

long long parse_int(const std::string& s, std::size_t line) {
  const std::string t = strip(s);
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw FormatError("line " + std::to_string(line) + ": '" + t + "' is not an integer");
  }
  return v;
}

// Reads a CSV with the exact header and `cols` columns per row.
std::vector<std::vector<std::string>> read_rows(std::istream& in, const std::string& header, std::size_t cols) {
  std::string line;
  if (!std::getline(in, line) || strip(line) != header) {
    throw FormatError("expected CSV header '" + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  std::size_t no = 1;
  while (std::getline(in, line)) {
    ++no;
    if (strip(line).empty()) continue;
    auto f = split(strip(line));
    if (f.size() != cols) {
      throw FormatError("line " + std::to_string(no) + ": expected " + std::to_string(cols) + " fields");
    }
    rows.push_back(std::move(f));
  }
  return rows;
}

// Row-major p,k grid check; returns N.
std::size_t grid_size(const std::vector<std::vector<std::string>>& rows) {
  const auto count = rows.size();
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(count))));
  if (n < 2 || n * n != count) throw FormatError("matrix CSV must hold N*N rows with N >= 2");
  for (std::size_t i = 0; i < count; ++i) {
    const auto p = parse_int(rows[i][0], i + 2);
    const auto k = parse_int(rows[i][1], i + 2);
    if (p != static_cast<long long>(i / n) || k != static_cast<long long>(i % n)) {
      throw FormatError("line " + std::to_string(i + 2) + ": cells must be listed row-major from (0,0)");
    }
  }
  return n;
}

void check_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": expected a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) throw FormatError(where + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(where + "." + key + ": " + e.what());
  }
}

template <typename Enum, typename Parse>
void read_enum(const Json& j, const char* key, Enum& out, Parse parse, const std::string& where) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_string()) throw FormatError(where + "." + key + ": expected a string");
  out = parse(j.at(key).get<std::string>());
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

void write_signal_csv(std::ostream& out, const ComplexSignal& x) {
  out << "n,re,im\n";
  for (Eigen::Index i = 0; i < x.samples().size(); ++i) {
    out << i << ',' << num(x.samples()[i].real()) << ',' << num(x.samples()[i].imag()) << '\n';
  }
}

ComplexSignal read_signal_csv(std::istream& in) {
  const auto rows = read_rows(in, "n,re,im", 3);
  CVector x(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (parse_int(rows[i][0], i + 2) != static_cast<long long>(i)) {
      throw FormatError("line " + std::to_string(i + 2) + ": sample indices must run 0..N-1");
    }
    x[static_cast<Eigen::Index>(i)] = cplx(parse_double(rows[i][1], i + 2), parse_double(rows[i][2], i + 2));
  }
  return ComplexSignal(std::move(x));
}

void write_ambiguity_csv(std::ostream& out, const AmbiguityMap& A) {
  out << "p,k,value\n";
  const auto n = A.size();
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t k = 0; k < n; ++k) out << p << ',' << k << ',' << num(A(p, k)) << '\n';
  }
}

AmbiguityMap read_ambiguity_csv(std::istream& in) {
  const auto rows = read_rows(in, "p,k,value", 3);
  const auto n = grid_size(rows);
  RMatrix v(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < rows.size(); ++i) v.data()[i] = parse_double(rows[i][2], i + 2);
  return AmbiguityMap(std::move(v));
}

void write_inner_product_csv(std::ostream& out, const InnerProductMap& S) {
  out << "p,k,re,im\n";
  for (Eigen::Index p = 0; p < S.entries.rows(); ++p) {
    for (Eigen::Index k = 0; k < S.entries.cols(); ++k) {
      out << p << ',' << k << ',' << num(S.entries(p, k).real()) << ',' << num(S.entries(p, k).imag()) << '\n';
    }
  }
}

InnerProductMap read_inner_product_csv(std::istream& in) {
  const auto rows = read_rows(in, "p,k,re,im", 4);
  const auto n = static_cast<Eigen::Index>(grid_size(rows));
  CMatrix m(n, n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.data()[i] = cplx(parse_double(rows[i][2], i + 2), parse_double(rows[i][3], i + 2));
  }
  return {std::move(m)};
}

void write_mask_csv(std::ostream& out, const SamplingMask& mask) {
  out << "p,k,kept\n";
  const auto n = mask.size();
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t k = 0; k < n; ++k) out << p << ',' << k << ',' << (mask.kept(p, k) ? 1 : 0) << '\n';
  }
}

SamplingMask read_mask_csv(std::istream& in) {
  const auto rows = read_rows(in, "p,k,kept", 3);
  const auto n = static_cast<Eigen::Index>(grid_size(rows));
  BMatrix kept(n, n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto v = parse_int(rows[i][2], i + 2);
    if (v != 0 && v != 1) throw FormatError("line " + std::to_string(i + 2) + ": kept must be 0 or 1");
    kept.data()[i] = v == 1;
  }
  return SamplingMask(std::move(kept), MaskMode::exclude, MaskProvenance{MaskKind::custom, MaskParams{}});
}

void write_trace_csv(std::ostream& out, const SolverTrace& trace) {
  const bool truth = !trace.records.empty() && trace.records.front().dist_truth.has_value();
  out << "t,mu,grad_norm,objective" << (truth ? ",dist_truth" : "") << '\n';
  for (const auto& r : trace.records) {
    out << r.t << ',' << num(r.mu) << ',' << num(r.grad_norm) << ',' << num(r.objective);
    if (truth) out << ',' << num(r.dist_truth.value_or(std::numeric_limits<double>::quiet_NaN()));
    out << '\n';
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InvalidArgument("failed writing '" + path.string() + "'");
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

void write_sidecar(const std::filesystem::path& path, const std::string& kind, std::size_t n, Json extra) {
  Json j;
  j["kind"] = kind;
  j["n"] = n;
  for (auto& item : extra.items()) j[item.key()] = item.value();
  write_text(sidecar_path(path), j.dump(2) + "\n");
}

void check_sidecar(const std::filesystem::path& path, std::size_t n) {
  const auto side = sidecar_path(path);
  if (!std::filesystem::exists(side)) return;
  Json j;
  try {
    j = Json::parse(read_text(side));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(side.string() + ": " + e.what());
  }
  if (j.contains("n") && j.at("n") != n) {
    throw FormatError(path.string() + ": sidecar declares N = " + j.at("n").dump() + " but the file holds N = " +
                      std::to_string(n));
  }
}

ComplexSignal load_signal(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  try {
    ComplexSignal x = read_signal_csv(in);
    check_sidecar(path, x.size());
    return x;
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_signal(const std::filesystem::path& path, const ComplexSignal& x) {
  std::ostringstream out;
  write_signal_csv(out, x);
  write_text(path, out.str());
}

AmbiguityMap load_ambiguity(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  try {
    AmbiguityMap A = read_ambiguity_csv(in);
    check_sidecar(path, A.size());
    return A;
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_ambiguity(const std::filesystem::path& path, const AmbiguityMap& A, Json extra) {
  std::ostringstream out;
  write_ambiguity_csv(out, A);
  write_text(path, out.str());
  write_sidecar(path, "ambiguity_map", A.size(), std::move(extra));
}

SamplingMask load_mask(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  try {
    SamplingMask m = read_mask_csv(in);
    check_sidecar(path, m.size());
    return m;
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_mask(const std::filesystem::path& path, const SamplingMask& mask) {
  std::ostringstream out;
  write_mask_csv(out, mask);
  write_text(path, out.str());
  Json extra;
  extra["mask_kind"] = to_string(mask.provenance().kind);
  extra["kept_count"] = mask.kept_count();
  write_sidecar(path, "mask", mask.size(), extra);
}

Json to_json(const WaveformRecipe& r) {
  Json j;
  j["kind"] = to_string(r.kind);
  j["n_len"] = r.n_len;
  j["center_hz"] = r.center_hz;
  j["cutoff"] = r.cutoff;
  j["sample_rate_hz"] = r.sample_rate_hz;
  j["support"] = to_string(r.support);
  j["width"] = r.resolved_width();
  j["pulse_T"] = r.resolved_pulse_T();
  j["sweep_df"] = r.sweep_df;
  j["nlfm_L"] = r.nlfm_L;
  j["dt"] = r.dt;
  j["seed"] = r.seed;
  return j;
}

WaveformRecipe recipe_from_json(const Json& j, WaveformRecipe r) {
  const std::string w = "recipe";
  check_keys(j, {"kind", "n_len", "center_hz", "cutoff", "sample_rate_hz", "support", "width", "pulse_T", "sweep_df",
                 "nlfm_L", "dt", "seed"},
             w);
  read_enum(j, "kind", r.kind, waveform_kind_from_string, w);
  read(j, "n_len", r.n_len, w);
  read(j, "center_hz", r.center_hz, w);
  read(j, "cutoff", r.cutoff, w);
  read(j, "sample_rate_hz", r.sample_rate_hz, w);
  read_enum(j, "support", r.support, support_kind_from_string, w);
  read(j, "width", r.width, w);
  read(j, "pulse_T", r.pulse_T, w);
  read(j, "sweep_df", r.sweep_df, w);
  read(j, "nlfm_L", r.nlfm_L, w);
  read(j, "dt", r.dt, w);
  read(j, "seed", r.seed, w);
  return r;
}

Json to_json(const SupportSpec& s) {
  Json j;
  j["kind"] = to_string(s.kind);
  j["width"] = s.width;
  j["offset"] = s.offset;
  return j;
}

SupportSpec support_from_json(const Json& j, SupportSpec s) {
  const std::string w = "support";
  check_keys(j, {"kind", "width", "offset"}, w);
  read_enum(j, "kind", s.kind, support_kind_from_string, w);
  read(j, "width", s.width, w);
  read(j, "offset", s.offset, w);
  return s;
}

Json to_json(const MaskConfig& m) {
  Json j;
  j["kind"] = to_string(m.kind);
  j["keep_every"] = m.params.keep_every;
  j["frac_first"] = m.params.frac_first;
  j["frac_last"] = m.params.frac_last;
  j["centered"] = m.params.centered ? Json(*m.params.centered) : Json(nullptr);
  j["removed_fraction"] = m.removed_fraction >= 0.0 ? Json(m.removed_fraction) : Json(nullptr);
  return j;
}

MaskConfig mask_config_from_json(const Json& j, MaskConfig m) {
  const std::string w = "mask";
  check_keys(j, {"kind", "keep_every", "frac_first", "frac_last", "centered", "removed_fraction"}, w);
  read_enum(j, "kind", m.kind, mask_kind_from_string, w);
  read(j, "keep_every", m.params.keep_every, w);
  read(j, "frac_first", m.params.frac_first, w);
  read(j, "frac_last", m.params.frac_last, w);
  if (j.contains("centered")) {
    if (j.at("centered").is_null()) {
      m.params.centered.reset();
    } else {
      bool c = false;
      read(j, "centered", c, w);
      m.params.centered = c;
    }
  }
  if (j.contains("removed_fraction")) {
    m.removed_fraction = j.at("removed_fraction").is_null() ? -1.0 : 0.0;
    if (!j.at("removed_fraction").is_null()) read(j, "removed_fraction", m.removed_fraction, w);
  }
  return m;
}

Json to_json(const NoiseSpec& n) {
  Json j;
  j["snr_db"] = finite_or_null(n.snr_db);
  j["clamp_negative"] = n.clamp_negative;
  return j;
}

NoiseSpec noise_from_json(const Json& j, NoiseSpec n) {
  const std::string w = "noise";
  check_keys(j, {"snr_db", "clamp_negative", "seed"}, w);
  if (j.contains("snr_db")) {
    if (j.at("snr_db").is_null()) {
      n.snr_db = std::numeric_limits<double>::infinity();
    } else {
      read(j, "snr_db", n.snr_db, w);
    }
  }
  read(j, "clamp_negative", n.clamp_negative, w);
  read(j, "seed", n.seed, w);
  return n;
}

Json to_json(const InitConfig& c) {
  Json j;
  j["iters_T"] = c.iters_T;
  j["lambda"] = c.lambda;
  j["lambda_mode"] = to_string(c.lambda_mode);
  j["premise_margin"] = c.premise_margin;
  j["power_iters"] = c.power_iters;
  j["power_tol"] = c.power_tol;
  j["seed"] = c.seed;
  j["scale_mode"] = to_string(c.scale_mode);
  j["max_condition"] = c.max_condition;
  return j;
}

InitConfig init_config_from_json(const Json& j, InitConfig c) {
  const std::string w = "init";
  check_keys(j, {"iters_T", "lambda", "lambda_mode", "premise_margin", "power_iters", "power_tol", "seed", "scale_mode",
                 "max_condition"},
             w);
  read(j, "iters_T", c.iters_T, w);
  read(j, "lambda", c.lambda, w);
  read_enum(j, "lambda_mode", c.lambda_mode, lambda_mode_from_string, w);
  read(j, "premise_margin", c.premise_margin, w);
  read(j, "power_iters", c.power_iters, w);
  read(j, "power_tol", c.power_tol, w);
  read(j, "seed", c.seed, w);
  read_enum(j, "scale_mode", c.scale_mode, scale_mode_from_string, w);
  read(j, "max_condition", c.max_condition, w);
  return c;
}

Json to_json(const SolverConfig& c) {
  Json j;
  j["gamma1"] = c.gamma1;
  j["gamma"] = c.gamma;
  j["alpha"] = c.alpha;
  j["mu0"] = c.mu0;
  j["epsilon"] = c.epsilon;
  j["max_iters"] = c.max_iters;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["mask_mode"] = to_string(c.mask_mode);
  j["gradient_scaling"] = to_string(c.gradient_scaling);
  j["normalize_scale"] = c.normalize_scale;
  j["support"] = to_json(c.support);
  j["divergence_factor"] = c.divergence_factor;
  j["trace_every"] = c.trace_every;
  return j;
}

SolverConfig solver_config_from_json(const Json& j, SolverConfig c) {
  const std::string w = "solver";
  check_keys(j, {"gamma1", "gamma", "alpha", "mu0", "epsilon", "max_iters", "batch_size", "seed", "mask_mode",
                 "gradient_scaling", "normalize_scale", "support", "divergence_factor", "trace_every"},
             w);
  read(j, "gamma1", c.gamma1, w);
  read(j, "gamma", c.gamma, w);
  read(j, "alpha", c.alpha, w);
  read(j, "mu0", c.mu0, w);
  read(j, "epsilon", c.epsilon, w);
  read(j, "max_iters", c.max_iters, w);
  read(j, "batch_size", c.batch_size, w);
  read(j, "seed", c.seed, w);
  read_enum(j, "mask_mode", c.mask_mode, mask_mode_from_string, w);
  read_enum(j, "gradient_scaling", c.gradient_scaling, gradient_scaling_from_string, w);
  read(j, "normalize_scale", c.normalize_scale, w);
  if (j.contains("support")) c.support = support_from_json(j.at("support"), c.support);
  read(j, "divergence_factor", c.divergence_factor, w);
  read(j, "trace_every", c.trace_every, w);
  return c;
}

Json to_json(const PipelineConfig& c) {
  Json j;
  j["restarts"] = c.restarts;
  j["refine"] = c.refine;
  j["refine_mu0"] = c.refine_mu0;
  j["refine_iters"] = c.refine_iters;
  j["solver"] = to_json(c.solver);
  return j;
}

PipelineConfig pipeline_config_from_json(const Json& j, PipelineConfig c) {
  const std::string w = "pipeline";
  check_keys(j, {"restarts", "refine", "refine_mu0", "refine_iters", "solver"}, w);
  read(j, "restarts", c.restarts, w);
  read(j, "refine", c.refine, w);
  read(j, "refine_mu0", c.refine_mu0, w);
  read(j, "refine_iters", c.refine_iters, w);
  if (j.contains("solver")) c.solver = solver_config_from_json(j.at("solver"), c.solver);
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["recipe"] = to_json(c.recipe);
  j["mask"] = to_json(c.mask);
  j["noise"] = to_json(c.noise);
  j["init"] = to_json(c.init);
  j["pipeline"] = to_json(c.pipeline);
  j["trials"] = c.trials;
  j["success_threshold"] = c.success_threshold;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["spectrum_known"] = c.spectrum_known;
  j["deterministic"] = c.deterministic;
  return j;
}

ExperimentConfig experiment_config_from_json(const Json& j, ExperimentConfig c) {
  const std::string w = "config";
  check_keys(j, {"recipe", "mask", "noise", "init", "pipeline", "trials", "success_threshold", "seed", "threads",
                 "spectrum_known", "deterministic"},
             w);
  if (j.contains("recipe")) c.recipe = recipe_from_json(j.at("recipe"), c.recipe);
  if (j.contains("mask")) c.mask = mask_config_from_json(j.at("mask"), c.mask);
  if (j.contains("noise")) c.noise = noise_from_json(j.at("noise"), c.noise);
  if (j.contains("init")) c.init = init_config_from_json(j.at("init"), c.init);
  if (j.contains("pipeline")) c.pipeline = pipeline_config_from_json(j.at("pipeline"), c.pipeline);
  read(j, "trials", c.trials, w);
  read(j, "success_threshold", c.success_threshold, w);
  read(j, "seed", c.seed, w);
  read(j, "threads", c.threads, w);
  read(j, "spectrum_known", c.spectrum_known, w);
  read(j, "deterministic", c.deterministic, w);
  return c;
}

Json to_json(const IdentifiabilityReport& r) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  j["kept_count"] = r.kept_count;
  j["required_count"] = r.required_count;
  j["critical_indices"] = r.critical_indices;
  j["rows_preserved"] = r.rows_preserved;
  j["kept_delay_rows"] = r.kept_delay_rows;
  j["kept_doppler_columns"] = r.kept_doppler_columns;
  j["note"] = r.note;
  return j;
}

Json to_json(const PropertyReport& r) {
  Json j;
  j["p1_peak_at_origin"] = r.p1_peak_at_origin;
  j["p1_slack"] = finite_or_null(r.p1_slack);
  j["p3_point_symmetric"] = r.p3_point_symmetric;
  j["p3_deviation"] = r.p3_deviation;
  j["volume"] = r.volume;
  j["tolerance"] = r.tolerance;
  return j;
}

Json to_json(const InitResult& r) {
  Json j;
  j["beta"] = r.beta;
  j["beta_fourth_root"] = r.beta_fourth_root;
  j["x0_norm"] = r.x0.norm();
  j["x_init_norm"] = r.x_init.norm();
  Json its = Json::array();
  for (const auto& it : r.iterations) {
    Json e;
    e["t"] = it.t;
    e["lambda"] = it.lambda;
    e["sigma_min"] = it.sigma_min;
    e["sigma_max"] = it.sigma_max;
    e["condition"] = finite_or_null(it.condition);
    e["delta_fro"] = it.delta_fro;
    e["eigenvalue"] = it.eigenvalue;
    e["eigen_second"] = it.eigen_second;
    if (it.correlation_error) e["correlation_error"] = *it.correlation_error;
    its.push_back(e);
  }
  j["iterations"] = its;
  if (r.init_correlation_error) j["init_correlation_error"] = *r.init_correlation_error;
  if (r.final_correlation_error) j["final_correlation_error"] = *r.final_correlation_error;
  if (r.contraction_ratio) j["contraction_ratio"] = *r.contraction_ratio;
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const RecoveryResult& r) {
  Json j;
  j["stop_reason"] = to_string(r.stop_reason);
  j["iterations"] = r.iterations;
  j["final_mu"] = r.final_mu;
  j["scale"] = r.scale;
  j["initial_full_grad_norm"] = r.initial_full_grad_norm;
  j["final_full_grad_norm"] = r.final_full_grad_norm;
  j["af_distance_to_input"] = r.af_distance_to_input;
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const PipelineResult& r) {
  Json j;
  j["coarse"] = to_json(r.coarse);
  j["refined"] = r.refined ? to_json(*r.refined) : Json(nullptr);
  j["chosen_restart"] = r.chosen_restart;
  j["restart_fits"] = r.restart_fits;
  j["residue_classes"] = r.residue_classes;
  j["af_distance_to_input"] = r.final_stage().af_distance_to_input;
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const RecoveryReport& r) {
  Json j;
  j["trial"] = r.trial;
  j["seed"] = r.seeds.trial;
  j["ok"] = r.ok;
  j["rel_error"] = finite_or_null(r.rel_error);
  j["init_error"] = r.init_error;
  j["coarse_error"] = r.coarse_error;
  j["iterations"] = r.iterations;
  j["final_mu"] = r.final_mu;
  j["chosen_restart"] = r.chosen_restart;
  j["seconds"] = r.seconds;
  if (!r.ok) j["error"] = r.error;
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const ScenarioSummary& s) {
  Json j;
  j["median_rel_error"] = finite_or_null(s.median_rel_error);
  j["mean_rel_error"] = finite_or_null(s.mean_rel_error);
  j["failures"] = s.failures;
  j["success_rate"] = s.success_rate;
  j["trials"] = s.trials.size();
  j["identifiability"] = to_json(s.identifiability);
  j["warnings"] = s.warnings;
  Json per = Json::array();
  for (const auto& t : s.trials) per.push_back(to_json(t));
  j["per_trial"] = per;
  j["config"] = to_json(s.config);
  return j;
}

Json to_json(const SuccessMap& m) {
  Json j;
  j["deltas"] = m.deltas;
  j["removals"] = m.removals;
  j["rates"] = m.rates;
  j["trials"] = m.trials;
  return j;
}

Json to_json(const std::vector<InitComparisonRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json j;
    j["removal"] = r.removal;
    j["snr_db"] = r.snr_db ? Json(*r.snr_db) : Json(nullptr);
    j["mean_init_error"] = r.mean_init_error;
    j["mean_x0_error"] = r.mean_x0_error;
    j["trials"] = r.trials;
    j["failures"] = r.failures;
    arr.push_back(j);
  }
  return arr;
}

void write_trials_csv(std::ostream& out, const ScenarioSummary& s) {
  out << "trial,seed,ok,rel_error,init_error,coarse_error,iterations,final_mu,seconds,error\n";
  for (const auto& t : s.trials) {
    std::string err = t.error;
    for (auto& ch : err) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    out << t.trial << ',' << t.seeds.trial << ',' << (t.ok ? 1 : 0) << ',' << num(t.rel_error) << ','
        << num(t.init_error) << ',' << num(t.coarse_error) << ',' << t.iterations << ',' << num(t.final_mu) << ','
        << num(t.seconds) << ',' << err << '\n';
  }
}

void write_success_map_csv(std::ostream& out, const SuccessMap& m) {
  out << "removal,delta,rate\n";
  for (std::size_t r = 0; r < m.removals.size(); ++r) {
    for (std::size_t d = 0; d < m.deltas.size(); ++d) {
      out << num(m.removals[r]) << ',' << num(m.deltas[d]) << ',' << num(m.rates[r][d]) << '\n';
    }
  }
}

void write_init_comparison_csv(std::ostream& out, const std::vector<InitComparisonRow>& rows) {
  out << "removal,snr_db,mean_init_error,mean_x0_error,trials,failures\n";
  for (const auto& r : rows) {
    out << num(r.removal) << ',' << (r.snr_db ? num(*r.snr_db) : std::string("inf")) << ',' << num(r.mean_init_error)
        << ',' << num(r.mean_x0_error) << ',' << r.trials << ',' << r.failures << '\n';
  }
}

}  // namespace afpr::io
