#include "afpr/solver.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "afpr/fft.hpp"
#include "afpr/random.hpp"

namespace afpr {

namespace {

// Twiddle table e^{-2 pi i m / N}, m = 0..N-1.
std::vector<cplx> twiddles(std::size_t n) {
  std::vector<cplx> w(n);
  for (std::size_t m = 0; m < n; ++m) {
    w[m] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n));
  }
  return w;
}

// Residual factor r = S (1 - sqrt(A) / phi_mu(|S|)); false when the term is undefined (mu = 0, S = 0).
bool residual(cplx s, double sqrt_a, double mu, cplx& r) {
  const double phi = std::sqrt(std::norm(s) + mu * mu);
  if (!(phi > 0.0)) return false;
  r = s * (1.0 - sqrt_a / phi);
  return true;
}

}  // namespace

std::vector<Cell> Measurements::active_cells() const {
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(active.count()));
  for (Eigen::Index p = 0; p < active.rows(); ++p) {
    for (Eigen::Index k = 0; k < active.cols(); ++k) {
      if (active(p, k)) cells.push_back({static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(k)});
    }
  }
  return cells;
}

Measurements make_measurements(const AmbiguityMap& A, const SamplingMask& mask) {
  if (A.size() != mask.size()) throw InvalidArgument("make_measurements: size mismatch");
  RMatrix root = A.sqrt_amplitude();
  for (Eigen::Index p = 0; p < root.rows(); ++p) {
    for (Eigen::Index k = 0; k < root.cols(); ++k) {
      if (!mask.kept()(p, k)) root(p, k) = 0.0;
    }
  }
  return {std::move(root), mask.active_cells()};
}

Measurements make_measurements(const AmbiguityMap& A) {
  return make_measurements(A, SamplingMask::full(A.size()));
}

double smoothed_objective(const CVector& z, const Measurements& m, double mu) {
  if (mu < 0) throw InvalidArgument("smoothed_objective: mu must be non-negative");
  const auto n = m.size();
  if (static_cast<std::size_t>(z.size()) != n) throw InvalidArgument("smoothed_objective: size mismatch");
  const CMatrix s = inner_product_map(ComplexSignal(z)).entries;
  double total = 0.0;
  for (Eigen::Index p = 0; p < s.rows(); ++p) {
    for (Eigen::Index k = 0; k < s.cols(); ++k) {
      if (!m.active(p, k)) continue;
      const double r = std::sqrt(std::norm(s(p, k)) + mu * mu) - m.sqrt_amplitude(p, k);
      total += r * r;
    }
  }
  return total / static_cast<double>(n * n);
}

double smoothed_objective(const ComplexSignal& z, const Measurements& m, double mu) {
  return smoothed_objective(z.samples(), m, mu);
}

CVector wirtinger_gradient(const CVector& z, const Measurements& m, double mu, std::size_t* skipped) {
  if (mu < 0) throw InvalidArgument("wirtinger_gradient: mu must be non-negative");
  const auto n = m.size();
  const auto len = static_cast<Eigen::Index>(n);
  if (z.size() != len) throw InvalidArgument("wirtinger_gradient: size mismatch");
  const CMatrix s = inner_product_map(ComplexSignal(z)).entries;

  // grad[l] = (1/N^2) sum_p [ z[l-p] sum_k R[p,k] e^{+2 pi i l k/N}
  //                          + z[l+p] sum_k conj(R[p,k]) e^{-2 pi i (l+p) k/N} ]
  CVector grad = CVector::Zero(len);
  std::vector<cplx> r(n), rc(n), plus(n), minus(n);
  std::size_t skip = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const auto pi = static_cast<Eigen::Index>(p);
    for (std::size_t k = 0; k < n; ++k) {
      const auto ki = static_cast<Eigen::Index>(k);
      cplx rv = 0.0;
      if (m.active(pi, ki) && !residual(s(pi, ki), m.sqrt_amplitude(pi, ki), mu, rv)) {
        ++skip;
        rv = 0.0;
      }
      if (!m.active(pi, ki)) rv = 0.0;
      r[k] = rv;
      rc[k] = std::conj(rv);
    }
    fft::backward(r, plus);
    fft::forward(rc, minus);
    for (std::size_t l = 0; l < n; ++l) {
      const auto lm = wrap_index(static_cast<std::int64_t>(l) - static_cast<std::int64_t>(p), n);
      const auto lp = (l + p) % n;
      grad[static_cast<Eigen::Index>(l)] += z[static_cast<Eigen::Index>(lm)] * plus[l] +
                                            z[static_cast<Eigen::Index>(lp)] * minus[lp];
    }
  }
  if (skipped) *skipped = skip;
  return grad / static_cast<double>(n * n);
}

ComplexSignal wirtinger_gradient(const ComplexSignal& z, const Measurements& m, double mu) {
  return ComplexSignal(wirtinger_gradient(z.samples(), m, mu));
}

namespace {

void accumulate_minibatch(const CVector& z, const Measurements& m, double mu, std::span<const Cell> batch,
                          const std::vector<cplx>& tw, CVector& grad) {
  const auto n = m.size();
  const cplx* zp = z.data();
  cplx* g = grad.data();
  for (const Cell& c : batch) {
    const std::size_t p = c.p;
    const std::size_t k = c.k;
    // S[p,k] = sum_n z[n] conj(z[n-p]) w^{nk}
    cplx s = 0.0;
    std::size_t idx = 0;
    std::size_t lag = (n - p) % n;
    for (std::size_t i = 0; i < n; ++i) {
      s += zp[i] * std::conj(zp[lag]) * tw[idx];
      idx += k;
      if (idx >= n) idx -= n;
      if (++lag == n) lag = 0;
    }
    cplx r;
    if (!residual(s, m.sqrt_amplitude(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k)), mu, r)) continue;
    const cplx rc = std::conj(r);
    // g[l] += r z[l-p] conj(w^{lk}) + conj(r) z[l+p] w^{(l+p)k}
    std::size_t il = 0;
    std::size_t ilp = (p * k) % n;
    std::size_t back = (n - p) % n;
    std::size_t fwd = p % n;
    for (std::size_t l = 0; l < n; ++l) {
      g[l] += r * zp[back] * std::conj(tw[il]) + rc * zp[fwd] * tw[ilp];
      il += k;
      if (il >= n) il -= n;
      ilp += k;
      if (ilp >= n) ilp -= n;
      if (++back == n) back = 0;
      if (++fwd == n) fwd = 0;
    }
  }
}

}  // namespace

CVector minibatch_gradient(const CVector& z, const Measurements& m, double mu, std::span<const Cell> batch) {
  if (batch.empty()) throw InvalidArgument("minibatch_gradient: empty batch");
  const auto n = m.size();
  if (static_cast<std::size_t>(z.size()) != n) throw InvalidArgument("minibatch_gradient: size mismatch");
  for (const Cell& c : batch) {
    if (c.p >= n || c.k >= n) throw InvalidArgument("minibatch_gradient: cell out of range");
  }
  CVector grad = CVector::Zero(static_cast<Eigen::Index>(n));
  accumulate_minibatch(z, m, mu, batch, twiddles(n), grad);
  return grad;
}

ComplexSignal minibatch_gradient(const ComplexSignal& z, const Measurements& m, double mu, std::span<const Cell> batch) {
  return ComplexSignal(minibatch_gradient(z.samples(), m, mu, batch));
}

void SolverConfig::validate(std::size_t n) const {
  auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!open_unit(gamma1) || !open_unit(gamma)) throw InvalidArgument("SolverConfig: gamma1 and gamma must lie in (0,1)");
  if (!(alpha > 0.0)) throw InvalidArgument("SolverConfig: alpha must be positive");
  if (!(mu0 > 0.0)) throw InvalidArgument("SolverConfig: mu0 must be positive");
  if (!(epsilon > 0.0)) throw InvalidArgument("SolverConfig: epsilon must be positive");
  if (max_iters == 0) throw InvalidArgument("SolverConfig: max_iters must be positive");
  if (batch_size > n * n) throw InvalidArgument("SolverConfig: batch size exceeds N^2");
  if (!(divergence_factor > 1.0)) throw InvalidArgument("SolverConfig: divergence_factor must exceed 1");
  if (trace_every == 0) throw InvalidArgument("SolverConfig: trace_every must be positive");
  support.validate(n);
}

RecoveryResult run_recovery(const AmbiguityMap& A, const SamplingMask& mask, const ComplexSignal& x0,
                            const SolverConfig& config, const std::optional<ComplexSignal>& truth) {
  const auto n = A.size();
  if (mask.size() != n || x0.size() != n) throw InvalidArgument("run_recovery: size mismatch");
  if (truth && truth->size() != n) throw InvalidArgument("run_recovery: truth size mismatch");
  config.validate(n);

  const SamplingMask solve_mask = mask.with_mode(config.mask_mode);
  Measurements meas = make_measurements(A, solve_mask);
  const std::vector<Cell> cells = meas.active_cells();
  const std::size_t q = std::min(config.batch_size == 0 ? n : config.batch_size, cells.size());

  double scale = 1.0;
  if (config.normalize_scale) {
    const double a00 = A(0, 0);
    scale = mask.kept(0, 0) && a00 > 0.0 ? std::pow(a00, 0.25) : x0.norm();
    if (!(scale > 0.0) || !std::isfinite(scale)) throw NumericalFailure("run_recovery: cannot determine signal scale");
    meas.sqrt_amplitude /= scale * scale;
  }

  CVector x = project_support(x0.samples() / scale, config.support);
  const std::optional<AmbiguityMap> truth_af = truth ? std::optional(ambiguity_map(*truth)) : std::nullopt;

  RecoveryResult result{ComplexSignal(x0), {}, StopReason::max_iterations, 0, config.mu0, scale, 0, 0, 0, {}};
  result.initial_full_grad_norm = project_support(wirtinger_gradient(x, meas, config.mu0), config.support).norm();

  const auto tw = twiddles(n);
  Rng rng(config.seed);
  std::vector<Cell> pool = cells;
  CVector d(static_cast<Eigen::Index>(n));
  double mu = config.mu0;
  std::optional<double> baseline;

  std::size_t t = 0;
  for (; t <= config.max_iters; ++t) {
    // Partial Fisher-Yates: the first q entries of pool become a uniform sample without replacement.
    for (std::size_t i = 0; i < q; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
    d.setZero();
    accumulate_minibatch(x, meas, mu, std::span<const Cell>(pool.data(), q), tw, d);
    if (config.gradient_scaling == GradientScaling::mean) d /= static_cast<double>(q);
    if (config.support.kind != SupportKind::none) d = project_support(d, config.support);
    const double dn = d.norm();
    result.trace.mu_history.push_back(mu);
    if (!std::isfinite(dn)) throw NumericalFailure("run_recovery: non-finite gradient at iteration " + std::to_string(t));
    if (dn < config.epsilon) {
      result.stop_reason = StopReason::gradient_tolerance;
      break;
    }

    const double step = config.step_schedule ? config.step_schedule(t, config.alpha) : config.alpha;
    x -= (step * mu / dn) * d;
    const double next_mu = dn >= config.gamma * mu ? mu : config.gamma1 * mu;

    if (t % config.trace_every == 0 || t == config.max_iters) {
      TraceRecord rec{t, mu, dn, smoothed_objective(x, meas, next_mu), std::nullopt};
      if (!std::isfinite(rec.objective)) throw NumericalFailure("run_recovery: objective became non-finite");
      // The first Cauchy step has a fixed length alpha*mu0 regardless of the
      // gradient, so the divergence baseline is taken after it.
      if (!baseline) {
        baseline = rec.objective;
      } else if (rec.objective > config.divergence_factor * *baseline && *baseline > 0.0) {
        throw NumericalFailure("run_recovery: diverged at iteration " + std::to_string(t) + " (objective " +
                               std::to_string(rec.objective) + " exceeds " + std::to_string(config.divergence_factor) +
                               "x baseline " + std::to_string(*baseline) + ")");
      }
      if (truth_af) rec.dist_truth = af_distance(*truth_af, ambiguity_map(ComplexSignal(CVector(x * scale))));
      result.trace.records.push_back(rec);
    }
    mu = next_mu;
  }

  result.iterations = std::min(t, config.max_iters + 1);
  result.final_mu = mu;
  result.final_full_grad_norm = project_support(wirtinger_gradient(x, meas, mu), config.support).norm();
  result.recovered = ComplexSignal(CVector(x * scale));
  const BMatrix scored = solve_mask.active_cells();
  result.af_distance_to_input = af_distance(apply_mask(A, mask.with_mode(MaskMode::zero_fill)),
                                            ambiguity_map(result.recovered), scored);
  return result;
}

std::size_t delay_residue_classes(const SamplingMask& mask) {
  const auto n = mask.size();
  std::size_t d = n;
  for (std::size_t p = 0; p < n; ++p) {
    if (mask.kept().row(static_cast<Eigen::Index>(p)).any()) d = std::gcd(d, p);
  }
  return d == 0 ? 1 : d;
}

namespace {

// Unit-modulus u (u[0] = 1) minimizing u^H M u, by cyclic coordinate descent.
std::vector<cplx> residue_phases(const Eigen::MatrixXcd& M) {
  const auto d = M.rows();
  std::vector<cplx> u(static_cast<std::size_t>(d), 1.0);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double change = 0.0;
    for (Eigen::Index r = 1; r < d; ++r) {
      cplx c = 0.0;
      for (Eigen::Index q = 0; q < d; ++q) {
        if (q != r) c += M(r, q) * u[static_cast<std::size_t>(q)];
      }
      if (std::abs(c) == 0.0) continue;
      const cplx next = -c / std::abs(c);
      change = std::max(change, std::abs(next - u[static_cast<std::size_t>(r)]));
      u[static_cast<std::size_t>(r)] = next;
    }
    if (change < 1e-12) break;
  }
  return u;
}

}  // namespace

CVector align_to_support(const CVector& z, const SupportSpec& spec, std::size_t residues) {
  if (spec.kind == SupportKind::none) return z;
  const auto n = static_cast<std::size_t>(z.size());
  spec.validate(n);
  if (residues == 0 || n % residues != 0) throw InvalidArgument("align_to_support: residues must divide N");
  const bool band = spec.kind == SupportKind::band_limited;
  const std::size_t d = band ? residues : 1;

  CVector best = z;
  double best_out = std::numeric_limits<double>::infinity();
  std::vector<CVector> parts(d);
  for (const bool reflect : {false, true}) {
    CVector y(z.size());
    for (std::size_t i = 0; i < n; ++i) y[static_cast<Eigen::Index>(i)] = z[static_cast<Eigen::Index>(reflect ? (n - i) % n : i)];
    for (std::size_t r = 0; r < d; ++r) {
      CVector part = CVector::Zero(z.size());
      for (std::size_t i = r; i < n; i += d) part[static_cast<Eigen::Index>(i)] = y[static_cast<Eigen::Index>(i)];
      parts[r] = band ? fft::forward(part) : part;
    }
    // Modulation by b (or a shift by b) moves domain index i to i + b.
    for (std::size_t b = 0; b < n; ++b) {
      Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t moved = (i + b) % n;
        if (wrap_index(static_cast<std::int64_t>(moved) - static_cast<std::int64_t>(spec.offset), n) < spec.width) continue;
        for (std::size_t r = 0; r < d; ++r) {
          for (std::size_t q = 0; q < d; ++q) {
            M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)) +=
                std::conj(parts[r][static_cast<Eigen::Index>(i)]) * parts[q][static_cast<Eigen::Index>(i)];
          }
        }
      }
      const std::vector<cplx> u = d > 1 ? residue_phases(M) : std::vector<cplx>{1.0};
      double out = 0.0;
      for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t q = 0; q < d; ++q) {
          out += (std::conj(u[r]) * M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)) * u[q]).real();
        }
      }
      if (out < best_out) {
        best_out = out;
        CVector cand(z.size());
        for (std::size_t i = 0; i < n; ++i) {
          const auto ii = static_cast<Eigen::Index>(i);
          if (band) {
            const cplx mod = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>((b * i) % n) / static_cast<double>(n));
            cand[ii] = u[i % d] * y[ii] * mod;
          } else {
            cand[static_cast<Eigen::Index>((i + b) % n)] = y[ii];
          }
        }
        best = std::move(cand);
      }
    }
  }
  return best;
}

void PipelineConfig::validate(std::size_t n) const {
  solver.validate(n);
  if (restarts == 0) throw InvalidArgument("PipelineConfig: restarts must be at least 1");
  if (!(refine_mu0 > 0.0)) throw InvalidArgument("PipelineConfig: refine_mu0 must be positive");
  if (refine && refine_iters == 0) throw InvalidArgument("PipelineConfig: refine_iters must be positive");
}

PipelineResult recover_signal(const AmbiguityMap& A, const SamplingMask& mask, const ComplexSignal& x0,
                              const SupportSpec& support, const PipelineConfig& config,
                              const std::optional<ComplexSignal>& truth) {
  const auto n = A.size();
  config.validate(n);
  support.validate(n);

  SolverConfig coarse_cfg = config.solver;
  coarse_cfg.support = SupportSpec{};
  std::optional<RecoveryResult> best;
  std::vector<double> fits;
  std::size_t chosen = 0;
  for (std::size_t r = 0; r < config.restarts; ++r) {
    SolverConfig cfg = coarse_cfg;
    cfg.seed = r == 0 ? config.solver.seed : derive_seed(config.solver.seed, r);
    RecoveryResult run = run_recovery(A, mask, x0, cfg, truth);
    fits.push_back(run.af_distance_to_input);
    if (!best || run.af_distance_to_input < best->af_distance_to_input) {
      best = std::move(run);
      chosen = r;
    }
  }

  PipelineResult out{best->recovered, std::move(*best), std::nullopt, chosen, std::move(fits),
                     delay_residue_classes(mask), {}};
  if (support.kind == SupportKind::none || !config.refine) return out;

  if (support.kind == SupportKind::time_limited && out.residue_classes > 1) {
    out.warnings.push_back("kept delays share a common factor " + std::to_string(out.residue_classes) +
                           "; phases of the interleaved subsequences are not determined by a time-limited support");
  }
  const CVector aligned = project_support(align_to_support(out.coarse.recovered.samples(), support, out.residue_classes),
                                          support);
  if (!(aligned.norm() > 0.0)) {
    out.warnings.push_back("coarse estimate has no energy inside the support; refinement skipped");
    return out;
  }
  SolverConfig fine_cfg = config.solver;
  fine_cfg.support = support;
  fine_cfg.mu0 = config.refine_mu0;
  fine_cfg.max_iters = config.refine_iters;
  fine_cfg.seed = derive_seed(config.solver.seed, 0x5eed);
  out.refined = run_recovery(A, mask, ComplexSignal(aligned), fine_cfg, truth);
  out.recovered = out.refined->recovered;
  return out;
}

std::string to_string(StopReason r) {
  return r == StopReason::gradient_tolerance ? "gradient_tolerance" : "max_iterations";
}

std::string to_string(GradientScaling g) { return g == GradientScaling::sum ? "sum" : "mean"; }

GradientScaling gradient_scaling_from_string(const std::string& s) {
  if (s == "mean") return GradientScaling::mean;
  if (s == "sum") return GradientScaling::sum;
  throw InvalidArgument("unknown gradient scaling '" + s + "'");
}

}  // namespace afpr
