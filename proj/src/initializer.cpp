#include "afpr/initializer.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "afpr/fft.hpp"
#include "afpr/random.hpp"

namespace afpr {

void InitConfig::validate() const {
  if (iters_T < 1) throw InvalidArgument("InitConfig: iters_T must be at least 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("InitConfig: lambda must be positive");
  if (!(premise_margin > 1.0)) throw InvalidArgument("InitConfig: premise_margin must exceed 1");
  if (power_iters < 1) throw InvalidArgument("InitConfig: power_iters must be positive");
  if (!(power_tol > 0.0)) throw InvalidArgument("InitConfig: power_tol must be positive");
  if (!(max_condition > 1.0)) throw InvalidArgument("InitConfig: max_condition must exceed 1");
}

RVector seed_magnitude(const AmbiguityMap& A, const std::optional<SamplingMask>& mask) {
  const auto n = static_cast<Eigen::Index>(A.size());
  if (!mask) return A.values().rowwise().sum() / static_cast<double>(n);
  if (mask->size() != A.size()) throw InvalidArgument("seed_magnitude: mask size mismatch");
  RVector v = RVector::Zero(n);
  std::vector<Eigen::Index> rows;
  for (Eigen::Index p = 0; p < n; ++p) {
    if (!mask->kept().row(p).any()) continue;
    rows.push_back(p);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (mask->kept()(p, k)) v[p] += A.values()(p, k);
    }
    v[p] /= static_cast<double>(n);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Eigen::Index lo = rows[i];
    const Eigen::Index hi = i + 1 < rows.size() ? rows[i + 1] : rows[0] + n;
    for (Eigen::Index p = lo + 1; p < hi; ++p) {
      const double f = static_cast<double>(p - lo) / static_cast<double>(hi - lo);
      v[p % n] = (1.0 - f) * v[lo] + f * v[hi % n];
    }
  }
  return v;
}

ComplexSignal seed_vector(const AmbiguityMap& A, std::uint64_t seed, const std::optional<SamplingMask>& mask) {
  const RVector v = seed_magnitude(A, mask);
  Rng rng(seed);
  CVector x(v.size());
  for (Eigen::Index p = 0; p < v.size(); ++p) x[p] = std::polar(1.0, rng.phase()) * v[p];
  return ComplexSignal(std::move(x));
}

namespace {

// c[m] = conj(w[m]) w[m + l]; G_l[p,n] = c[n - p].
CVector band_kernel(const CVector& w, std::int64_t ell) {
  const auto n = static_cast<std::size_t>(w.size());
  CVector c(w.size());
  for (std::size_t m = 0; m < n; ++m) {
    c[static_cast<Eigen::Index>(m)] =
        std::conj(w[static_cast<Eigen::Index>(m)]) *
        w[static_cast<Eigen::Index>(wrap_index(static_cast<std::int64_t>(m) + ell, n))];
  }
  return c;
}

CMatrix assemble(const CMatrix& bands) {
  const auto n = bands.rows();
  CMatrix X(n, n);
  for (Eigen::Index ell = 0; ell < n; ++ell) {
    for (Eigen::Index j = 0; j < n; ++j) X(j, (j + ell) % n) = bands(ell, j);
  }
  return X;
}

CVector random_unit(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(rng.normal(), rng.normal());
  return v / v.norm();
}

struct PowerRun {
  CVector v;
  double rho = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

PowerRun power_iterate(const CMatrix& H, CVector v, std::size_t iters, double tol) {
  PowerRun run;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t it = 1; it <= iters; ++it) {
    CVector u = H * v;
    const double rho = v.dot(u).real();
    const double un = u.norm();
    run.iterations = it;
    run.rho = rho;
    if (!(un > 0.0)) {
      run.converged = true;
      break;
    }
    v = u / un;
    if (std::abs(rho - prev) <= tol * std::max(std::abs(rho), std::numeric_limits<double>::min())) {
      run.converged = true;
      break;
    }
    prev = rho;
  }
  run.v = std::move(v);
  run.rho = run.v.dot(H * run.v).real();
  return run;
}

}  // namespace

CMatrix build_G(const CVector& w, std::int64_t ell) {
  if (!(w.norm() > 0.0)) throw InvalidArgument("build_G: w must be nonzero");
  const CVector c = band_kernel(w, ell);
  const auto n = w.size();
  CMatrix G(n, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index k = 0; k < n; ++k) G(p, k) = c[(k - p + n) % n];
  }
  return G;
}

CVector circulant_symbol(const CVector& w, std::int64_t ell) {
  // (G x)[p] = sum_m c[m] x[p + m], so its DFT is (sum_m c[m] e^{+2 pi i m k / N}) X[k].
  const CVector c = band_kernel(w, ell);
  CVector s(c.size());
  fft::backward(std::span<const cplx>(c.data(), static_cast<std::size_t>(c.size())),
                std::span<cplx>(s.data(), static_cast<std::size_t>(s.size())));
  return s;
}

CVector prox_ls_update(const CMatrix& G, const CVector& y, const CVector& x_prev, double lambda, double* condition) {
  if (!(lambda > 0.0)) throw InvalidArgument("prox_ls_update: lambda must be positive");
  const auto n = G.cols();
  if (G.rows() != y.size() || x_prev.size() != n) throw InvalidArgument("prox_ls_update: size mismatch");
  const double r = 1.0 / (2.0 * lambda);
  Eigen::MatrixXcd B = G.adjoint() * G;
  B.diagonal().array() += r;
  const CVector e = G.adjoint() * y + r * x_prev;
  if (condition) {
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(B, Eigen::EigenvaluesOnly).eigenvalues();
    *condition = ev.maxCoeff() / ev.minCoeff();
  }
  Eigen::LLT<Eigen::MatrixXcd> llt(B);
  if (llt.info() != Eigen::Success) throw NumericalFailure("prox_ls_update: normal matrix is not positive definite");
  return llt.solve(e);
}

CVector prox_ls_update_circulant(const CVector& symbol, const CVector& y, const CVector& x_prev, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("prox_ls_update_circulant: lambda must be positive");
  if (y.size() != symbol.size() || x_prev.size() != symbol.size()) {
    throw InvalidArgument("prox_ls_update_circulant: size mismatch");
  }
  const double r = 1.0 / (2.0 * lambda);
  const CVector fy = fft::forward(y);
  const CVector fx = fft::forward(x_prev);
  CVector sol(symbol.size());
  for (Eigen::Index k = 0; k < symbol.size(); ++k) {
    sol[k] = (std::conj(symbol[k]) * fy[k] + r * fx[k]) / (std::norm(symbol[k]) + r);
  }
  return fft::inverse(sol);
}

EigenResult leading_eigenvector(const CMatrix& X, std::size_t iters, double tol, std::uint64_t seed) {
  if (X.rows() != X.cols() || X.rows() < 1) throw InvalidArgument("leading_eigenvector: matrix must be square");
  if (iters < 1 || !(tol > 0.0)) throw InvalidArgument("leading_eigenvector: iters and tol must be positive");
  const auto n = X.rows();
  CMatrix H = (X + X.adjoint()) / 2.0;

  PowerRun run = power_iterate(H, random_unit(n, seed), iters, tol);
  // ||H v|| estimates the spectral radius even when the run oscillates between
  // eigenvalues of opposite sign and equal magnitude, so H + radius I is
  // (nearly) PSD.
  const double radius = std::max(std::abs(run.rho), (H * run.v).norm());
  double shift = 0.0;
  if (!run.converged || run.rho < 0.0) {
    // The largest-magnitude eigenvalue is negative or ties with one of the
    // other sign; shift so the largest algebraic one dominates.
    shift = radius;
    H.diagonal().array() += shift;
    run = power_iterate(H, random_unit(n, derive_seed(seed, 1)), iters, tol);
  }

  EigenResult out;
  out.iterations = run.iterations;
  out.eigenvalue = run.rho - shift;
  out.vector = run.v;

  // Next algebraic eigenvalue: deflate the PSD-shifted matrix.
  CMatrix D = H;
  D.diagonal().array() += radius - shift;
  D -= (out.eigenvalue + radius) * run.v * run.v.adjoint();
  const PowerRun next = power_iterate(D, random_unit(n, derive_seed(seed, 2)), 500, 1e-9);
  out.second = next.rho - radius;
  out.degenerate = !(radius > 0.0) || out.second >= out.eigenvalue - 1e-8 * radius;

  if (!run.converged) {
    throw NumericalFailure("leading_eigenvector: no convergence after " + std::to_string(iters) +
                           " iterations (rayleigh quotient " + std::to_string(out.eigenvalue) +
                           ", next eigenvalue estimate " + std::to_string(out.second) + ")");
  }
  return out;
}

double correlation_error(const ComplexSignal& x, const ComplexSignal& y) {
  const auto n = x.size();
  if (y.size() != n) throw InvalidArgument("correlation_error: size mismatch");
  // <x, M_b S_a y> for all b at once is a DFT of conj(x[m]) y[m - a].
  double best = -1.0;
  bool best_reflect = false;
  std::size_t best_a = 0, best_b = 0;
  std::vector<cplx> u(n), out(n);
  for (const bool reflect : {false, true}) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t m = 0; m < n; ++m) {
        const auto idx = static_cast<std::int64_t>(m) - static_cast<std::int64_t>(a);
        u[m] = std::conj(x.samples()[static_cast<Eigen::Index>(m)]) * (reflect ? y[-idx] : y[idx]);
      }
      fft::backward(u, out);
      for (std::size_t b = 0; b < n; ++b) {
        if (std::norm(out[b]) > best) {
          best = std::norm(out[b]);
          best_reflect = reflect;
          best_a = a;
          best_b = b;
        }
      }
    }
  }
  // Evaluate the winner directly; the expanded form ex^2 + ey^2 - 2|<x,z>|^2
  // cancels badly near zero.
  CVector z(static_cast<Eigen::Index>(n));
  for (std::size_t m = 0; m < n; ++m) {
    const auto idx = static_cast<std::int64_t>(m) - static_cast<std::int64_t>(best_a);
    const double ang = 2.0 * std::numbers::pi * static_cast<double>((best_b * m) % n) / static_cast<double>(n);
    z[static_cast<Eigen::Index>(m)] = std::polar(1.0, ang) * (best_reflect ? y[-idx] : y[idx]);
  }
  const CVector& xs = x.samples();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    for (Eigen::Index j = 0; j < xs.size(); ++j) sum += std::norm(xs[i] * std::conj(xs[j]) - z[i] * std::conj(z[j]));
  }
  return std::sqrt(sum);
}

InitResult run_initialization(const AmbiguityMap& A, const InitConfig& config, const std::optional<SamplingMask>& mask,
                              const std::optional<ComplexSignal>& truth) {
  config.validate();
  const auto n = A.size();
  const auto len = static_cast<Eigen::Index>(n);
  if (mask && mask->size() != n) throw InvalidArgument("run_initialization: mask size mismatch");
  if (truth && truth->size() != n) throw InvalidArgument("run_initialization: truth size mismatch");

  const bool masked = mask && mask->kept_count() < n * n;
  const AmbiguityMap data = masked ? apply_mask(A, mask->with_mode(MaskMode::zero_fill)) : A;
  const CMatrix Y = transformed_data(data, masked).entries;

  const std::optional<SamplingMask> seed_mask = masked ? mask : std::nullopt;
  ComplexSignal x_init = seed_vector(data, config.seed, seed_mask);
  InitResult result{x_init, x_init, {}, {}, 0, 0, {}, {}, {}, {}, {}};
  if (masked) result.warnings.push_back("masked input: transformed data computed from the zero-filled map");
  const CVector& xi = result.x_init.samples();
  const double xi_norm = xi.norm();
  if (!(xi_norm > 0.0)) throw NumericalFailure("run_initialization: seed vector is zero");

  CMatrix bands(len, len);
  for (Eigen::Index ell = 0; ell < len; ++ell) {
    for (Eigen::Index j = 0; j < len; ++j) bands(ell, j) = xi[j] * std::conj(xi[(j + ell) % len]);
  }
  CMatrix X_prev = assemble(bands);
  CVector w = xi / xi_norm;

  CMatrix symbols(len, len);
  bool premise_fallback = false;
  bool ill_conditioned = false;
  for (std::size_t t = 1; t <= config.iters_T; ++t) {
    InitIteration it;
    it.t = t;
    it.sigma_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index ell = 0; ell < len; ++ell) {
      const CVector s = circulant_symbol(w, ell);
      symbols.row(ell) = s.transpose();
      const double lo = s.cwiseAbs().minCoeff();
      const double hi = s.cwiseAbs().maxCoeff();
      it.sigma_min = std::min(it.sigma_min, lo);
      it.sigma_max = std::max(it.sigma_max, hi);
    }
    it.lambda = config.lambda;
    if (config.lambda_mode == LambdaMode::premise) {
      const double lam = config.premise_margin / (2.0 * it.sigma_min * it.sigma_min);
      if (std::isfinite(lam)) {
        it.lambda = lam;
      } else {
        premise_fallback = true;
      }
    }
    const double r = 1.0 / (2.0 * it.lambda);
    it.condition = (it.sigma_max * it.sigma_max + r) / (it.sigma_min * it.sigma_min + r);
    ill_conditioned = ill_conditioned || it.condition > config.max_condition;

    for (Eigen::Index ell = 0; ell < len; ++ell) {
      const CVector sol = prox_ls_update_circulant(symbols.row(ell).transpose(), Y.col(ell), bands.row(ell).transpose(),
                                                   it.lambda);
      bands.row(ell) = sol.transpose();
    }
    CMatrix X = assemble(bands);
    it.delta_fro = (X - X_prev).norm();
    const EigenResult eig = leading_eigenvector(X, config.power_iters, config.power_tol, derive_seed(config.seed, t));
    w = eig.vector;
    it.eigenvalue = eig.eigenvalue;
    it.eigen_second = eig.second;
    if (truth) {
      double b0 = 0.0;
      for (Eigen::Index j = 0; j < len; ++j) b0 += std::max(0.0, bands(0, j).real());
      it.correlation_error = correlation_error(*truth, ComplexSignal(CVector(std::pow(b0, 0.25) * w)));
    }
    result.iterations.push_back(it);
    X_prev = std::move(X);
  }
  if (premise_fallback) result.warnings.push_back("sigma_min is zero; premise lambda unavailable, fixed lambda used");
  if (ill_conditioned) result.warnings.push_back("normal matrix condition number exceeds max_condition");

  double sum_pos = 0.0;
  for (Eigen::Index j = 0; j < len; ++j) sum_pos += std::max(0.0, bands(0, j).real());
  result.beta_fourth_root = std::pow(sum_pos, 0.25);

  if (config.scale_mode == ScaleMode::fourth_root) {
    result.beta = result.beta_fourth_root;
  } else {
    const RMatrix ra = data.sqrt_amplitude();
    const RMatrix rw = ambiguity_map(ComplexSignal(w)).values().cwiseSqrt();
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index p = 0; p < len; ++p) {
      for (Eigen::Index k = 0; k < len; ++k) {
        if (mask && !mask->kept()(p, k)) continue;
        num += ra(p, k) * rw(p, k);
        den += rw(p, k) * rw(p, k);
      }
    }
    if (!(den > 0.0) || !(num > 0.0)) throw NumericalFailure("run_initialization: cannot fit the signal scale");
    result.beta = std::sqrt(num / den);
  }
  if (!(result.beta > 0.0) || !std::isfinite(result.beta)) {
    throw NumericalFailure("run_initialization: degenerate scale beta");
  }

  result.w = w;
  result.X0 = std::move(X_prev);
  result.x0 = ComplexSignal(CVector(result.beta * w));
  if (truth) {
    result.init_correlation_error = correlation_error(*truth, result.x_init);
    result.final_correlation_error = correlation_error(*truth, result.x0);
    if (*result.init_correlation_error > 0.0) {
      result.contraction_ratio = *result.final_correlation_error / *result.init_correlation_error;
    }
  }
  return result;
}

std::string to_string(LambdaMode m) { return m == LambdaMode::premise ? "premise" : "fixed"; }
std::string to_string(ScaleMode m) { return m == ScaleMode::fourth_root ? "fourth_root" : "fit_scale"; }

LambdaMode lambda_mode_from_string(const std::string& s) {
  if (s == "fixed") return LambdaMode::fixed;
  if (s == "premise") return LambdaMode::premise;
  throw InvalidArgument("unknown lambda mode '" + s + "'");
}

ScaleMode scale_mode_from_string(const std::string& s) {
  if (s == "fourth_root") return ScaleMode::fourth_root;
  if (s == "fit_scale") return ScaleMode::fit_scale;
  throw InvalidArgument("unknown scale mode '" + s + "'");
}

}  // namespace afpr
