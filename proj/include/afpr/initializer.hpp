#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "afpr/ambiguity.hpp"
#include "afpr/sampling.hpp"
#include "afpr/signal.hpp"

namespace afpr {

/// fixed:   use InitConfig::lambda as given.
/// premise: lambda = margin / (2 sigma_min^2) each iteration, where sigma_min is the
///          smallest singular value over all G_l, so lambda sigma_min^2 = margin / 2.
enum class LambdaMode { fixed, premise };

/// fourth_root: beta = (sum of positive entries of the l = 0 band)^(1/4).
/// fit_scale:        beta minimizes || sqrt(A) - beta^2 sqrt(W) ||_F over kept cells,
///                   W the AF of the unit eigenvector.
enum class ScaleMode { fourth_root, fit_scale };

struct InitConfig {
  std::size_t iters_T = 2;
  double lambda = 10.0;
  LambdaMode lambda_mode = LambdaMode::fixed;
  double premise_margin = 2.0;  // must exceed 1
  std::size_t power_iters = 2000;
  double power_tol = 1e-10;
  std::uint64_t seed = 0;
  ScaleMode scale_mode = ScaleMode::fit_scale;
  double max_condition = 1e12;  // warn when cond(G^H G + I/(2 lambda)) exceeds this

  void validate() const;
};

/// v[p] = (1/N) sum_k A[p,k]. With a mask, A is read zero-filled and delay rows
/// with no kept cell are linearly interpolated (cyclically) from the nearest kept
/// rows, so the seed has no structural zeros.
RVector seed_magnitude(const AmbiguityMap& A, const std::optional<SamplingMask>& mask = std::nullopt);

/// x_init[p] = v[p] exp(i theta[p]), theta uniform on [0, 2 pi) from `seed`.
ComplexSignal seed_vector(const AmbiguityMap& A, std::uint64_t seed,
                          const std::optional<SamplingMask>& mask = std::nullopt);

/// Dense circulant G_l[p,n] = conj(w[n-p]) w[n+l-p].
CMatrix build_G(const CVector& w, std::int64_t ell);

/// Eigenvalues of G_l in DFT order: G_l = F^-1 diag(symbol) F.
CVector circulant_symbol(const CVector& w, std::int64_t ell);

/// argmin_x ||G x - y||^2 + (1/(2 lambda)) ||x - x_prev||^2, by a dense Cholesky solve.
/// If `condition` is set, it receives the 2-norm condition number of the normal matrix.
CVector prox_ls_update(const CMatrix& G, const CVector& y, const CVector& x_prev, double lambda,
                       double* condition = nullptr);

/// Same problem for a circulant G given by its symbol, solved in the DFT domain.
CVector prox_ls_update_circulant(const CVector& symbol, const CVector& y, const CVector& x_prev, double lambda);

struct EigenResult {
  CVector vector;          // unit norm
  double eigenvalue = 0.0; // Rayleigh quotient of the Hermitian part
  double second = 0.0;     // estimate of the next eigenvalue (deflated power iteration)
  std::size_t iterations = 0;
  bool degenerate = false; // no usable spectral gap
};

/// Dominant (largest algebraic) eigenvector of (X + X^H)/2 by power iteration.
/// Throws NumericalFailure when the Rayleigh quotient has not settled to `tol`
/// (relative) after `iters` steps.
EigenResult leading_eigenvector(const CMatrix& X, std::size_t iters, double tol, std::uint64_t seed = 0);

/// min over integer shifts, modulations and reflection of || x x^H - T(y) T(y)^H ||_F.
/// Global phase drops out of the outer product.
double correlation_error(const ComplexSignal& x, const ComplexSignal& y);

struct InitIteration {
  std::size_t t = 0;
  double lambda = 0.0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double condition = 0.0;
  double delta_fro = 0.0;  // ||X0^(t) - X0^(t-1)||_F
  double eigenvalue = 0.0;
  double eigen_second = 0.0;
  std::optional<double> correlation_error;
};

struct InitResult {
  ComplexSignal x0;
  ComplexSignal x_init;
  CMatrix X0;
  CVector w;
  double beta = 0.0;
  double beta_fourth_root = 0.0;
  std::vector<InitIteration> iterations;
  std::optional<double> init_correlation_error;  // x_init vs truth
  std::optional<double> final_correlation_error; // x0 vs truth
  std::optional<double> contraction_ratio;       // final / init
  std::vector<std::string> warnings;
};

/// Alternating spectral initialization. A masked map is zero-filled first and the
/// scale fit uses kept cells only.
InitResult run_initialization(const AmbiguityMap& A, const InitConfig& config,
                              const std::optional<SamplingMask>& mask = std::nullopt,
                              const std::optional<ComplexSignal>& truth = std::nullopt);

std::string to_string(LambdaMode m);
std::string to_string(ScaleMode m);
LambdaMode lambda_mode_from_string(const std::string& s);
ScaleMode scale_mode_from_string(const std::string& s);

}  // namespace afpr
