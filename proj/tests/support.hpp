#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "afpr/ambiguity.hpp"
#include "afpr/random.hpp"
#include "afpr/signal.hpp"
#include "afpr/solver.hpp"

namespace testing {

using afpr::cplx;

inline afpr::ComplexSignal random_signal(std::size_t n, std::uint64_t seed, bool unit = false) {
  afpr::Rng rng(seed);
  afpr::CVector x(static_cast<Eigen::Index>(n));
  for (auto& v : x) v = cplx(rng.normal(), rng.normal());
  if (unit) x /= x.norm();
  return afpr::ComplexSignal(x);
}

inline afpr::ComplexSignal band_signal(std::size_t n, std::uint64_t seed) {
  afpr::WaveformRecipe r;
  r.n_len = n;
  r.seed = seed;
  return afpr::generate(r).signal;
}

inline cplx omega(double num, std::size_t n) {
  return std::polar(1.0, 2.0 * std::numbers::pi * num / static_cast<double>(n));
}

// S[p,k] by the defining double sum.
inline afpr::CMatrix direct_inner_product(const afpr::ComplexSignal& x) {
  const auto n = x.size();
  const auto N = static_cast<std::int64_t>(n);
  afpr::CMatrix S(N, N);
  for (std::int64_t p = 0; p < N; ++p) {
    for (std::int64_t k = 0; k < N; ++k) {
      cplx acc = 0.0;
      for (std::int64_t m = 0; m < N; ++m) acc += x[m] * std::conj(x[m - p]) * omega(-static_cast<double>(m * k), n);
      S(p, k) = acc;
    }
  }
  return S;
}

// The same map from the spectrum: (1/N) sum_l X[l+k] conj(X[l]) exp(2 pi i l p / N).
inline afpr::CMatrix spectral_inner_product(const afpr::ComplexSignal& x) {
  const auto X = afpr::dft(x);
  const auto N = static_cast<std::int64_t>(x.size());
  afpr::CMatrix S(N, N);
  for (std::int64_t p = 0; p < N; ++p) {
    for (std::int64_t k = 0; k < N; ++k) {
      cplx acc = 0.0;
      for (std::int64_t l = 0; l < N; ++l) acc += X[l + k] * std::conj(X[l]) * omega(static_cast<double>(l * p), x.size());
      S(p, k) = acc / static_cast<double>(N);
    }
  }
  return S;
}

// Y[p,l] = sum_n x[n] conj(x[n-p]) conj(x[n+l]) x[n+l-p].
inline afpr::CMatrix quartic_Y(const afpr::ComplexSignal& x) {
  const auto N = static_cast<std::int64_t>(x.size());
  afpr::CMatrix Y(N, N);
  for (std::int64_t p = 0; p < N; ++p) {
    for (std::int64_t l = 0; l < N; ++l) {
      cplx acc = 0.0;
      for (std::int64_t n = 0; n < N; ++n) acc += x[n] * std::conj(x[n - p]) * std::conj(x[n + l]) * x[n + l - p];
      Y(p, l) = acc;
    }
  }
  return Y;
}

template <typename A, typename B>
double rel_diff(const A& a, const B& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

// Largest relative deviation between the Wirtinger gradient and central
// differences along the real and imaginary axis of every coordinate. For a
// real h, dh/dRe z_l = 2 Re g_l and dh/dIm z_l = 2 Im g_l.
inline double fd_error(const afpr::CVector& z, const afpr::Measurements& m, double mu, double h) {
  const afpr::CVector g = afpr::wirtinger_gradient(z, m, mu);
  afpr::CVector fd(z.size());
  for (Eigen::Index l = 0; l < z.size(); ++l) {
    afpr::CVector zp = z, zm = z;
    zp[l] += h;
    zm[l] -= h;
    const double dre = (afpr::smoothed_objective(zp, m, mu) - afpr::smoothed_objective(zm, m, mu)) / (2 * h);
    zp = z;
    zm = z;
    zp[l] += cplx(0, h);
    zm[l] -= cplx(0, h);
    const double dim = (afpr::smoothed_objective(zp, m, mu) - afpr::smoothed_objective(zm, m, mu)) / (2 * h);
    fd[l] = cplx(dre, dim) / 2.0;
  }
  return (fd - g).norm() / g.norm();
}

}  // namespace testing
