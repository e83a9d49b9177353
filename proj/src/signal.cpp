#include "afpr/signal.hpp"

#include <cmath>
#include <numbers>

#include "afpr/fft.hpp"
#include "afpr/random.hpp"

namespace afpr {

namespace {

constexpr double kPi = std::numbers::pi;

void validate_samples(const CVector& s) {
  if (s.size() < 2) throw InvalidArgument("ComplexSignal: length must be at least 2");
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i].real()) || !std::isfinite(s[i].imag())) {
      throw InvalidArgument("ComplexSignal: sample " + std::to_string(i) + " is not finite");
    }
  }
}

// Longest cyclic run of entries with |v| <= tol.
std::size_t longest_small_run(const CVector& v, double tol) {
  const auto n = static_cast<std::size_t>(v.size());
  std::size_t best = 0;
  std::size_t run = 0;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    if (std::abs(v[static_cast<Eigen::Index>(i % n)]) <= tol) {
      if (++run >= n) return n;
      best = std::max(best, run);
    } else {
      run = 0;
    }
  }
  return best;
}

}  // namespace

ComplexSignal::ComplexSignal(CVector samples) : samples_(std::move(samples)) { validate_samples(samples_); }

ComplexSignal::ComplexSignal(const std::vector<cplx>& samples)
    : ComplexSignal(CVector(Eigen::Map<const CVector>(samples.data(), static_cast<Eigen::Index>(samples.size())))) {}

ComplexSignal ComplexSignal::delta(std::size_t n, std::size_t at) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(n));
  if (n > 0) v[static_cast<Eigen::Index>(at % n)] = 1.0;
  return ComplexSignal(std::move(v));
}

ComplexSignal ComplexSignal::constant(std::size_t n, cplx value) {
  return ComplexSignal(CVector::Constant(static_cast<Eigen::Index>(n), value));
}

ComplexSignal dft(const ComplexSignal& signal) { return ComplexSignal(fft::forward(signal.samples())); }

ComplexSignal idft(const ComplexSignal& signal) { return ComplexSignal(fft::inverse(signal.samples())); }

ComplexSignal apply_trivial_transform(const ComplexSignal& signal, const TrivialTransform& transform) {
  const auto n = signal.size();
  const auto len = static_cast<std::int64_t>(n);
  CVector out(static_cast<Eigen::Index>(n));
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        for (std::int64_t i = 0; i < len; ++i) {
          cplx v;
          if constexpr (std::is_same_v<T, Rotate>) {
            v = std::polar(1.0, t.phi) * signal[i];
          } else if constexpr (std::is_same_v<T, Shift>) {
            v = signal[i - t.a];
          } else if constexpr (std::is_same_v<T, Reflect>) {
            v = signal[-i];
          } else {
            // Reduce b*n mod N first so the phase argument stays small.
            const auto m = static_cast<double>(wrap_index(t.b * i, n));
            v = std::polar(1.0, 2.0 * kPi * m / static_cast<double>(n)) * signal[i];
          }
          out[static_cast<Eigen::Index>(i)] = v;
        }
      },
      transform);
  return ComplexSignal(std::move(out));
}

void SupportSpec::validate(std::size_t n) const {
  if (kind == SupportKind::none) return;
  if (width == 0) throw InvalidArgument("SupportSpec: width must be positive");
  if (width > n / 2) {
    throw InvalidArgument("SupportSpec: width " + std::to_string(width) + " exceeds floor(N/2) = " +
                          std::to_string(n / 2));
  }
  if (offset >= n) throw InvalidArgument("SupportSpec: offset must lie in [0, N)");
}

bool check_support(const ComplexSignal& signal, const SupportSpec& spec, double tol) {
  if (tol < 0) throw InvalidArgument("check_support: tol must be non-negative");
  if (spec.kind == SupportKind::none) return true;
  const auto n = signal.size();
  if (spec.width > n) return true;
  const CVector& domain = spec.kind == SupportKind::time_limited ? signal.samples() : fft::forward(signal.samples());
  return longest_small_run(domain, tol) >= n - spec.width;
}

CVector project_support(const CVector& x, const SupportSpec& spec) {
  if (spec.kind == SupportKind::none) return x;
  const auto n = static_cast<std::size_t>(x.size());
  auto keep = [&](std::size_t i) { return wrap_index(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(spec.offset), n) < spec.width; };
  if (spec.kind == SupportKind::time_limited) {
    CVector out = x;
    for (std::size_t i = 0; i < n; ++i) {
      if (!keep(i)) out[static_cast<Eigen::Index>(i)] = 0.0;
    }
    return out;
  }
  CVector spectrum = fft::forward(x);
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep(i)) spectrum[static_cast<Eigen::Index>(i)] = 0.0;
  }
  return fft::inverse(spectrum);
}

void WaveformRecipe::validate() const {
  if (n_len < 2) throw InvalidArgument("WaveformRecipe: n_len must be at least 2");
  if (kind == WaveformKind::gaussian_spectrum) {
    if (!(cutoff > 0) || !(sample_rate_hz > 0)) {
      throw InvalidArgument("WaveformRecipe: cutoff and sample_rate_hz must be positive");
    }
    if (!std::isfinite(center_hz)) throw InvalidArgument("WaveformRecipe: center_hz must be finite");
    if (support == SupportKind::none) {
      throw InvalidArgument("WaveformRecipe: gaussian_spectrum needs a band_limited or time_limited support");
    }
  } else {
    if (!(dt > 0)) throw InvalidArgument("WaveformRecipe: dt must be positive");
    if (pulse_T < 0) throw InvalidArgument("WaveformRecipe: pulse_T must be non-negative");
    if (!(sweep_df >= 0)) throw InvalidArgument("WaveformRecipe: sweep_df must be non-negative");
    if (kind == WaveformKind::nlfm && nlfm_L == 0) throw InvalidArgument("WaveformRecipe: nlfm_L must be positive");
  }
}

std::size_t WaveformRecipe::resolved_width() const { return width == 0 ? n_len / 2 : width; }

double WaveformRecipe::resolved_pulse_T() const {
  return pulse_T > 0 ? pulse_T : static_cast<double>(n_len / 2 - 1) * dt;
}

namespace {

GeneratedWaveform generate_gaussian(const WaveformRecipe& r) {
  const std::size_t n = r.n_len;
  const std::size_t width = r.resolved_width();
  if (width > n / 2) {
    throw UniquenessViolation("generate: support width " + std::to_string(width) + " exceeds N/2 = " +
                              std::to_string(n / 2) + "; uniqueness from the AF is not guaranteed");
  }
  const double bin_hz = r.sample_rate_hz / static_cast<double>(n);
  const auto center_bin = static_cast<std::int64_t>(std::llround(r.center_hz / bin_hz));
  const std::int64_t start = center_bin - static_cast<std::int64_t>(width / 2);
  const std::size_t offset = wrap_index(start, n);

  Rng rng(r.seed);
  CVector weighted = CVector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < width; ++j) {
    const double f = static_cast<double>(start + static_cast<std::int64_t>(j)) * bin_hz;
    const double z = (f - r.center_hz) / r.cutoff;
    const double mag = std::exp(-0.5 * z * z);
    weighted[static_cast<Eigen::Index>(wrap_index(start + static_cast<std::int64_t>(j), n))] =
        std::polar(mag, rng.phase());
  }

  CVector x = r.support == SupportKind::band_limited ? fft::inverse(weighted) : weighted;
  const double energy = x.norm();
  if (!(energy > 0)) throw NumericalFailure("generate: spectrum underflowed to zero; widen cutoff");
  x /= energy;
  return {ComplexSignal(std::move(x)), SupportSpec{r.support, width, offset}};
}

GeneratedWaveform generate_modulated(const WaveformRecipe& r) {
  const std::size_t n = r.n_len;
  const double T = r.resolved_pulse_T();
  // Samples with 0 <= dt*n <= T; the epsilon absorbs rounding in T/dt.
  const auto last = static_cast<std::size_t>(std::floor(T / r.dt + 1e-9));
  const std::size_t count = std::min(last + 1, n);
  if (count > n / 2) {
    throw UniquenessViolation("generate: pulse covers " + std::to_string(count) + " samples, more than N/2 = " +
                              std::to_string(n / 2) + "; uniqueness from the AF is not guaranteed");
  }
  const double k = r.sweep_df / T;
  CVector x = CVector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < count; ++i) {
    const double t = r.dt * static_cast<double>(i);
    double phi = kPi * k * t * t;
    if (r.kind == WaveformKind::nlfm) {
      for (std::size_t l = 1; l <= r.nlfm_L; ++l) {
        const double alpha = 0.4 * T / static_cast<double>(l);
        phi += alpha * std::cos(2.0 * kPi * static_cast<double>(l) * t / T);
      }
    }
    x[static_cast<Eigen::Index>(i)] = std::polar(1.0, kPi * phi);
  }
  return {ComplexSignal(std::move(x)), SupportSpec{SupportKind::time_limited, count, 0}};
}

}  // namespace

GeneratedWaveform generate(const WaveformRecipe& recipe) {
  recipe.validate();
  return recipe.kind == WaveformKind::gaussian_spectrum ? generate_gaussian(recipe) : generate_modulated(recipe);
}

std::string to_string(SupportKind kind) {
  switch (kind) {
    case SupportKind::band_limited: return "band_limited";
    case SupportKind::time_limited: return "time_limited";
    case SupportKind::none: break;
  }
  return "none";
}

std::string to_string(WaveformKind kind) {
  switch (kind) {
    case WaveformKind::lfm: return "lfm";
    case WaveformKind::nlfm: return "nlfm";
    case WaveformKind::gaussian_spectrum: break;
  }
  return "gaussian_spectrum";
}

SupportKind support_kind_from_string(const std::string& s) {
  if (s == "band_limited") return SupportKind::band_limited;
  if (s == "time_limited") return SupportKind::time_limited;
  if (s == "none") return SupportKind::none;
  throw InvalidArgument("unknown support kind '" + s + "'");
}

WaveformKind waveform_kind_from_string(const std::string& s) {
  if (s == "gaussian_spectrum") return WaveformKind::gaussian_spectrum;
  if (s == "lfm") return WaveformKind::lfm;
  if (s == "nlfm") return WaveformKind::nlfm;
  throw InvalidArgument("unknown waveform kind '" + s + "'");
}

}  // namespace afpr
