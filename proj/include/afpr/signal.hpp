#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "afpr/types.hpp"

namespace afpr {

/// Length-N complex waveform with periodic indexing. N >= 2, all samples finite.
class ComplexSignal {
 public:
  explicit ComplexSignal(CVector samples);
  explicit ComplexSignal(const std::vector<cplx>& samples);

  static ComplexSignal delta(std::size_t n, std::size_t at = 0);
  static ComplexSignal constant(std::size_t n, cplx value = 1.0);

  std::size_t size() const { return static_cast<std::size_t>(samples_.size()); }

  // Periodic access: x[n] == x[n mod N] for any integer n.
  cplx operator[](std::int64_t n) const { return samples_[static_cast<Eigen::Index>(wrap_index(n, size()))]; }

  const CVector& samples() const { return samples_; }
  double norm() const { return samples_.norm(); }

  friend bool operator==(const ComplexSignal& a, const ComplexSignal& b) {
    return a.samples_.size() == b.samples_.size() && a.samples_ == b.samples_;
  }

 private:
  CVector samples_;
};

/// Unnormalized forward DFT, X[k] = sum_n x[n] exp(-2 pi i n k / N).
ComplexSignal dft(const ComplexSignal& signal);
/// Inverse DFT with the 1/N factor.
ComplexSignal idft(const ComplexSignal& signal);

// Transforms that leave the ambiguity function unchanged.
struct Rotate { double phi = 0.0; };     // e^{i phi} x[n]
struct Shift { std::int64_t a = 0; };    // x[n - a]
struct Reflect {};                       // x[-n]
struct Modulate { std::int64_t b = 0; }; // e^{2 pi i b n / N} x[n]
using TrivialTransform = std::variant<Rotate, Shift, Reflect, Modulate>;

ComplexSignal apply_trivial_transform(const ComplexSignal& signal, const TrivialTransform& transform);

enum class SupportKind { none, band_limited, time_limited };

/// Declared support: `width` consecutive (cyclic) nonzero entries starting at
/// `offset`, in time (time_limited) or in the DFT domain (band_limited).
struct SupportSpec {
  SupportKind kind = SupportKind::none;
  std::size_t width = 0;
  std::size_t offset = 0;

  void validate(std::size_t n) const;
};

/// True iff the relevant domain holds a cyclic run of N - width entries with
/// magnitude <= tol. Always true for SupportKind::none.
bool check_support(const ComplexSignal& signal, const SupportSpec& spec, double tol);

/// Project onto the subspace of signals supported on spec's window.
CVector project_support(const CVector& x, const SupportSpec& spec);

enum class WaveformKind { gaussian_spectrum, lfm, nlfm };

/// Waveform generator parameters. Physical units (Hz, seconds) live only here.
///
/// gaussian_spectrum: a Gaussian magnitude centred at `center_hz` with standard
/// deviation `cutoff` (Hz) is sampled on the DFT grid of spacing
/// sample_rate_hz / N, hard-zeroed outside a window of `width` bins around the
/// centre, multiplied by uniform random phases and inverse transformed. With
/// support = time_limited the same weighted random-phase sequence is laid on
/// the time grid instead. Output is scaled to unit energy.
///
/// lfm / nlfm: unit rectangular envelope over 0 <= dt*n <= pulse_T with phase
/// pi*phi[n], phi = pi k (dt n)^2 (+ sum_l alpha_l cos(2 pi l dt n / T) for
/// nlfm, alpha_l = 0.4 T / l), k = sweep_df / pulse_T.
struct WaveformRecipe {
  WaveformKind kind = WaveformKind::gaussian_spectrum;
  std::size_t n_len = 128;
  double center_hz = 800.0;
  double cutoff = 400.0;
  double sample_rate_hz = 3200.0;
  SupportKind support = SupportKind::band_limited;
  std::size_t width = 0;  // 0: ceil((N-1)/2)
  double pulse_T = 0.0;   // 0: (N/2 - 1) * dt
  double sweep_df = 128e3;
  std::size_t nlfm_L = 1;
  double dt = 0.4e-6;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t resolved_width() const;
  double resolved_pulse_T() const;
};

struct GeneratedWaveform {
  ComplexSignal signal;
  SupportSpec support;
};

/// Thrown when a recipe's support exceeds N/2, where uniqueness is not guaranteed.
class UniquenessViolation : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

GeneratedWaveform generate(const WaveformRecipe& recipe);

std::string to_string(SupportKind kind);
std::string to_string(WaveformKind kind);
SupportKind support_kind_from_string(const std::string& s);
WaveformKind waveform_kind_from_string(const std::string& s);

}  // namespace afpr
