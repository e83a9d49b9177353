#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "afpr/ambiguity.hpp"
#include "afpr/types.hpp"

namespace afpr {

/// zero_fill: removed cells read as 0 and still enter objectives.
/// exclude:   removed cells keep their values but objectives skip them.
enum class MaskMode { exclude, zero_fill };

enum class MaskKind { full, uniform_delay, block_delay, block_doppler, custom };

struct MaskParams {
  std::size_t keep_every = 2;  // uniform_delay: keep delays 0, d, 2d, ...
  // Block kinds remove the leading and trailing fractions of the axis. Index
  // order 0 .. N-1 removes the small lags, zero included; the centered axis
  // -N/2 .. N/2-1 removes the largest |shifts|. Unset: delays use index order,
  // Dopplers the centered (signed frequency) axis.
  double frac_first = 0.25;
  double frac_last = 0.25;
  std::optional<bool> centered = std::nullopt;
};

struct MaskProvenance {
  MaskKind kind = MaskKind::full;
  MaskParams params;
};

/// Cells (p, k) retained from an N x N ambiguity map.
class SamplingMask {
 public:
  SamplingMask(BMatrix kept, MaskMode mode, MaskProvenance provenance);

  static SamplingMask full(std::size_t n, MaskMode mode = MaskMode::exclude);

  std::size_t size() const { return static_cast<std::size_t>(kept_.rows()); }
  const BMatrix& kept() const { return kept_; }
  bool kept(std::size_t p, std::size_t k) const {
    return kept_(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k));
  }
  std::size_t kept_count() const { return static_cast<std::size_t>(kept_.count()); }
  MaskMode mode() const { return mode_; }
  const MaskProvenance& provenance() const { return provenance_; }

  SamplingMask with_mode(MaskMode mode) const { return SamplingMask(kept_, mode, provenance_); }

  /// Cells an objective sums over: every cell for zero_fill, kept cells for exclude.
  BMatrix active_cells() const;

 private:
  BMatrix kept_;
  MaskMode mode_;
  MaskProvenance provenance_;
};

SamplingMask make_mask(MaskKind kind, const MaskParams& params, std::size_t n, MaskMode mode = MaskMode::exclude);

/// Uniformly spaced delay rows with the given fraction removed; row 0 is always kept.
/// Keeps m = ceil(N (1 - removed)) rows at round(i N / m). Integer spacings report
/// uniform_delay provenance, the rest custom.
SamplingMask uniform_delay_removal(double removed, std::size_t n, MaskMode mode = MaskMode::exclude);

AmbiguityMap apply_mask(const AmbiguityMap& A, const SamplingMask& mask);

struct NoiseSpec {
  double snr_db = std::numeric_limits<double>::infinity();  // +inf: no noise
  std::uint64_t seed = 0;
  bool clamp_negative = true;
};

/// Adds i.i.d. zero-mean Gaussian noise with per-cell variance
/// ||A||_F^2 10^(-snr/10) / N^2, so the expected noise energy matches the SNR.
AmbiguityMap add_noise(const AmbiguityMap& A, const NoiseSpec& spec);

/// 10 log10(||A||_F^2 / ||noisy - A||_F^2).
double realized_snr_db(const AmbiguityMap& clean, const AmbiguityMap& noisy);

std::string to_string(MaskMode m);
std::string to_string(MaskKind k);
MaskMode mask_mode_from_string(const std::string& s);
MaskKind mask_kind_from_string(const std::string& s);

}  // namespace afpr
