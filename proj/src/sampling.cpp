#include "afpr/sampling.hpp"

#include <cmath>

#include "afpr/random.hpp"

namespace afpr {

SamplingMask::SamplingMask(BMatrix kept, MaskMode mode, MaskProvenance provenance)
    : kept_(std::move(kept)), mode_(mode), provenance_(provenance) {
  if (kept_.rows() != kept_.cols() || kept_.rows() < 2) throw InvalidArgument("SamplingMask: must be N x N with N >= 2");
  if (!kept_.any()) throw InvalidArgument("SamplingMask: at least one cell must be kept");
}

SamplingMask SamplingMask::full(std::size_t n, MaskMode mode) {
  const auto len = static_cast<Eigen::Index>(n);
  return SamplingMask(BMatrix::Constant(len, len, true), mode, MaskProvenance{});
}

BMatrix SamplingMask::active_cells() const {
  if (mode_ == MaskMode::zero_fill) return BMatrix::Constant(kept_.rows(), kept_.cols(), true);
  return kept_;
}

namespace {

std::size_t fraction_count(double frac, std::size_t n) {
  if (!(frac >= 0.0) || frac > 1.0) throw InvalidArgument("make_mask: fractions must lie in [0, 1]");
  return static_cast<std::size_t>(std::floor(frac * static_cast<double>(n) + 1e-9));
}

}  // namespace

SamplingMask make_mask(MaskKind kind, const MaskParams& params, std::size_t n, MaskMode mode) {
  if (n < 2) throw InvalidArgument("make_mask: N must be at least 2");
  const auto len = static_cast<Eigen::Index>(n);
  BMatrix kept = BMatrix::Constant(len, len, true);
  switch (kind) {
    case MaskKind::full:
      break;
    case MaskKind::uniform_delay: {
      if (params.keep_every == 0) throw InvalidArgument("make_mask: keep_every must be positive");
      kept.setConstant(false);
      for (std::size_t p = 0; p < n; p += params.keep_every) kept.row(static_cast<Eigen::Index>(p)).setConstant(true);
      break;
    }
    case MaskKind::block_delay:
    case MaskKind::block_doppler: {
      const auto first = fraction_count(params.frac_first, n);
      const auto last = fraction_count(params.frac_last, n);
      if (first + last >= n) throw InvalidArgument("make_mask: block removal leaves an empty mask");
      const bool centered = params.centered.value_or(kind == MaskKind::block_doppler);
      for (std::size_t j = 0; j < n; ++j) {
        if (j >= first && j < n - last) continue;
        const std::size_t i = centered ? (j + n - n / 2) % n : j;
        if (kind == MaskKind::block_delay) {
          kept.row(static_cast<Eigen::Index>(i)).setConstant(false);
        } else {
          kept.col(static_cast<Eigen::Index>(i)).setConstant(false);
        }
      }
      break;
    }
    case MaskKind::custom:
      throw InvalidArgument("make_mask: custom masks are built from an explicit cell matrix");
  }
  return SamplingMask(std::move(kept), mode, MaskProvenance{kind, params});
}

SamplingMask uniform_delay_removal(double removed, std::size_t n, MaskMode mode) {
  if (!(removed >= 0.0) || !(removed < 1.0)) throw InvalidArgument("uniform_delay_removal: fraction must lie in [0, 1)");
  const double keep_frac = 1.0 - removed;
  const double spacing = 1.0 / keep_frac;
  const auto rounded = static_cast<std::size_t>(std::llround(spacing));
  if (std::abs(spacing - static_cast<double>(rounded)) < 1e-9) {
    if (rounded == 1) return SamplingMask::full(n, mode);
    return make_mask(MaskKind::uniform_delay, MaskParams{rounded, 0.0, 0.0, true}, n, mode);
  }
  const auto m = static_cast<std::size_t>(std::ceil(keep_frac * static_cast<double>(n) - 1e-9));
  const auto len = static_cast<Eigen::Index>(n);
  BMatrix kept = BMatrix::Constant(len, len, false);
  for (std::size_t i = 0; i < m; ++i) {
    const auto p = static_cast<std::size_t>(std::llround(static_cast<double>(i * n) / static_cast<double>(m))) % n;
    kept.row(static_cast<Eigen::Index>(p)).setConstant(true);
  }
  return SamplingMask(std::move(kept), mode, MaskProvenance{MaskKind::custom, MaskParams{}});
}

AmbiguityMap apply_mask(const AmbiguityMap& A, const SamplingMask& mask) {
  if (A.size() != mask.size()) throw InvalidArgument("apply_mask: size mismatch");
  if (mask.mode() == MaskMode::exclude) return A;
  RMatrix v = A.values();
  for (Eigen::Index p = 0; p < v.rows(); ++p) {
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
      if (!mask.kept()(p, k)) v(p, k) = 0.0;
    }
  }
  return AmbiguityMap(std::move(v));
}

AmbiguityMap add_noise(const AmbiguityMap& A, const NoiseSpec& spec) {
  if (std::isnan(spec.snr_db)) throw InvalidArgument("add_noise: snr_db must not be NaN");
  if (std::isinf(spec.snr_db) && spec.snr_db > 0) return A;
  const double n = static_cast<double>(A.size());
  const double energy = A.values().squaredNorm();
  const double sigma = std::sqrt(energy * std::pow(10.0, -spec.snr_db / 10.0)) / n;
  Rng rng(spec.seed);
  RMatrix v = A.values();
  for (Eigen::Index p = 0; p < v.rows(); ++p) {
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
      v(p, k) += sigma * rng.normal();
      if (spec.clamp_negative && v(p, k) < 0.0) v(p, k) = 0.0;
    }
  }
  return AmbiguityMap(std::move(v));
}

double realized_snr_db(const AmbiguityMap& clean, const AmbiguityMap& noisy) {
  const double noise = (noisy.values() - clean.values()).squaredNorm();
  return 10.0 * std::log10(clean.values().squaredNorm() / noise);
}

std::string to_string(MaskMode m) { return m == MaskMode::zero_fill ? "zero_fill" : "exclude"; }

std::string to_string(MaskKind k) {
  switch (k) {
    case MaskKind::uniform_delay: return "uniform_delay";
    case MaskKind::block_delay: return "block_delay";
    case MaskKind::block_doppler: return "block_doppler";
    case MaskKind::custom: return "custom";
    case MaskKind::full: break;
  }
  return "full";
}

MaskMode mask_mode_from_string(const std::string& s) {
  if (s == "exclude") return MaskMode::exclude;
  if (s == "zero_fill") return MaskMode::zero_fill;
  throw InvalidArgument("unknown mask mode '" + s + "'");
}

MaskKind mask_kind_from_string(const std::string& s) {
  if (s == "full") return MaskKind::full;
  if (s == "uniform_delay") return MaskKind::uniform_delay;
  if (s == "block_delay") return MaskKind::block_delay;
  if (s == "block_doppler") return MaskKind::block_doppler;
  if (s == "custom") return MaskKind::custom;
  throw InvalidArgument("unknown mask kind '" + s + "'");
}

}  // namespace afpr
