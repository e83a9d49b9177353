#include "afpr/ambiguity.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "afpr/fft.hpp"
#include "afpr/sampling.hpp"

namespace afpr {

AmbiguityMap::AmbiguityMap(RMatrix values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) throw InvalidArgument("AmbiguityMap: matrix must be square");
  if (values_.rows() < 2) throw InvalidArgument("AmbiguityMap: N must be at least 2");
  if (!values_.allFinite()) throw InvalidArgument("AmbiguityMap: entries must be finite");
}

RMatrix AmbiguityMap::sqrt_amplitude() const { return values_.cwiseMax(0.0).cwiseSqrt(); }

InnerProductMap inner_product_map(const ComplexSignal& signal) {
  const auto n = signal.size();
  const auto len = static_cast<Eigen::Index>(n);
  const CVector& x = signal.samples();
  InnerProductMap out{CMatrix(len, len)};
  std::vector<cplx> lag(n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t i = 0; i < n; ++i) {
      lag[i] = x[static_cast<Eigen::Index>(i)] * std::conj(signal[static_cast<std::int64_t>(i) - static_cast<std::int64_t>(p)]);
    }
    fft::forward(lag, std::span<cplx>(out.entries.row(static_cast<Eigen::Index>(p)).data(), n));
  }
  return out;
}

AmbiguityMap ambiguity_map(const ComplexSignal& signal) {
  return AmbiguityMap(inner_product_map(signal).entries.cwiseAbs2());
}

TransformedData transformed_data(const AmbiguityMap& A, bool zero_filled) {
  const auto n = A.size();
  const auto len = static_cast<Eigen::Index>(n);
  TransformedData out{CMatrix(len, len), zero_filled};
  std::vector<cplx> row(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (Eigen::Index p = 0; p < len; ++p) {
    for (Eigen::Index k = 0; k < len; ++k) row[static_cast<std::size_t>(k)] = A.values()(p, k);
    std::span<cplx> dst(out.entries.row(p).data(), n);
    fft::forward(row, dst);
    for (auto& v : dst) v *= scale;
  }
  return out;
}

double af_distance(const AmbiguityMap& A, const AmbiguityMap& W, const BMatrix& cells) {
  if (A.size() != W.size()) throw InvalidArgument("af_distance: size mismatch");
  if (cells.rows() != A.values().rows() || cells.cols() != A.values().cols()) {
    throw InvalidArgument("af_distance: cell selection has the wrong shape");
  }
  const RMatrix ra = A.sqrt_amplitude();
  const RMatrix rw = W.sqrt_amplitude();
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index p = 0; p < ra.rows(); ++p) {
    for (Eigen::Index k = 0; k < ra.cols(); ++k) {
      if (!cells(p, k)) continue;
      const double d = ra(p, k) - rw(p, k);
      num += d * d;
      den += ra(p, k) * ra(p, k);
    }
  }
  if (!(den > 0)) throw NumericalFailure("af_distance: reference map has zero energy");
  return std::sqrt(num / den);
}

double af_distance(const AmbiguityMap& A, const AmbiguityMap& W) {
  const auto len = static_cast<Eigen::Index>(A.size());
  return af_distance(A, W, BMatrix::Constant(len, len, true));
}

double signal_distance(const ComplexSignal& reference, const ComplexSignal& estimate) {
  return af_distance(ambiguity_map(reference), ambiguity_map(estimate));
}

PropertyReport check_properties(const AmbiguityMap& A, double rel_tol) {
  const RMatrix& a = A.values();
  const auto len = a.rows();
  PropertyReport r;
  r.tolerance = rel_tol;
  const double peak = a.maxCoeff();
  const double origin = a(0, 0);
  r.p1_slack = origin > 0 ? (peak - origin) / origin : (peak > 0 ? INFINITY : 0.0);
  r.p1_peak_at_origin = r.p1_slack <= rel_tol;
  double dev = 0.0;
  for (Eigen::Index p = 0; p < len; ++p) {
    for (Eigen::Index k = 0; k < len; ++k) {
      dev = std::max(dev, std::abs(a(p, k) - a((len - p) % len, (len - k) % len)));
    }
  }
  r.p3_deviation = peak > 0 ? dev / peak : dev;
  r.p3_point_symmetric = r.p3_deviation <= rel_tol;
  r.volume = A.volume();
  return r;
}

ShearReport check_shear(const ComplexSignal& signal, long coefficient, double rel_tol) {
  const auto n = signal.size();
  const auto c = static_cast<std::int64_t>(coefficient);
  if ((c * static_cast<std::int64_t>(n)) % 2 != 0) {
    throw InvalidArgument("check_shear: c * N must be even for a grid-periodic chirp");
  }
  CVector chirped(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    // exp(i pi c n^2 / N) depends on c n^2 mod 2N only.
    const auto m = wrap_index(c * static_cast<std::int64_t>(i * i), 2 * n);
    chirped[static_cast<Eigen::Index>(i)] =
        std::polar(1.0, std::numbers::pi * static_cast<double>(m) / static_cast<double>(n)) *
        signal.samples()[static_cast<Eigen::Index>(i)];
  }
  const RMatrix a = ambiguity_map(signal).values();
  const RMatrix b = ambiguity_map(ComplexSignal(std::move(chirped))).values();
  double dev = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t k = 0; k < n; ++k) {
      const auto src = wrap_index(static_cast<std::int64_t>(k) - c * static_cast<std::int64_t>(p), n);
      dev = std::max(dev, std::abs(b(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k)) -
                                   a(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(src))));
    }
  }
  const double peak = a.maxCoeff();
  ShearReport r;
  r.coefficient = coefficient;
  r.deviation = peak > 0 ? dev / peak : dev;
  r.holds = r.deviation <= rel_tol;
  return r;
}

IdentifiabilityReport identifiability_check(const SamplingMask& mask, const SupportSpec& spec, bool spectrum_known) {
  if (spec.kind == SupportKind::none) throw InvalidArgument("identifiability_check: support kind must not be none");
  const auto n = mask.size();
  spec.validate(n);
  const BMatrix& kept = mask.kept();

  IdentifiabilityReport r;
  r.kept_count = mask.kept_count();
  r.required_count = (spectrum_known ? 2 : 3) * spec.width;
  for (Eigen::Index i = 0; i < kept.rows(); ++i) {
    if (kept.row(i).any()) ++r.kept_delay_rows;
    if (kept.col(i).any()) ++r.kept_doppler_columns;
  }

  // The uniqueness construction needs the first and (width-1)-th rows of the
  // pyramid intact: Doppler columns for band-limited signals, delay rows for
  // time-limited ones. Pyramid row j holds width - j unknown products, so it
  // counts as preserved once that many of its cells are kept.
  r.critical_indices = {0, spec.width - 1};
  if (spec.width == 1) r.critical_indices.pop_back();
  bool critical_ok = true;
  for (auto idx : r.critical_indices) {
    const auto i = static_cast<Eigen::Index>(idx);
    const auto have = static_cast<std::size_t>(spec.kind == SupportKind::band_limited ? kept.col(i).count()
                                                                                       : kept.row(i).count());
    const bool whole = have >= spec.width - idx;
    r.rows_preserved.push_back(whole);
    critical_ok = critical_ok && whole;
  }

  if (r.kept_count < r.required_count) {
    r.verdict = IdentifiabilityVerdict::under_sampled;
  } else if (!critical_ok) {
    r.verdict = IdentifiabilityVerdict::critical_rows_missing;
  } else {
    r.verdict = IdentifiabilityVerdict::ok;
  }
  r.note = "kept_count counts retained (p,k) cells; kept_delay_rows/kept_doppler_columns give the row/column reading of m";
  return r;
}

std::string to_string(IdentifiabilityVerdict v) {
  switch (v) {
    case IdentifiabilityVerdict::under_sampled: return "under_sampled";
    case IdentifiabilityVerdict::critical_rows_missing: return "critical_rows_missing";
    case IdentifiabilityVerdict::ok: break;
  }
  return "ok";
}

}  // namespace afpr
