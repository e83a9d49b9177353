#pragma once

#include <optional>
#include <string>
#include <vector>

#include "afpr/signal.hpp"
#include "afpr/types.hpp"

namespace afpr {

class SamplingMask;

/// Complex pre-magnitude map S[p,k] = sum_n x[n] conj(x[n-p]) exp(-2 pi i n k / N).
struct InnerProductMap {
  CMatrix entries;
  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
};

/// Discrete ambiguity function A[p,k] = |S[p,k]|^2 (row p = delay, column k = Doppler).
///
/// Maps produced by ambiguity_map are non-negative; measured maps may carry
/// negative cells when noise was added without clamping. Consumers that take
/// square roots clamp those cells at zero.
class AmbiguityMap {
 public:
  explicit AmbiguityMap(RMatrix values);

  std::size_t size() const { return static_cast<std::size_t>(values_.rows()); }
  const RMatrix& values() const { return values_; }
  double operator()(std::size_t p, std::size_t k) const {
    return values_(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k));
  }
  double volume() const { return values_.sum(); }

  /// Elementwise sqrt(max(A, 0)).
  RMatrix sqrt_amplitude() const;

 private:
  RMatrix values_;
};

/// Y[p,l] = (1/N) sum_k A[p,k] exp(-2 pi i k l / N).
struct TransformedData {
  CMatrix entries;
  /// Set when the source map was masked and zero-filled, so Y only approximates the exact transform.
  bool approximate = false;
};

InnerProductMap inner_product_map(const ComplexSignal& signal);
AmbiguityMap ambiguity_map(const ComplexSignal& signal);
TransformedData transformed_data(const AmbiguityMap& A, bool zero_filled = false);

/// ||sqrt(A) - sqrt(W)||_F / ||sqrt(A)||_F, optionally restricted to kept cells.
/// Throws NumericalFailure when the reference has zero energy on those cells.
double af_distance(const AmbiguityMap& A, const AmbiguityMap& W);
double af_distance(const AmbiguityMap& A, const AmbiguityMap& W, const BMatrix& cells);

/// Relative AF distance between two waveforms, dist(x, w) with x the reference.
double signal_distance(const ComplexSignal& reference, const ComplexSignal& estimate);

struct PropertyReport {
  bool p1_peak_at_origin = false;
  double p1_slack = 0.0;        // (max A - A[0,0]) / A[0,0], <= 0 when P1 holds
  bool p3_point_symmetric = false;
  double p3_deviation = 0.0;    // max |A[p,k] - A[-p,-k]| / max A
  double volume = 0.0;          // sum of all cells, compared across trivial transforms for P2
  double tolerance = 0.0;
};

PropertyReport check_properties(const AmbiguityMap& A, double rel_tol = 1e-9);

struct ShearReport {
  long coefficient = 0;
  bool holds = false;
  double deviation = 0.0;  // max |A_chirp[p,k] - A[p,(k - c p) mod N]| / max A
};

/// Multiplies x by the grid-periodic chirp exp(i pi c n^2 / N) and compares the
/// resulting AF with A sheared along the Doppler axis. Requires c*N even so the
/// chirp is N-periodic.
ShearReport check_shear(const ComplexSignal& signal, long coefficient, double rel_tol = 1e-9);

enum class IdentifiabilityVerdict { ok, under_sampled, critical_rows_missing };

struct IdentifiabilityReport {
  std::size_t kept_count = 0;
  std::size_t required_count = 0;
  std::vector<std::size_t> critical_indices;  // Doppler columns (band) or delay rows (time)
  std::vector<bool> rows_preserved;   // critical index j keeps at least width - j cells
  std::size_t kept_delay_rows = 0;        // delay rows with any kept cell
  std::size_t kept_doppler_columns = 0;   // Doppler columns with any kept cell
  IdentifiabilityVerdict verdict = IdentifiabilityVerdict::ok;
  std::string note;
};

IdentifiabilityReport identifiability_check(const SamplingMask& mask, const SupportSpec& spec, bool spectrum_known);

std::string to_string(IdentifiabilityVerdict v);

}  // namespace afpr
