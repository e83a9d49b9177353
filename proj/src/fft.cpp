#include "afpr/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace afpr::fft {
namespace {

// FFTW planning is not thread-safe, execution with the new-array interface is.
// Plans are created once per length under a lock and reused by every caller.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  ~PlanPair() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<PlanPair>> cache;
  std::lock_guard lock(plan_mutex());
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<PlanPair>();
    std::vector<cplx> a(n), b(n);
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    slot->fwd = fftw_plan_dft_1d(static_cast<int>(n), pa, pb, FFTW_FORWARD, flags);
    slot->bwd = fftw_plan_dft_1d(static_cast<int>(n), pa, pb, FFTW_BACKWARD, flags);
  }
  return *slot;
}

void run(std::span<const cplx> in, std::span<cplx> out, bool fwd) {
  if (in.size() != out.size()) throw InvalidArgument("fft: length mismatch");
  if (in.empty()) return;
  const auto& p = plans_for(in.size());
  // FFTW does not modify the input of an out-of-place complex transform.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  if (in.data() == out.data()) {
    std::vector<cplx> tmp(in.begin(), in.end());
    src = reinterpret_cast<fftw_complex*>(tmp.data());
    fftw_execute_dft(fwd ? p.fwd : p.bwd, src, dst);
    return;
  }
  fftw_execute_dft(fwd ? p.fwd : p.bwd, src, dst);
}

}  // namespace

void forward(std::span<const cplx> in, std::span<cplx> out) { run(in, out, true); }

void backward(std::span<const cplx> in, std::span<cplx> out) { run(in, out, false); }

void inverse(std::span<const cplx> in, std::span<cplx> out) {
  run(in, out, false);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
}

CVector forward(const CVector& in) {
  CVector out(in.size());
  forward(std::span<const cplx>(in.data(), in.size()), std::span<cplx>(out.data(), out.size()));
  return out;
}

CVector inverse(const CVector& in) {
  CVector out(in.size());
  inverse(std::span<const cplx>(in.data(), in.size()), std::span<cplx>(out.data(), out.size()));
  return out;
}

}  // namespace afpr::fft
