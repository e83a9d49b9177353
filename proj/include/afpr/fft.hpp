#pragma once

#include <span>

#include "afpr/types.hpp"

namespace afpr::fft {

// Unnormalized forward transform: out[k] = sum_n in[n] exp(-2 pi i n k / N).
void forward(std::span<const cplx> in, std::span<cplx> out);

// Inverse transform carrying the 1/N factor.
void inverse(std::span<const cplx> in, std::span<cplx> out);

// Inverse transform without the 1/N factor: out[n] = sum_k in[k] exp(+2 pi i n k / N).
void backward(std::span<const cplx> in, std::span<cplx> out);

CVector forward(const CVector& in);
CVector inverse(const CVector& in);

}  // namespace afpr::fft
