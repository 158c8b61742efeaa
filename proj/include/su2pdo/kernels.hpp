#pragma once

#include <cstddef>

#include "su2pdo/types.hpp"

namespace su2pdo::kernels {

// Runtime-dispatched contraction primitives behind the dense transform paths.
// Scalar versions are the reference; the AVX2+FMA versions must agree with
// them to roundoff (equivalence-tested). force_scalar(true) pins the scalar
// path (deterministic mode).

bool avx2_available();
void force_scalar(bool on);
bool using_avx2();

// sum_i w[i] * x[i] * y[i] with real weights
cplx weighted_dot(const double* w, const cplx* x, const cplx* y, std::size_t n);

// sum_i x[i] * y[i]
cplx dot_u(const cplx* x, const cplx* y, std::size_t n);

// out[i] += c * conj(x[i])
void axpy_conj(cplx c, const cplx* x, cplx* out, std::size_t n);

namespace detail {
cplx weighted_dot_scalar(const double* w, const cplx* x, const cplx* y, std::size_t n);
cplx dot_u_scalar(const cplx* x, const cplx* y, std::size_t n);
void axpy_conj_scalar(cplx c, const cplx* x, cplx* out, std::size_t n);
cplx weighted_dot_avx2(const double* w, const cplx* x, const cplx* y, std::size_t n);
cplx dot_u_avx2(const cplx* x, const cplx* y, std::size_t n);
void axpy_conj_avx2(cplx c, const cplx* x, cplx* out, std::size_t n);
}  // namespace detail

}  // namespace su2pdo::kernels
