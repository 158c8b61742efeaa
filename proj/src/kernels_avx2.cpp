#include "su2pdo/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define SU2PDO_HAVE_AVX2_TU 1
#endif

namespace su2pdo::kernels::detail {

#ifdef SU2PDO_HAVE_AVX2_TU

namespace {

// Deinterleave 4 complex (8 doubles) into re/im lanes.
inline void load4(const cplx* p, __m256d& re, __m256d& im) {
  __m256d lo = _mm256_loadu_pd(reinterpret_cast<const double*>(p));      // r0 i0 r1 i1
  __m256d hi = _mm256_loadu_pd(reinterpret_cast<const double*>(p) + 4);  // r2 i2 r3 i3
  __m256d a = _mm256_permute2f128_pd(lo, hi, 0x20);  // r0 i0 r2 i2
  __m256d b = _mm256_permute2f128_pd(lo, hi, 0x31);  // r1 i1 r3 i3
  re = _mm256_unpacklo_pd(a, b);                     // r0 r1 r2 r3
  im = _mm256_unpackhi_pd(a, b);                     // i0 i1 i2 i3
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

}  // namespace

cplx weighted_dot_avx2(const double* w, const cplx* x, const cplx* y, std::size_t n) {
  __m256d acc_re = _mm256_setzero_pd(), acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d xr, xi, yr, yi;
    load4(x + i, xr, xi);
    load4(y + i, yr, yi);
    __m256d wv = _mm256_loadu_pd(w + i);
    __m256d pr = _mm256_fmsub_pd(xr, yr, _mm256_mul_pd(xi, yi));
    __m256d pi = _mm256_fmadd_pd(xr, yi, _mm256_mul_pd(xi, yr));
    acc_re = _mm256_fmadd_pd(wv, pr, acc_re);
    acc_im = _mm256_fmadd_pd(wv, pi, acc_im);
  }
  double re = hsum(acc_re), im = hsum(acc_im);
  for (; i < n; ++i) {
    cplx p = x[i] * y[i];
    re += w[i] * p.real();
    im += w[i] * p.imag();
  }
  return {re, im};
}

cplx dot_u_avx2(const cplx* x, const cplx* y, std::size_t n) {
  __m256d acc_re = _mm256_setzero_pd(), acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d xr, xi, yr, yi;
    load4(x + i, xr, xi);
    load4(y + i, yr, yi);
    acc_re = _mm256_add_pd(acc_re, _mm256_fmsub_pd(xr, yr, _mm256_mul_pd(xi, yi)));
    acc_im = _mm256_add_pd(acc_im, _mm256_fmadd_pd(xr, yi, _mm256_mul_pd(xi, yr)));
  }
  double re = hsum(acc_re), im = hsum(acc_im);
  for (; i < n; ++i) {
    cplx p = x[i] * y[i];
    re += p.real();
    im += p.imag();
  }
  return {re, im};
}

void axpy_conj_avx2(cplx c, const cplx* x, cplx* out, std::size_t n) {
  // out += c * conj(x) on interleaved (re, im) pairs:
  //   re' += cr*xr + ci*xi
  //   im' += ci*xr - cr*xi
  // With xv = (xr, xi, ...) and xswap = (xi, xr, ...):
  //   res = (cr, -cr, ...) * xv + ci * xswap
  __m256d s = _mm256_setr_pd(c.real(), -c.real(), c.real(), -c.real());
  __m256d civ = _mm256_set1_pd(c.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
    __m256d xswap = _mm256_permute_pd(xv, 0x5);
    __m256d ov = _mm256_loadu_pd(reinterpret_cast<double*>(out + i));
    ov = _mm256_add_pd(ov, _mm256_fmadd_pd(civ, xswap, _mm256_mul_pd(s, xv)));
    _mm256_storeu_pd(reinterpret_cast<double*>(out + i), ov);
  }
  for (; i < n; ++i) out[i] += c * std::conj(x[i]);
}

#else

cplx weighted_dot_avx2(const double* w, const cplx* x, const cplx* y, std::size_t n) {
  return weighted_dot_scalar(w, x, y, n);
}
cplx dot_u_avx2(const cplx* x, const cplx* y, std::size_t n) {
  return dot_u_scalar(x, y, n);
}
void axpy_conj_avx2(cplx c, const cplx* x, cplx* out, std::size_t n) {
  axpy_conj_scalar(c, x, out, n);
}

#endif

}  // namespace su2pdo::kernels::detail
