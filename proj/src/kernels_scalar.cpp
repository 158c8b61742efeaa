#include "su2pdo/kernels.hpp"

namespace su2pdo::kernels::detail {

cplx weighted_dot_scalar(const double* w, const cplx* x, const cplx* y, std::size_t n) {
  double re = 0, im = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cplx p = x[i] * y[i];
    re += w[i] * p.real();
    im += w[i] * p.imag();
  }
  return {re, im};
}

cplx dot_u_scalar(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0, im = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cplx p = x[i] * y[i];
    re += p.real();
    im += p.imag();
  }
  return {re, im};
}

void axpy_conj_scalar(cplx c, const cplx* x, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += c * std::conj(x[i]);
}

}  // namespace su2pdo::kernels::detail
