#include "su2pdo/kernels.hpp"

namespace su2pdo::kernels {

namespace {
bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}
bool g_force_scalar = false;
}  // namespace

bool avx2_available() {
  static const bool ok = cpu_has_avx2();
  return ok;
}

void force_scalar(bool on) { g_force_scalar = on; }

bool using_avx2() { return avx2_available() && !g_force_scalar; }

cplx weighted_dot(const double* w, const cplx* x, const cplx* y, std::size_t n) {
  if (using_avx2()) return detail::weighted_dot_avx2(w, x, y, n);
  return detail::weighted_dot_scalar(w, x, y, n);
}

cplx dot_u(const cplx* x, const cplx* y, std::size_t n) {
  if (using_avx2()) return detail::dot_u_avx2(x, y, n);
  return detail::dot_u_scalar(x, y, n);
}

void axpy_conj(cplx c, const cplx* x, cplx* out, std::size_t n) {
  if (using_avx2()) return detail::axpy_conj_avx2(c, x, out, n);
  return detail::axpy_conj_scalar(c, x, out, n);
}

}  // namespace su2pdo::kernels
