#include "su2pdo/stack.hpp"

#include <algorithm>
#include <stdexcept>

#include "su2pdo/wigner.hpp"

namespace su2pdo {

CoeffStack zero_stack(int band_x2) { return CoeffStack(band_x2); }

CoeffStack unit_stack() {
  CoeffStack st(0);
  st.block(0)(0, 0) = 1.0;
  return st;
}

CoeffStack random_stack(int band_x2, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CoeffStack st(band_x2);
  for (int l = 0; l <= band_x2; ++l) {
    Mat& b = st.block(l);
    for (int i = 0; i <= l; ++i)
      for (int j = 0; j <= l; ++j) {
        double re = gauss(rng);
        double im = gauss(rng);
        b(i, j) = cplx(re, im);
      }
  }
  return st;
}

CoeffStack lc(const std::vector<std::pair<cplx, const CoeffStack*>>& terms) {
  int band = 0;
  for (const auto& [c, st] : terms) band = std::max(band, st->band_x2());
  CoeffStack out(band);
  for (const auto& [c, st] : terms)
    for (int l = 0; l <= st->band_x2(); ++l) out.block(l) += c * st->block(l);
  return out;
}

CoeffStack entry_times(const CoeffStack& f, int iu, int iv) {
  const int band_in = f.band_x2();
  CoeffStack out(band_in + 1);
  for (int l = 0; l <= band_in + 1; ++l) {
    Mat& m = out.block(l);
    const Mat* up = f.has(l + 1) ? &f.block(l + 1) : nullptr;
    const Mat* lo = f.has(l - 1) ? &f.block(l - 1) : nullptr;
    for (int ia = 0; ia <= l; ++ia)
      for (int ib = 0; ib <= l; ++ib) {
        auto [wp, wm] = product_weights(iu, iv, l, ia, ib);
        if (up) m(ia, ib) += wp * (*up)(ia + iu, ib + iv);
        if (lo && wm != 0.0) {
          const int ja = ia + iu - 1;
          const int jb = ib + iv - 1;
          if (0 <= ja && ja <= l - 1 && 0 <= jb && jb <= l - 1) m(ia, ib) += wm * (*lo)(ja, jb);
        }
      }
  }
  return out;
}

CoeffStack product_with_spin_half(const CoeffStack& f, const std::string& which) {
  if (which.size() != 2 || (which[0] != '-' && which[0] != '+') ||
      (which[1] != '-' && which[1] != '+'))
    throw std::invalid_argument("spin-half entry must be one of --, -+, +-, ++");
  return entry_times(f, which[0] == '+' ? 1 : 0, which[1] == '+' ? 1 : 0);
}

CoeffStack q_times(const CoeffStack& f, int channel) {
  switch (channel) {
    case +1: {
      CoeffStack t = entry_times(f, 1, 0);
      return lc({{-1.0, &t}});
    }
    case -1: {
      CoeffStack t = entry_times(f, 0, 1);
      return lc({{-1.0, &t}});
    }
    case 0: {
      CoeffStack d = entry_times(f, 1, 1);
      CoeffStack u = entry_times(f, 0, 0);
      return lc({{1.0, &d}, {-1.0, &u}});
    }
    default:
      throw std::invalid_argument("q channel must be +1, -1 or 0");
  }
}

CoeffStack q_function(int channel) { return q_times(unit_stack(), channel); }

CoeffStack q_monomial(const MultiIndex& alpha) {
  CoeffStack st = unit_stack();
  for (int k = 0; k < alpha.a[0]; ++k) st = q_times(st, +1);
  for (int k = 0; k < alpha.a[1]; ++k) st = q_times(st, -1);
  for (int k = 0; k < alpha.a[2]; ++k) st = q_times(st, 0);
  return st;
}

CoeffStack taylor_coordinate(const MultiIndex& alpha) {
  const cplx i1(0.0, 1.0);
  cplx scale = 1.0;
  for (int k = 0; k < alpha.a[0]; ++k) scale *= i1;
  for (int k = 0; k < alpha.a[1]; ++k) scale *= -i1;
  CoeffStack q = q_monomial(alpha);
  return lc({{scale, &q}});
}

cplx synth_at_identity(const CoeffStack& st) {
  cplx acc = 0.0;
  for (int l = 0; l <= st.band_x2(); ++l) acc += double(l + 1) * st.block(l).trace();
  return acc;
}

cplx parseval_inner(const CoeffStack& u, const CoeffStack& v) {
  cplx acc = 0.0;
  const int band = std::min(u.band_x2(), v.band_x2());
  for (int l = 0; l <= band; ++l)
    acc += double(l + 1) * (u.block(l).array() * v.block(l).array().conjugate()).sum();
  return acc;
}

double stack_norm(const CoeffStack& u) { return std::sqrt(std::abs(parseval_inner(u, u))); }

}  // namespace su2pdo
