#include "su2pdo/symbol.hpp"

#include <cmath>
#include <sstream>

#include "su2pdo/wigner.hpp"

namespace su2pdo {

namespace {

Mat sym_plus(int l) {
  Mat m = Mat::Zero(l + 1, l + 1);
  for (int i = 0; i < l; ++i) m(i + 1, i) = -std::sqrt(double(l - i) * double(i + 1));
  return m;
}

Mat sym_minus(int l) {
  Mat m = Mat::Zero(l + 1, l + 1);
  for (int i = 1; i <= l; ++i) m(i - 1, i) = -std::sqrt(double(i) * double(l - i + 1));
  return m;
}

Mat sym_zero(int l) {
  Mat m = Mat::Zero(l + 1, l + 1);
  for (int i = 0; i <= l; ++i) m(i, i) = 0.5 * (2.0 * i - l);
  return m;
}

}  // namespace

Mat builtin_block(const std::string& name, int l) {
  const cplx i1(0.0, 1.0);
  if (name == "I") return Mat::Identity(l + 1, l + 1);
  if (name == "D+") return sym_plus(l);
  if (name == "D-") return sym_minus(l);
  if (name == "D0") return sym_zero(l);
  if (name == "A1") return -0.5 * i1 * (sym_plus(l) + sym_minus(l));
  if (name == "A2") return 0.5 * (sym_minus(l) - sym_plus(l));
  if (name == "A3") return -i1 * sym_zero(l);
  if (name == "Lap") {
    const double hl = 0.5 * l;
    return -hl * (hl + 1.0) * Mat::Identity(l + 1, l + 1);
  }
  throw std::invalid_argument("unknown built-in symbol: " + name);
}

InvariantSymbol builtin_symbol(const std::string& name, int band_x2) {
  InvariantSymbol s(band_x2);
  for (int l = 0; l <= band_x2; ++l) s.block(l) = builtin_block(name, l);
  return s;
}

CoeffStack apply_symbol(const InvariantSymbol& s, const CoeffStack& f) {
  const int band = std::min(s.band_x2(), f.band_x2());
  CoeffStack out(f.band_x2());
  for (int l = 0; l <= band; ++l) out.block(l) = s.block(l) * f.block(l);
  return out;
}

std::vector<cplx> quantize(const InvariantSymbol& s, const CoeffStack& f,
                           const std::vector<GroupElement>& points) {
  return synthesize(apply_symbol(s, f), points);
}

Vec quantize(const InvariantSymbol& s, const CoeffStack& f, const QuadratureGrid& g) {
  return synthesize(apply_symbol(s, f), g);
}

InvariantSymbol difference(const InvariantSymbol& s, int channel) {
  return InvariantSymbol(q_times(s.blocks, channel));
}

InvariantSymbol multi_difference(const InvariantSymbol& s, const MultiIndex& alpha) {
  InvariantSymbol out = s;
  for (int k = 0; k < alpha.a[0]; ++k) out = difference(out, +1);
  for (int k = 0; k < alpha.a[1]; ++k) out = difference(out, -1);
  for (int k = 0; k < alpha.a[2]; ++k) out = difference(out, 0);
  return out;
}

InvariantSymbol x_derivative(const InvariantSymbol& s, const MultiIndex& beta) {
  if (beta.order() == 0) return s;
  return InvariantSymbol(s.band_x2());
}

InvariantSymbol commutator(const InvariantSymbol& a, const InvariantSymbol& b) {
  const int band = std::min(a.band_x2(), b.band_x2());
  InvariantSymbol out(band);
  for (int l = 0; l <= band; ++l)
    out.block(l) = a.block(l) * b.block(l) - b.block(l) * a.block(l);
  return out;
}

InvariantSymbol conjugate_symbol(const InvariantSymbol& s, const GroupElement& u) {
  InvariantSymbol out(s.band_x2());
  for (int l = 0; l <= s.band_x2(); ++l) {
    Mat t = wigner_matrix(l, u);
    out.block(l) = t * s.block(l) * t.adjoint();
  }
  return out;
}

CoeffStack x_derivative_stack(const CoeffStack& st, int j) {
  const std::string names[3] = {"A1", "A2", "A3"};
  CoeffStack out(st.band_x2());
  for (int l = 0; l <= st.band_x2(); ++l) out.block(l) = builtin_block(names[j - 1], l) * st.block(l);
  return out;
}

CoeffStack x_derivative_power(const CoeffStack& st, const MultiIndex& beta) {
  CoeffStack out = st;
  for (int j = 1; j <= 3; ++j)
    for (int k = 0; k < beta.a[j - 1]; ++k) out = x_derivative_stack(out, j);
  return out;
}

namespace {

DualTable dual_table_against(int order, bool inversion) {
  const auto idx = multi_indices(order);
  const int n = static_cast<int>(idx.size());
  Mat pairing(n, n);
  for (int ib = 0; ib < n; ++ib) {
    const CoeffStack mono = inversion ? q_monomial(idx[ib]) : taylor_coordinate(idx[ib]);
    const double sgn = inversion ? ((idx[ib].order() % 2) ? -1.0 : 1.0) : 1.0;
    for (int ig = 0; ig < n; ++ig)
      pairing(ib, ig) = sgn * synth_at_identity(x_derivative_power(mono, idx[ig]));
  }
  Eigen::JacobiSVD<Mat> svd(pairing, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv[0] / sv[sv.size() - 1];
  if (!(cond < 1e10)) {
    std::ostringstream os;
    os << "dual derivative pairing is ill-conditioned (cond = " << cond << ")";
    throw NumericalError(os.str());
  }
  DualTable out;
  out.indices = idx;
  out.cond = cond;
  out.coeffs = Mat(n, n);
  Eigen::PartialPivLU<Mat> lu(pairing);
  for (int ia = 0; ia < n; ++ia) {
    Vec rhs = Vec::Zero(n);
    rhs[ia] = double(idx[ia].factorial());
    out.coeffs.row(ia) = lu.solve(rhs).transpose();
  }
  return out;
}

}  // namespace

DualTable dual_derivative_coeffs(int order) { return dual_table_against(order, false); }

DualTable inversion_dual_coeffs(int order) { return dual_table_against(order, true); }

}  // namespace su2pdo
