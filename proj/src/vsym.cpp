#include "su2pdo/vsym.hpp"

#include <cmath>
#include <sstream>

#include "su2pdo/wigner.hpp"

namespace su2pdo {

namespace {

using RMMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<RMMat>;
using CMapRM = Eigen::Map<const RMMat>;

cplx quarter_power(int q) {
  switch (((q % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

// Matrix entries of t^l on all nodes of g, transposed: (l+1)^2 x N with row
// i*(l+1)+j, so one node is one contiguous column.
Mat entry_tab_t(const QuadratureGrid& g, int l) {
  const int d = l + 1;
  const auto& s = g.spec();
  Mat T(d * d, g.node_count());
  std::vector<cplx> row_phase(d), col_phase(d);
  int k = 0;
  for (int ip = 0; ip < s.n_phi; ++ip) {
    const double ph = g.phi(ip);
    for (int it = 0; it < s.n_theta; ++it) {
      const RMat& P = g.reduced_at_theta(it, l)[l];
      for (int is = 0; is < s.n_psi; ++is, ++k) {
        const double ps = g.psi(is);
        for (int a = 0; a < d; ++a) {
          const int m_x2 = 2 * a - l;
          row_phase[a] = std::exp(cplx(0.0, 0.5 * m_x2 * ph));
          col_phase[a] = std::exp(cplx(0.0, 0.5 * m_x2 * ps));
        }
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            T(a * d + b, k) = row_phase[a] * col_phase[b] * quarter_power(b - a) * P(a, b);
      }
    }
  }
  return T;
}

Mat kron_with_identity(const Mat& S, int d) {
  Mat K = Mat::Zero(S.rows() * d, S.cols() * d);
  for (int i = 0; i < S.rows(); ++i)
    for (int j = 0; j < S.cols(); ++j) {
      if (S(i, j) == 0.0) continue;
      for (int k = 0; k < d; ++k) K(i * d + k, j * d + k) = S(i, j);
    }
  return K;
}

void check_same_context(const VaryingSymbol& a, const VaryingSymbol& b, const char* op) {
  if (a.ctx.get() != b.ctx.get())
    throw std::invalid_argument(std::string(op) + ": symbols live on different contexts");
}

}  // namespace

std::shared_ptr<const VContext> VContext::make(GridPtr grid, int xband_x2) {
  if (3 * xband_x2 > grid->certified_product_band_x2()) {
    std::ostringstream os;
    os << "varying-symbol context needs products of band " << 3 * xband_x2
       << "/2, grid certifies " << grid->certified_product_band_x2() << "/2";
    throw NumericalError(os.str());
  }
  auto c = std::shared_ptr<VContext>(new VContext);
  c->grid = grid;
  c->xband_x2 = xband_x2;
  c->offs.assign(xband_x2 + 2, 0);
  for (int lx = 0; lx <= xband_x2; ++lx) c->offs[lx + 1] = c->offs[lx] + (lx + 1) * (lx + 1);
  c->packed_len = c->offs[xband_x2 + 1];

  const int N = grid->node_count();
  c->SY.resize(N, c->packed_len);
  c->AN.resize(c->packed_len, N);
  for (int lx = 0; lx <= xband_x2; ++lx) {
    const Mat& T = grid->dense_block(lx);
    const int w = (lx + 1) * (lx + 1);
    c->SY.middleCols(c->offs[lx], w) = double(lx + 1) * T.conjugate();
    c->AN.middleRows(c->offs[lx], w) =
        (grid->weights().asDiagonal() * T).transpose();
  }

  const std::string names[3] = {"A1", "A2", "A3"};
  for (int j = 0; j < 3; ++j) {
    Mat D = Mat::Zero(c->packed_len, c->packed_len);
    for (int lx = 0; lx <= xband_x2; ++lx) {
      Mat K = kron_with_identity(builtin_block(names[j], lx), lx + 1);
      D.block(c->offs[lx], c->offs[lx], K.rows(), K.cols()) = K;
    }
    c->D[j] = std::move(D);
  }

  const DualTable duals = inversion_dual_coeffs(3);
  const int n = static_cast<int>(duals.indices.size());
  for (int ia = 0; ia < n; ++ia) {
    Mat M = Mat::Zero(c->packed_len, c->packed_len);
    for (int ig = 0; ig < n; ++ig) {
      const cplx coef = duals.coeffs(ia, ig);
      if (std::abs(coef) < 1e-13) continue;
      Mat T = Mat::Identity(c->packed_len, c->packed_len);
      const MultiIndex& ga = duals.indices[ig];
      for (int j = 1; j <= 3; ++j)
        for (int b = 0; b < ga.a[j - 1]; ++b) T = c->D[j - 1] * T;
      M += coef * T;
    }
    c->duals_[duals.indices[ia]] = std::move(M);
  }
  return c;
}

const Mat& VContext::dual_matrix(const MultiIndex& alpha) const {
  auto it = duals_.find(alpha);
  if (it == duals_.end())
    throw std::invalid_argument("dual derivative order exceeds the built table");
  return it->second;
}

Vec VContext::pack(const CoeffStack& st) const {
  Vec v = Vec::Zero(packed_len);
  for (int lx = 0; lx <= std::min(xband_x2, st.band_x2()); ++lx) {
    const int d = lx + 1;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) v[offs[lx] + i * d + j] = st.block(lx)(i, j);
  }
  return v;
}

CoeffStack VContext::unpack(const Vec& v) const {
  CoeffStack st(xband_x2);
  for (int lx = 0; lx <= xband_x2; ++lx) {
    const int d = lx + 1;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) st.block(lx)(i, j) = v[offs[lx] + i * d + j];
  }
  return st;
}

Mat VContext::synth_rows(const QuadratureGrid& target) const {
  Mat S(target.node_count(), packed_len);
  for (int lx = 0; lx <= xband_x2; ++lx) {
    const Mat& T = target.dense_block(lx);
    S.middleCols(offs[lx], (lx + 1) * (lx + 1)) = double(lx + 1) * T.conjugate();
  }
  return S;
}

Vec VContext::synth_row_at(const GroupElement& x) const {
  Vec v(packed_len);
  for (int lx = 0; lx <= xband_x2; ++lx) {
    Mat t = wigner_matrix(lx, x);
    const int d = lx + 1;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) v[offs[lx] + i * d + j] = double(lx + 1) * std::conj(t(i, j));
  }
  return v;
}

VCtxPtr shared_vcontext(const GridPtr& grid, int xband_x2) {
  static std::map<std::tuple<int, int, int, int>, VCtxPtr> registry;
  const GridSpec& s = grid->spec();
  const auto key = std::make_tuple(s.n_phi, s.n_theta, s.n_psi, xband_x2);
  auto it = registry.find(key);
  if (it != registry.end()) return it->second;
  VCtxPtr c = VContext::make(grid, xband_x2);
  registry.emplace(key, c);
  return c;
}

VaryingSymbol vs_from_invariant(const VCtxPtr& ctx, const InvariantSymbol& s, int xi_max_x2) {
  if (xi_max_x2 < 0) xi_max_x2 = s.band_x2();
  VaryingSymbol out(ctx);
  for (int x = 0; x <= std::min(xi_max_x2, s.band_x2()); ++x) {
    const int d = x + 1;
    Mat B = Mat::Zero(ctx->packed_len, d * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) B(0, i * d + j) = s.block(x)(i, j);
    out.blocks[x] = std::move(B);
  }
  return out;
}

VaryingSymbol vs_mult_function(const VCtxPtr& ctx, const CoeffStack& f, int xi_max_x2) {
  if (f.band_x2() > ctx->xband_x2)
    throw NumericalError("multiplier band exceeds the context x-band");
  const Vec fp = ctx->pack(f);
  VaryingSymbol out(ctx);
  for (int x = 0; x <= xi_max_x2; ++x) {
    const int d = x + 1;
    Mat B = Mat::Zero(ctx->packed_len, d * d);
    for (int i = 0; i < d; ++i) B.col(i * d + i) = fp;
    out.blocks[x] = std::move(B);
  }
  return out;
}

VaryingSymbol vs_lc(const std::vector<std::pair<cplx, const VaryingSymbol*>>& terms) {
  if (terms.empty()) throw std::invalid_argument("vs_lc: empty combination");
  VaryingSymbol out(terms[0].second->ctx);
  for (const auto& [c, s] : terms) check_same_context(*terms[0].second, *s, "vs_lc");
  for (const auto& [x, B0] : terms[0].second->blocks) {
    bool shared = true;
    for (const auto& [c, s] : terms)
      if (!s->blocks.count(x)) shared = false;
    if (!shared) continue;
    Mat B = Mat::Zero(B0.rows(), B0.cols());
    for (const auto& [c, s] : terms) B += c * s->blocks.at(x);
    out.blocks[x] = std::move(B);
  }
  return out;
}

VaryingSymbol vs_scale(const VaryingSymbol& s, cplx c) {
  VaryingSymbol out(s.ctx);
  for (const auto& [x, B] : s.blocks) out.blocks[x] = c * B;
  return out;
}

namespace {

VaryingSymbol vs_channel(const VaryingSymbol& s, int iu, int iv) {
  VaryingSymbol out(s.ctx);
  for (const auto& [x, B] : s.blocks) {
    auto up_it = s.blocks.find(x + 1);
    if (up_it == s.blocks.end()) continue;  // top key: gather leaves the band
    const Mat& up = up_it->second;
    const Mat* lo = nullptr;
    auto lo_it = s.blocks.find(x - 1);
    if (lo_it != s.blocks.end()) lo = &lo_it->second;
    const int d = x + 1;
    Mat O = Mat::Zero(B.rows(), d * d);
    for (int ia = 0; ia < d; ++ia)
      for (int ib = 0; ib < d; ++ib) {
        auto [wp, wm] = product_weights(iu, iv, x, ia, ib);
        O.col(ia * d + ib) += wp * up.col((ia + iu) * (d + 1) + (ib + iv));
        if (lo && wm != 0.0) {
          const int ja = ia + iu - 1;
          const int jb = ib + iv - 1;
          if (0 <= ja && ja <= x - 1 && 0 <= jb && jb <= x - 1)
            O.col(ia * d + ib) += wm * lo->col(ja * x + jb);
        }
      }
    out.blocks[x] = std::move(O);
  }
  return out;
}

}  // namespace

VaryingSymbol vs_difference(const VaryingSymbol& s, int channel) {
  switch (channel) {
    case +1: return vs_scale(vs_channel(s, 1, 0), -1.0);
    case -1: return vs_scale(vs_channel(s, 0, 1), -1.0);
    case 0: {
      VaryingSymbol a = vs_channel(s, 1, 1);
      VaryingSymbol b = vs_channel(s, 0, 0);
      return vs_lc({{1.0, &a}, {-1.0, &b}});
    }
    default:
      throw std::invalid_argument("difference channel must be +1, -1 or 0");
  }
}

VaryingSymbol vs_multi_difference(const VaryingSymbol& s, const MultiIndex& alpha) {
  VaryingSymbol out = s;
  for (int k = 0; k < alpha.a[0]; ++k) out = vs_difference(out, +1);
  for (int k = 0; k < alpha.a[1]; ++k) out = vs_difference(out, -1);
  for (int k = 0; k < alpha.a[2]; ++k) out = vs_difference(out, 0);
  return out;
}

VaryingSymbol vs_dual_derivative(const VaryingSymbol& s, const MultiIndex& alpha) {
  const Mat& M = s.ctx->dual_matrix(alpha);
  VaryingSymbol out(s.ctx);
  for (const auto& [x, B] : s.blocks) out.blocks[x] = M * B;
  return out;
}

VaryingSymbol vs_x_derivative(const VaryingSymbol& s, const MultiIndex& beta) {
  VaryingSymbol out = s;
  for (int j = 1; j <= 3; ++j)
    for (int k = 0; k < beta.a[j - 1]; ++k) {
      VaryingSymbol next(out.ctx);
      for (const auto& [x, B] : out.blocks) next.blocks[x] = out.ctx->D[j - 1] * B;
      out = std::move(next);
    }
  return out;
}

VaryingSymbol vs_product(const VaryingSymbol& a, const VaryingSymbol& b) {
  check_same_context(a, b, "vs_product");
  const VCtxPtr& ctx = a.ctx;
  VaryingSymbol out(ctx);
  const int N = ctx->grid->node_count();
  for (const auto& [x, VA] : a.blocks) {
    auto itb = b.blocks.find(x);
    if (itb == b.blocks.end()) continue;
    const int d = x + 1;
    Mat At = (ctx->SY * VA).transpose();            // d^2 x N
    Mat Bt = (ctx->SY * itb->second).transpose();   // d^2 x N
    Mat Pt(d * d, N);
    for (int r = 0; r < N; ++r) {
      CMapRM ma(At.col(r).data(), d, d);
      CMapRM mb(Bt.col(r).data(), d, d);
      MapRM mp(Pt.col(r).data(), d, d);
      mp.noalias() = ma * mb;
    }
    out.blocks[x] = ctx->AN * Pt.transpose();
  }
  return out;
}

VaryingSymbol vs_conj_transpose(const VaryingSymbol& s) {
  const VCtxPtr& ctx = s.ctx;
  VaryingSymbol out(ctx);
  for (const auto& [x, V] : s.blocks) {
    const int d = x + 1;
    Mat nodal = ctx->SY * V;  // N x d^2
    Mat swapped(nodal.rows(), nodal.cols());
    for (int ia = 0; ia < d; ++ia)
      for (int ib = 0; ib < d; ++ib)
        swapped.col(ia * d + ib) = nodal.col(ib * d + ia).conjugate();
    out.blocks[x] = ctx->AN * swapped;
  }
  return out;
}

Mat vs_nodal_block(const VaryingSymbol& s, int xi_x2) { return s.ctx->SY * s.blocks.at(xi_x2); }

VaryingSymbol vs_from_nodal(const VCtxPtr& ctx, const std::map<int, Mat>& nodal) {
  VaryingSymbol out(ctx);
  for (const auto& [x, M] : nodal) out.blocks[x] = ctx->AN * M;
  return out;
}

double vs_sup_norm(const VaryingSymbol& s, int xi_x2, int node_stride) {
  auto it = s.blocks.find(xi_x2);
  if (it == s.blocks.end()) throw std::invalid_argument("vs_sup_norm: block not present");
  const int d = xi_x2 + 1;
  Mat Vt = (s.ctx->SY * it->second).transpose();  // d^2 x N
  double sup = 0.0;
  for (int r = 0; r < Vt.cols(); r += node_stride) {
    CMapRM m(Vt.col(r).data(), d, d);
    Eigen::JacobiSVD<Mat> svd(m);
    if (svd.singularValues().size() > 0) sup = std::max(sup, svd.singularValues()[0]);
  }
  return sup;
}

Vec vs_quantize(const VaryingSymbol& s, const CoeffStack& f, const QuadratureGrid& target) {
  const VCtxPtr& ctx = s.ctx;
  const int Nt = target.node_count();
  Mat SY2 = ctx->synth_rows(target);
  Vec out = Vec::Zero(Nt);
  for (const auto& [x, V] : s.blocks) {
    if (x > f.band_x2()) continue;
    const int d = x + 1;
    const Mat& C = f.block(x);
    Mat Vt = (SY2 * V).transpose();       // d^2 x Nt
    Mat Tt = entry_tab_t(target, x);      // d^2 x Nt
    for (int r = 0; r < Nt; ++r) {
      CMapRM sig(Vt.col(r).data(), d, d);
      Mat sc = sig * C;
      cplx acc = 0.0;
      for (int ia = 0; ia < d; ++ia)
        for (int ib = 0; ib < d; ++ib) acc += sc(ia, ib) * std::conj(Tt(ia * d + ib, r));
      out[r] += double(x + 1) * acc;
    }
  }
  return out;
}

std::vector<cplx> vs_quantize(const VaryingSymbol& s, const CoeffStack& f,
                              const std::vector<GroupElement>& points) {
  std::vector<cplx> out(points.size(), cplx(0.0));
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Vec row = s.ctx->synth_row_at(points[k]);
    cplx total = 0.0;
    for (const auto& [x, V] : s.blocks) {
      if (x > f.band_x2()) continue;
      const int d = x + 1;
      Vec flat = V.transpose() * row;  // d^2
      CMapRM sig(flat.data(), d, d);
      Mat sc = sig * f.block(x);
      Mat t = wigner_matrix(x, points[k]);
      total += double(x + 1) * (sc.array() * t.array().conjugate()).sum();
    }
    out[k] = total;
  }
  return out;
}

Symbol extract_symbol(const std::function<Vec(const Vec&)>& apply_op, const VCtxPtr& ctx,
                      int band_x2) {
  const QuadratureGrid& g = *ctx->grid;
  const int N = g.node_count();

  {
    std::mt19937_64 rng(20250816);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec u(N), v(N);
    for (int i = 0; i < N; ++i) {
      u[i] = cplx(gauss(rng), gauss(rng));
      v[i] = cplx(gauss(rng), gauss(rng));
    }
    Vec au = apply_op(u);
    Vec av = apply_op(v);
    Vec asum = apply_op(u + v);
    const double scale = au.cwiseAbs().maxCoeff() + av.cwiseAbs().maxCoeff() + 1.0;
    if ((asum - au - av).cwiseAbs().maxCoeff() > 1e-8 * scale)
      throw std::invalid_argument("extract_symbol: operator failed the linearity spot check");
  }

  std::map<int, Mat> nodal;
  bool invariant = true;
  InvariantSymbol inv(band_x2);
  for (int l = 0; l <= band_x2; ++l) {
    const int d = l + 1;
    const Mat& T = g.dense_block(l);
    Mat S = Mat::Zero(N, d * d);
    for (int n = 0; n < d; ++n)
      for (int k = 0; k < d; ++k) {
        Vec u = apply_op(T.col(n * d + k).conjugate());
        for (int m = 0; m < d; ++m)
          S.col(m * d + n) += T.col(m * d + k).cwiseProduct(u);
      }
    double sup = S.cwiseAbs().maxCoeff();
    for (int c = 0; c < d * d; ++c) {
      const cplx mean = S.col(c).mean();
      inv.block(l)(c / d, c % d) = mean;
      const double dev = (S.col(c).array() - mean).abs().maxCoeff();
      if (dev > 1e-9 * std::max(1.0, sup)) invariant = false;
    }
    nodal[l] = std::move(S);
  }
  if (invariant) return Symbol(std::move(inv));
  return Symbol(vs_from_nodal(ctx, nodal));
}

std::vector<cplx> quantize(const Symbol& s, const CoeffStack& f,
                           const std::vector<GroupElement>& points) {
  if (s.invariant()) return quantize(*s.inv, f, points);
  return vs_quantize(*s.var, f, points);
}

Vec quantize(const Symbol& s, const CoeffStack& f, const QuadratureGrid& g) {
  if (s.invariant()) return quantize(*s.inv, f, g);
  return vs_quantize(*s.var, f, g);
}

Symbol difference(const Symbol& s, int channel) {
  if (s.invariant()) return Symbol(difference(*s.inv, channel));
  return Symbol(vs_difference(*s.var, channel));
}

Symbol multi_difference(const Symbol& s, const MultiIndex& alpha) {
  if (s.invariant()) return Symbol(multi_difference(*s.inv, alpha));
  return Symbol(vs_multi_difference(*s.var, alpha));
}

Symbol x_derivative(const Symbol& s, const MultiIndex& beta) {
  if (s.invariant()) return Symbol(x_derivative(*s.inv, beta));
  return Symbol(vs_x_derivative(*s.var, beta));
}

}  // namespace su2pdo
