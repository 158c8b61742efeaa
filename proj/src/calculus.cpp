#include "su2pdo/calculus.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "su2pdo/wigner.hpp"

namespace su2pdo {

namespace {

using RMMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<RMMat>;
using CMapRM = Eigen::Map<const RMMat>;

constexpr double kCondGate = 1e12;

Mat gated_inverse(const Mat& m, const char* what) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  const double cond = smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
  if (!(cond < kCondGate)) {
    std::ostringstream os;
    os << what << ": block inversion fails the ellipticity gate (condition number " << cond
       << ")";
    throw NumericalError(os.str());
  }
  return svd.solve(Mat::Identity(m.rows(), m.cols()));
}

InvariantSymbol invert_invariant(const InvariantSymbol& s) {
  InvariantSymbol out(s.band_x2());
  for (int l = 0; l <= s.band_x2(); ++l) out.block(l) = gated_inverse(s.block(l), "parametrix");
  return out;
}

VaryingSymbol invert_varying(const VaryingSymbol& s) {
  const VCtxPtr& ctx = s.ctx;
  VaryingSymbol out(ctx);
  const int N = ctx->grid->node_count();
  for (const auto& [x, V] : s.blocks) {
    const int d = x + 1;
    Mat Vt = (ctx->SY * V).transpose();  // d^2 x N
    Mat It(d * d, N);
    for (int r = 0; r < N; ++r) {
      CMapRM m(Vt.col(r).data(), d, d);
      MapRM mi(It.col(r).data(), d, d);
      mi = gated_inverse(m, "parametrix");
    }
    out.blocks[x] = ctx->AN * It.transpose();
  }
  return out;
}

double lambda_of(int l_x2) {
  const double hl = 0.5 * l_x2;
  return hl * (hl + 1.0);
}

InvariantSymbol add_invariant(const std::vector<std::pair<cplx, const InvariantSymbol*>>& ts) {
  std::vector<std::pair<cplx, const CoeffStack*>> raw;
  raw.reserve(ts.size());
  for (const auto& [c, s] : ts) raw.push_back({c, &s->blocks});
  return InvariantSymbol(lc(raw));
}

InvariantSymbol product_invariant(const InvariantSymbol& a, const InvariantSymbol& b) {
  const int band = std::min(a.band_x2(), b.band_x2());
  InvariantSymbol out(band);
  for (int l = 0; l <= band; ++l) out.block(l) = a.block(l) * b.block(l);
  return out;
}

}  // namespace

Symbol SymbolExpansion::total() const {
  if (terms.empty()) throw std::invalid_argument("empty symbol expansion");
  bool allinv = true;
  for (const auto& t : terms)
    if (!t.symbol.invariant()) allinv = false;
  if (allinv) {
    std::vector<std::pair<cplx, const InvariantSymbol*>> ts;
    for (const auto& t : terms) ts.push_back({1.0, &*t.symbol.inv});
    return Symbol(add_invariant(ts));
  }
  VCtxPtr ctx;
  for (const auto& t : terms)
    if (!t.symbol.invariant()) ctx = t.symbol.var->ctx;
  std::vector<VaryingSymbol> hold;
  hold.reserve(terms.size());
  int top = -1;
  for (const auto& t : terms)
    if (!t.symbol.invariant()) top = std::max(top, t.symbol.var->top_key());
  for (const auto& t : terms)
    hold.push_back(t.symbol.invariant() ? vs_from_invariant(ctx, *t.symbol.inv, top)
                                        : *t.symbol.var);
  std::vector<std::pair<cplx, const VaryingSymbol*>> ts;
  for (const auto& h : hold) ts.push_back({1.0, &h});
  return Symbol(vs_lc(ts));
}

Symbol compose(const Symbol& a, const Symbol& b, int order) {
  if (a.invariant() && b.invariant())
    return Symbol(product_invariant(*a.inv, *b.inv));
  VCtxPtr ctx = a.invariant() ? b.var->ctx : a.var->ctx;
  if (!a.invariant() && !b.invariant() && a.var->ctx.get() != b.var->ctx.get())
    throw std::invalid_argument("compose: symbols live on different contexts");
  const VaryingSymbol va =
      a.invariant() ? vs_from_invariant(ctx, *a.inv, a.inv->band_x2()) : *a.var;
  const VaryingSymbol vb =
      b.invariant() ? vs_from_invariant(ctx, *b.inv, b.inv->band_x2()) : *b.var;
  const bool b_invariant = b.invariant();
  VaryingSymbol out;
  bool first = true;
  for (const MultiIndex& alpha : multi_indices(order)) {
    if (b_invariant && alpha.order() > 0) break;  // dual derivatives of a constant vanish
    const double cf = 1.0 / double(alpha.factorial());
    VaryingSymbol term =
        vs_product(vs_multi_difference(va, alpha), vs_dual_derivative(vb, alpha));
    if (first) {
      out = vs_scale(term, cf);
      first = false;
    } else {
      out = vs_lc({{1.0, &out}, {cf, &term}});
    }
  }
  return Symbol(out);
}

Symbol adjoint_symbol(const Symbol& a, int order) {
  if (a.invariant()) {
    InvariantSymbol out(a.inv->band_x2());
    for (int l = 0; l <= a.inv->band_x2(); ++l) out.block(l) = a.inv->block(l).adjoint();
    return Symbol(out);
  }
  const VaryingSymbol h = vs_conj_transpose(*a.var);
  VaryingSymbol out;
  bool first = true;
  for (const MultiIndex& alpha : multi_indices(order)) {
    const double cf = 1.0 / double(alpha.factorial());
    VaryingSymbol term = vs_multi_difference(vs_dual_derivative(h, alpha), alpha);
    if (first) {
      out = vs_scale(term, cf);
      first = false;
    } else {
      out = vs_lc({{1.0, &out}, {cf, &term}});
    }
  }
  return Symbol(out);
}

SymbolExpansion parametrix(const Symbol& a, int order) {
  SymbolExpansion e;
  e.terms.push_back({0, a});
  e.truncation = order;
  return parametrix(e, order);
}

SymbolExpansion parametrix(const SymbolExpansion& a, int order) {
  if (a.terms.empty()) throw std::invalid_argument("parametrix: empty input expansion");
  const Symbol* lead = nullptr;
  for (const auto& t : a.terms)
    if (t.order_hint == 0) lead = &t.symbol;
  if (!lead) throw std::invalid_argument("parametrix: no leading (order 0) term");

  bool allinv = true;
  for (const auto& t : a.terms)
    if (!t.symbol.invariant()) allinv = false;

  SymbolExpansion out;
  out.truncation = order;

  if (allinv) {
    InvariantSymbol b0 = invert_invariant(*lead->inv);
    std::vector<InvariantSymbol> B{b0};
    for (int n = 1; n <= order; ++n) {
      InvariantSymbol acc(b0.band_x2());
      // Dual derivatives of invariant terms vanish, so only |gamma| = 0
      // survives: B_n = -(sum_{j+k=n, j>=1} B_k A_j) B_0.
      for (const auto& t : a.terms) {
        const int j = t.order_hint;
        if (j < 1 || j > n) continue;
        const int k = n - j;
        if (k >= n) continue;
        InvariantSymbol p = product_invariant(B[k], *t.symbol.inv);
        acc = add_invariant({{1.0, &acc}, {1.0, &p}});
      }
      InvariantSymbol bn = product_invariant(acc, b0);
      for (int l = 0; l <= bn.band_x2(); ++l) bn.block(l) = -bn.block(l);
      B.push_back(bn);
    }
    for (int n = 0; n <= order; ++n) out.terms.push_back({n, Symbol(B[n])});
    return out;
  }

  VCtxPtr ctx;
  for (const auto& t : a.terms)
    if (!t.symbol.invariant()) ctx = t.symbol.var->ctx;
  int top = -1;
  for (const auto& t : a.terms)
    if (!t.symbol.invariant()) top = std::max(top, t.symbol.var->top_key());
  std::vector<std::pair<int, VaryingSymbol>> A;  // (order hint, embedded term)
  for (const auto& t : a.terms)
    A.push_back({t.order_hint, t.symbol.invariant()
                                   ? vs_from_invariant(ctx, *t.symbol.inv, top)
                                   : *t.symbol.var});
  const VaryingSymbol* lead_v = nullptr;
  for (const auto& [j, s] : A)
    if (j == 0) lead_v = &s;

  VaryingSymbol b0 = invert_varying(*lead_v);
  std::vector<VaryingSymbol> B{b0};
  const auto gammas = multi_indices(3);
  for (int n = 1; n <= order; ++n) {
    VaryingSymbol acc;
    bool first = true;
    bool matched_all = true;
    for (const auto& [j, Aj] : A) {
      for (int k = 0; k < n; ++k) {
        const int need = n - j - k;
        if (need < 0) continue;
        if (need == 0 && j == 0) continue;  // that term is B_n itself
        if (need > 3) {
          matched_all = false;
          continue;
        }
        for (const MultiIndex& ga : gammas) {
          if (ga.order() != need) continue;
          const double cf = 1.0 / double(ga.factorial());
          VaryingSymbol term =
              vs_product(vs_multi_difference(B[k], ga), vs_dual_derivative(Aj, ga));
          if (first) {
            acc = vs_scale(term, cf);
            first = false;
          } else {
            acc = vs_lc({{1.0, &acc}, {cf, &term}});
          }
        }
      }
    }
    if (!matched_all)
      throw NumericalError("parametrix: correction order exceeds the built dual tables (3)");
    if (first) throw NumericalError("parametrix: empty correction term");
    B.push_back(vs_scale(vs_product(acc, b0), -1.0));
  }
  for (int n = 0; n <= order; ++n) out.terms.push_back({n, Symbol(B[n])});
  return out;
}

double estimate_order(const Symbol& s, int lo_x2, int hi_x2) {
  std::vector<double> xs, ys;
  int candidates = 0;
  auto consider = [&](int x, double sup) {
    ++candidates;
    if (sup < 1e-300) return;
    const double hl = 0.5 * x;
    xs.push_back(0.5 * std::log1p(hl * (hl + 1.0)));
    ys.push_back(std::log(sup));
  };
  if (s.invariant()) {
    for (int x = lo_x2; x <= std::min(hi_x2, s.inv->band_x2()); ++x) {
      Eigen::JacobiSVD<Mat> svd(s.inv->block(x));
      consider(x, svd.singularValues().size() ? svd.singularValues()[0] : 0.0);
    }
  } else {
    for (const auto& [x, V] : s.var->blocks) {
      if (x < lo_x2 || x > hi_x2) continue;
      consider(x, vs_sup_norm(*s.var, x, 7));
    }
  }
  if (candidates < 4)
    throw NumericalError("estimate_order: need at least 4 blocks in the fit range");
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  if (xs.size() < 4)
    throw NumericalError("estimate_order: need at least 4 nonzero blocks in the fit range");
  const int n = static_cast<int>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

double bracket(int k) { return std::sqrt(1.0 + double(k) * double(k)); }

// Entrywise and blockwise suprema of one symbol block.
void block_sups(const Symbol& s, int x, double& entry_sup_1, std::vector<double>& entry_abs,
                double& op_sup) {
  const int d = x + 1;
  entry_abs.assign(d * d, 0.0);
  op_sup = 0.0;
  entry_sup_1 = 0.0;
  if (s.invariant()) {
    const Mat& b = s.inv->block(x);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) entry_abs[i * d + j] = std::abs(b(i, j));
    Eigen::JacobiSVD<Mat> svd(b);
    op_sup = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  } else {
    Mat nodal = vs_nodal_block(*s.var, x);  // N x d^2
    for (int c = 0; c < d * d; ++c) entry_abs[c] = nodal.col(c).cwiseAbs().maxCoeff();
    Mat Vt = nodal.transpose();
    for (int r = 0; r < Vt.cols(); ++r) {
      CMapRM m(Vt.col(r).data(), d, d);
      Eigen::JacobiSVD<Mat> svd(m);
      if (svd.singularValues().size()) op_sup = std::max(op_sup, svd.singularValues()[0]);
    }
  }
  for (double a : entry_abs) entry_sup_1 = std::max(entry_sup_1, a);
}

Symbol conjugate_any(const Symbol& s, const GroupElement& u) {
  if (s.invariant()) return Symbol(conjugate_symbol(*s.inv, u));
  const VCtxPtr& ctx = s.var->ctx;
  std::map<int, Mat> nodal;
  for (const auto& [x, V] : s.var->blocks) {
    const int d = x + 1;
    Mat t = wigner_matrix(x, u);
    Mat n0 = ctx->SY * V;
    Mat Vt = n0.transpose();  // d^2 x N
    Mat Ot(d * d, Vt.cols());
    for (int r = 0; r < Vt.cols(); ++r) {
      CMapRM m(Vt.col(r).data(), d, d);
      MapRM o(Ot.col(r).data(), d, d);
      o = t * m * t.adjoint();
    }
    nodal[x] = Ot.transpose();
  }
  return Symbol(vs_from_nodal(ctx, nodal));
}

std::vector<int> keys_of(const Symbol& s) {
  std::vector<int> ks;
  if (s.invariant()) {
    for (int x = 0; x <= s.inv->band_x2(); ++x) ks.push_back(x);
  } else {
    for (const auto& [x, V] : s.var->blocks) ks.push_back(x);
  }
  return ks;
}

void decay_rows(const Symbol& s, double m, int p_max, std::vector<DecayRow>& entry_rows,
                std::vector<DecayRow>& block_rows) {
  for (int x : keys_of(s)) {
    const int d = x + 1;
    double e1, op;
    std::vector<double> ea;
    block_sups(s, x, e1, ea, op);
    const double wm = std::pow(weight(x), -m);
    for (int p = 0; p <= p_max; ++p) {
      double sup = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          sup = std::max(sup, std::pow(bracket(i - j), p) * ea[i * d + j]);
      entry_rows.push_back({p, x, wm * sup});
    }
    block_rows.push_back({0, x, wm * op});
  }
}

}  // namespace

DecayReport decay_report(const Symbol& s, double m, int p_max,
                         const std::vector<GroupElement>& conjugators) {
  DecayReport rep;
  rep.m = m;
  decay_rows(s, m, p_max, rep.entry_rows, rep.block_rows);
  for (const GroupElement& u : conjugators) {
    Symbol cs = conjugate_any(s, u);
    rep.conjugated_entry_rows.emplace_back();
    rep.conjugated_block_rows.emplace_back();
    decay_rows(cs, m, p_max, rep.conjugated_entry_rows.back(), rep.conjugated_block_rows.back());
  }
  double s0 = 0.0, sp = 0.0;
  for (const auto& r : rep.entry_rows) {
    if (r.p == 0) s0 = std::max(s0, r.sup);
    if (r.p == p_max) sp = std::max(sp, r.sup);
  }
  rep.decaying = s0 == 0.0 || p_max == 0 ||
                 std::pow(sp / s0, 1.0 / p_max) <= 4.0;
  return rep;
}

CommutatorDiagnostics commutator_diagnostics(const InvariantSymbol& a, int lo_x2, int hi_x2) {
  CommutatorDiagnostics out;
  const char* names[3] = {"D+", "D-", "D0"};
  const InvariantSymbol gen[3] = {builtin_symbol("D+", a.band_x2()),
                                  builtin_symbol("D-", a.band_x2()),
                                  builtin_symbol("D0", a.band_x2())};
  for (int j = 0; j < 3; ++j) {
    InvariantSymbol c = a;
    for (int p = 1; p <= 3; ++p) {
      c = commutator(gen[j], c);
      double ord;
      try {
        ord = estimate_order(Symbol(c), lo_x2, hi_x2);
      } catch (const NumericalError&) {
        ord = -std::numeric_limits<double>::infinity();
      }
      out.iterated.push_back({names[j], p, ord});
    }
  }
  for (int j = 0; j < 3; ++j) {
    for (const MultiIndex& ga : multi_indices(2)) {
      if (ga.order() < 1) continue;
      InvariantSymbol dg = multi_difference(gen[j], ga);
      InvariantSymbol prod = product_invariant(dg, a);
      double ord;
      try {
        ord = estimate_order(Symbol(prod), lo_x2, hi_x2);
      } catch (const NumericalError&) {
        ord = -std::numeric_limits<double>::infinity();
      }
      std::ostringstream ch;
      ch << names[j] << " gamma=(" << ga.a[0] << "," << ga.a[1] << "," << ga.a[2] << ")";
      out.memberships.push_back({ch.str(), ga.order(), ord});
    }
  }
  return out;
}

CoeffStack solve_invariant(const InvariantSymbol& s, const CoeffStack& g) {
  if (s.band_x2() < g.band_x2())
    throw NumericalError("solve: operator symbol band is smaller than the data band");
  CoeffStack f(g.band_x2());
  for (int l = 0; l <= g.band_x2(); ++l)
    f.block(l) = gated_inverse(s.block(l), "solve") * g.block(l);
  return f;
}

CoeffStack apply_demo_operator(const CoeffStack& f) {
  CoeffStack h(f.band_x2());
  for (int l = 0; l <= f.band_x2(); ++l) h.block(l) = (1.0 + lambda_of(l)) * f.block(l);
  CoeffStack q0h = q_times(h, 0);
  return lc({{2.0, &h}, {cplx(0.0, -0.5), &q0h}});
}

VaryingSymbol demo_operator_symbol(const VCtxPtr& ctx, int xi_max_x2) {
  CoeffStack u = unit_stack();
  CoeffStack q0 = q_function(0);
  CoeffStack a = lc({{2.0, &u}, {cplx(0.0, -0.5), &q0}});
  VaryingSymbol ma = vs_mult_function(ctx, a, xi_max_x2);
  for (auto& [x, B] : ma.blocks) B *= (1.0 + lambda_of(x));
  return ma;
}

SolveResult solve_demo(const CoeffStack& g, int order, const VCtxPtr& ctx, int xi_max_x2,
                       const QuadratureGrid& transform_grid) {
  VaryingSymbol ma = demo_operator_symbol(ctx, xi_max_x2);
  SymbolExpansion px = parametrix(Symbol(ma), order);
  Symbol b = px.total();
  if (b.var->top_key() < g.band_x2())
    throw NumericalError("solve: parametrix band does not cover the data band");
  Vec f_nodal = vs_quantize(*b.var, g, transform_grid);
  const int f_band = g.band_x2() + ctx->xband_x2;
  CoeffStack f = analyze(transform_grid, f_nodal, f_band, f_band);
  CoeffStack af = apply_demo_operator(f);
  CoeffStack r = lc({{1.0, &af}, {-1.0, &g}});
  return SolveResult{std::move(f), stack_norm(r) / stack_norm(g)};
}

}  // namespace su2pdo
