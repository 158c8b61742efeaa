#include "su2pdo/check.hpp"

#include <cmath>
#include <random>

#include "su2pdo/calculus.hpp"
#include "su2pdo/fourier.hpp"
#include "su2pdo/group.hpp"
#include "su2pdo/stack.hpp"
#include "su2pdo/symbol.hpp"
#include "su2pdo/vsym.hpp"
#include "su2pdo/wigner.hpp"

namespace su2pdo::check {

namespace {

double check_representations() {
  std::mt19937_64 rng(101);
  double err = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    GroupElement x = random_element(rng);
    GroupElement y = random_element(rng);
    GroupElement xy = multiply(x, y);
    for (int l = 0; l <= 6; ++l) {
      Mat tx = wigner_matrix(l, x);
      Mat ty = wigner_matrix(l, y);
      Mat txy = wigner_matrix(l, xy);
      const int d = l + 1;
      err = std::max(err, (tx * tx.adjoint() - Mat::Identity(d, d)).cwiseAbs().maxCoeff());
      err = std::max(err, (txy - tx * ty).cwiseAbs().maxCoeff());
    }
  }
  return err;
}

double check_gram() {
  GridPtr g = quadrature_grid(4);
  RVec w = g->weights();
  double err = 0.0;
  for (int lx = 0; lx <= 4; ++lx) {
    const Mat& bx = g->dense_block(lx);
    for (int ly = lx; ly <= 4; ++ly) {
      const Mat& by = g->dense_block(ly);
      Mat c = by.adjoint() * (w.asDiagonal() * bx);
      c *= std::sqrt(double((lx + 1) * (ly + 1)));
      if (lx == ly) c -= Mat::Identity(c.rows(), c.cols());
      err = std::max(err, c.cwiseAbs().maxCoeff());
    }
  }
  return err;
}

double check_fourier() {
  std::mt19937_64 rng(202);
  GridPtr g = quadrature_grid(3);
  double err = 0.0;

  CoeffStack f = random_stack(3, rng);
  Vec vals = synthesize(f, *g);
  CoeffStack back = analyze(*g, vals, 3, 3);
  for (int l = 0; l <= 3; ++l)
    err = std::max(err, (back.block(l) - f.block(l)).cwiseAbs().maxCoeff());

  CoeffStack u = random_stack(3, rng);
  Vec uv = synthesize(u, *g);
  cplx quad = 0.0;
  for (int k = 0; k < g->node_count(); ++k) quad += g->weights()[k] * vals[k] * std::conj(uv[k]);
  err = std::max(err, std::abs(quad - parseval_inner(f, u)));

  // Convolution theorem against direct quadrature of (f*g)(x) at spot points.
  CoeffStack a = random_stack(1, rng);
  CoeffStack b = random_stack(1, rng);
  GridPtr g2 = quadrature_grid(2);
  const int n = g2->node_count();
  Vec av = synthesize(a, *g2);
  std::vector<GroupElement> pts;
  std::vector<GroupElement> shifted;
  for (int i = 0; i < 5; ++i) pts.push_back(random_element(rng));
  shifted.reserve(5 * n);
  for (const GroupElement& x : pts)
    for (int k = 0; k < n; ++k) shifted.push_back(multiply(inverse(g2->node(k)), x));
  std::vector<cplx> bv = synthesize(b, shifted);
  CoeffStack conv = convolve(a, b);
  std::vector<cplx> cv = synthesize(conv, pts);
  for (int i = 0; i < 5; ++i) {
    cplx direct = 0.0;
    for (int k = 0; k < n; ++k) direct += g2->weights()[k] * av[k] * bv[i * n + k];
    err = std::max(err, std::abs(direct - cv[i]));
  }
  return err;
}

double check_difference_identities() {
  const int band = 6;
  InvariantSymbol lap = builtin_symbol("Lap", band);
  InvariantSymbol id = builtin_symbol("I", band);
  InvariantSymbol dp = builtin_symbol("D+", band);
  InvariantSymbol dm = builtin_symbol("D-", band);
  InvariantSymbol d0 = builtin_symbol("D0", band);
  double err = 0.0;
  auto cmp = [&](const InvariantSymbol& got, const InvariantSymbol& want, double scale) {
    for (int l = 0; l + 1 <= band; ++l)
      err = std::max(err,
                     (got.block(l) - scale * want.block(l)).cwiseAbs().maxCoeff());
  };
  cmp(difference(lap, +1), dm, -1.0);
  cmp(difference(lap, -1), dp, -1.0);
  cmp(difference(lap, 0), d0, -2.0);
  cmp(difference(dp, +1), id, 1.0);
  cmp(difference(dm, -1), id, 1.0);
  cmp(difference(d0, 0), id, 1.0);
  InvariantSymbol z(band);
  cmp(difference(id, +1), z, 0.0);
  cmp(difference(id, -1), z, 0.0);
  cmp(difference(id, 0), z, 0.0);
  cmp(difference(dp, -1), z, 0.0);
  cmp(difference(dp, 0), z, 0.0);
  cmp(difference(dm, +1), z, 0.0);
  cmp(difference(dm, 0), z, 0.0);
  cmp(difference(d0, +1), z, 0.0);
  cmp(difference(d0, -1), z, 0.0);
  return err;
}

double check_commutators() {
  std::mt19937_64 rng(303);
  const int band = 6;
  InvariantSymbol d0 = builtin_symbol("D0", band);
  InvariantSymbol dp = builtin_symbol("D+", band);
  double err = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    InvariantSymbol s(random_stack(band, rng));
    InvariantSymbol c0 = commutator(d0, s);
    InvariantSymbol cp = commutator(dp, s);
    for (int l = 0; l <= band; ++l) {
      const int d = l + 1;
      const Mat& sb = s.block(l);
      const Mat& sp = dp.block(l);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          err = std::max(err, std::abs(c0.block(l)(i, j) - double(i - j) * sb(i, j)));
          cplx two = 0.0;
          if (i >= 1) two += sp(i, i - 1) * sb(i - 1, j);
          if (j + 1 < d) two -= sb(i, j + 1) * sp(j + 1, j);
          err = std::max(err, std::abs(cp.block(l)(i, j) - two));
        }
    }
  }
  return err;
}

double check_taylor_duality() {
  DualTable dt = dual_derivative_coeffs(2);
  const auto idx = multi_indices(2);
  double err = 0.0;
  for (size_t ia = 0; ia < idx.size(); ++ia) {
    for (size_t ib = 0; ib < idx.size(); ++ib) {
      CoeffStack xb = taylor_coordinate(idx[ib]);
      cplx val = 0.0;
      for (size_t ig = 0; ig < idx.size(); ++ig) {
        const cplx c = dt.coeffs(ia, ig);
        if (std::abs(c) < 1e-15) continue;
        val += c * synth_at_identity(x_derivative_power(xb, idx[ig]));
      }
      const double want = ia == ib ? double(idx[ia].factorial()) : 0.0;
      err = std::max(err, std::abs(val - want));
    }
  }
  return err;
}

double check_adjoint() {
  const int band = 6;
  double err = 0.0;
  Symbol adp = adjoint_symbol(Symbol(builtin_symbol("D+", band)), 2);
  InvariantSymbol dm = builtin_symbol("D-", band);
  for (int l = 0; l <= band; ++l)
    err = std::max(err, (adp.inv->block(l) - dm.block(l)).cwiseAbs().maxCoeff());

  std::mt19937_64 rng(404);
  CoeffStack f = random_stack(4, rng);
  CoeffStack g = random_stack(4, rng);
  CoeffStack df = apply_symbol(builtin_symbol("D+", 4), f);
  CoeffStack dg = apply_symbol(builtin_symbol("D-", 4), g);
  err = std::max(err, std::abs(parseval_inner(df, g) - parseval_inner(f, dg)));
  return err;
}

double check_compose() {
  std::mt19937_64 rng(505);
  double err = 0.0;

  // Invariant route: composition of invariant symbols is the block product.
  CoeffStack f = random_stack(4, rng);
  Symbol comp = compose(Symbol(builtin_symbol("D+", 4)), Symbol(builtin_symbol("D-", 4)), 1);
  CoeffStack via = apply_symbol(*comp.inv, f);
  CoeffStack seq = apply_symbol(builtin_symbol("D+", 4), apply_symbol(builtin_symbol("D-", 4), f));
  for (int l = 0; l <= 4; ++l)
    err = std::max(err, (via.block(l) - seq.block(l)).cwiseAbs().maxCoeff());

  // Varying route: D0 after multiplication by q0, truncation at the
  // differential order of the left factor.
  VCtxPtr ctx = VContext::make(quadrature_grid(4), 4);
  VaryingSymbol mq = vs_mult_function(ctx, q_function(0), 4);
  Symbol c2 = compose(Symbol(builtin_symbol("D0", 4)), Symbol(mq), 1);
  CoeffStack f2 = random_stack(2, rng);
  std::vector<GroupElement> pts;
  for (int i = 0; i < 4; ++i) pts.push_back(random_element(rng));
  std::vector<cplx> got = vs_quantize(*c2.var, f2, pts);
  CoeffStack seq2 = apply_symbol(builtin_symbol("D0", 3), q_times(f2, 0));
  std::vector<cplx> want = synthesize(seq2, pts);
  for (size_t i = 0; i < got.size(); ++i) err = std::max(err, std::abs(got[i] - want[i]));
  return err;
}

double check_conjugation() {
  const int band = 6;
  double err = 0.0;
  InvariantSymbol a1 = builtin_symbol("A1", band);
  InvariantSymbol a2 = builtin_symbol("A2", band);
  InvariantSymbol a3 = builtin_symbol("A3", band);
  InvariantSymbol c1 = conjugate_symbol(a3, basic_rotation(1, -1.5707963267948966));
  InvariantSymbol c2 = conjugate_symbol(a3, basic_rotation(2, 1.5707963267948966));
  for (int l = 0; l <= band; ++l) {
    err = std::max(err, (c1.block(l) - a1.block(l)).cwiseAbs().maxCoeff());
    err = std::max(err, (c2.block(l) - a2.block(l)).cwiseAbs().maxCoeff());
  }
  return err;
}

double check_order_estimates() {
  const int band = 32;
  double err = 0.0;
  err = std::max(err, std::abs(estimate_order(Symbol(builtin_symbol("I", band)), 4, 32) - 0.0));
  err = std::max(err, std::abs(estimate_order(Symbol(builtin_symbol("D+", band)), 4, 32) - 1.0));
  err = std::max(err, std::abs(estimate_order(Symbol(builtin_symbol("Lap", band)), 4, 32) - 2.0));
  return err;
}

bool check_decay(double& growth_out) {
  const int band = 16;
  DecayReport banded = decay_report(Symbol(builtin_symbol("Lap", band)), 2.0, 4, {});
  std::mt19937_64 rng(606);
  InvariantSymbol dense(random_stack(band, rng));
  DecayReport noisy = decay_report(Symbol(dense), 0.0, 4, {});
  double s0 = 0.0, sp = 0.0;
  for (const DecayRow& r : noisy.entry_rows) {
    if (r.p == 0) s0 = std::max(s0, r.sup);
    if (r.p == 4) sp = std::max(sp, r.sup);
  }
  growth_out = s0 > 0.0 ? std::pow(sp / s0, 0.25) : 0.0;
  return banded.decaying && !noisy.decaying;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "representations", "gram",           "fourier",   "difference-identities",
      "commutators",     "taylor-duality", "adjoint",   "compose",
      "conjugation",     "order-estimates", "decay",
  };
  return names;
}

std::vector<CheckResult> run_suite(const std::string& name) {
  if (name == "all") {
    std::vector<CheckResult> out;
    for (const std::string& s : suite_names()) {
      auto part = run_suite(s);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  double err = 0.0;
  double tol = 0.0;
  if (name == "representations") {
    err = check_representations();
    tol = 1e-9;
  } else if (name == "gram") {
    err = check_gram();
    tol = 1e-10;
  } else if (name == "fourier") {
    err = check_fourier();
    tol = 1e-8;
  } else if (name == "difference-identities") {
    err = check_difference_identities();
    tol = 1e-9;
  } else if (name == "commutators") {
    err = check_commutators();
    tol = 1e-10;
  } else if (name == "taylor-duality") {
    err = check_taylor_duality();
    tol = 1e-8;
  } else if (name == "adjoint") {
    err = check_adjoint();
    tol = 1e-9;
  } else if (name == "compose") {
    err = check_compose();
    tol = 1e-7;
  } else if (name == "conjugation") {
    err = check_conjugation();
    tol = 1e-9;
  } else if (name == "order-estimates") {
    err = check_order_estimates();
    tol = 0.1;
  } else if (name == "decay") {
    double growth = 0.0;
    const bool ok = check_decay(growth);
    return {{name, ok, growth}};
  } else {
    throw std::invalid_argument("unknown check suite: " + name);
  }
  return {{name, err <= tol, err}};
}

}  // namespace su2pdo::check
