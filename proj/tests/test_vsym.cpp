#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "su2pdo/fourier.hpp"
#include "su2pdo/group.hpp"
#include "su2pdo/vsym.hpp"

using namespace su2pdo;

namespace {

std::vector<GroupElement> sample_points(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::vector<GroupElement> pts;
  for (int k = 0; k < n; ++k) pts.push_back(random_element(rng));
  return pts;
}

// d x d matrix at one node from a nodal block row (column index m*d + n).
Mat node_matrix(const Mat& nodal, int row, int d) {
  Mat m(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) m(a, b) = nodal(row, a * d + b);
  return m;
}

}  // namespace

TEST_CASE("shared contexts cache and their tables invert") {
  GridPtr g = quadrature_grid(4);
  VCtxPtr ctx = shared_vcontext(g, 4);
  CHECK(shared_vcontext(g, 4).get() == ctx.get());
  CHECK(shared_vcontext(g, 3).get() != ctx.get());

  CHECK(ctx->xband_x2 == 4);
  CHECK(ctx->packed_len == 55);  // sum of (lx+1)^2, lx <= 4
  CHECK(ctx->offs[1] == 1);
  CHECK(ctx->offs[4] == 30);
  CHECK(ctx->SY.rows() == g->node_count());
  CHECK(ctx->SY.cols() == 55);

  // analysis is a left inverse of synthesis on the packed band
  CHECK((ctx->AN * ctx->SY - Mat::Identity(55, 55)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((ctx->synth_rows(*g) - ctx->SY).cwiseAbs().maxCoeff() < 1e-12);

  std::mt19937_64 rng(31);
  CoeffStack f = random_stack(4, rng);
  CoeffStack back = ctx->unpack(ctx->pack(f));
  for (int l = 0; l <= 4; ++l)
    CHECK((back.block(l) - f.block(l)).cwiseAbs().maxCoeff() < 1e-14);

  // evaluating the packed series at a point matches synthesis
  GroupElement x = random_element(rng);
  cplx at_x = ctx->synth_row_at(x).transpose() * ctx->pack(f);
  CHECK(std::abs(at_x - synthesize(f, {x})[0]) < 1e-11);
}

TEST_CASE("embedded invariant symbols keep their action") {
  GridPtr g = quadrature_grid(4);
  VCtxPtr ctx = shared_vcontext(g, 4);
  auto s = builtin_symbol("D0", 6);
  VaryingSymbol v = vs_from_invariant(ctx, s);
  CHECK(v.top_key() == 6);
  CHECK(vs_from_invariant(ctx, s, 3).top_key() == 3);

  for (int xi : {1, 4, 6}) {
    Mat nodal = vs_nodal_block(v, xi);
    int d = xi + 1;
    for (int row : {0, 1234, g->node_count() - 1})
      CHECK((node_matrix(nodal, row, d) - s.block(xi)).cwiseAbs().maxCoeff() < 1e-12);
  }

  std::mt19937_64 rng(32);
  CoeffStack f = random_stack(5, rng);
  auto pts = sample_points(8, 33);
  auto via_inv = quantize(s, f, pts);
  auto via_var = vs_quantize(v, f, pts);
  for (size_t k = 0; k < pts.size(); ++k) CHECK(std::abs(via_var[k] - via_inv[k]) < 1e-10);
}

TEST_CASE("multiplication symbols reproduce pointwise products") {
  GridPtr g = quadrature_grid(4);
  VCtxPtr ctx = shared_vcontext(g, 4);
  CoeffStack q0 = q_function(0);
  VaryingSymbol v = vs_mult_function(ctx, q0, 5);
  CHECK(v.top_key() == 5);

  std::mt19937_64 rng(34);
  CoeffStack f = random_stack(3, rng);
  auto pts = sample_points(10, 35);
  auto fv = synthesize(f, pts);
  auto qv = synthesize(q0, pts);
  auto got = vs_quantize(v, f, pts);
  for (size_t k = 0; k < pts.size(); ++k) CHECK(std::abs(got[k] - qv[k] * fv[k]) < 1e-9);

  Vec nodal = vs_quantize(v, f, *g);
  Vec qn = synthesize(q0, *g);
  Vec fn = synthesize(f, *g);
  CHECK((nodal - qn.cwiseProduct(fn)).cwiseAbs().maxCoeff() < 1e-10);

  // multiplier band above the context x-band is refused
  CoeffStack wide = random_stack(5, rng);
  CHECK_THROWS_AS(vs_mult_function(ctx, wide, 5), NumericalError);
}

TEST_CASE("products multiply nodally and respect context identity") {
  GridPtr g = quadrature_grid(4);
  VCtxPtr ctx = shared_vcontext(g, 4);
  VaryingSymbol a = vs_mult_function(ctx, q_function(0), 4);
  VaryingSymbol b = vs_from_invariant(ctx, builtin_symbol("D0", 4));

  VaryingSymbol ab = vs_product(a, b);
  for (int xi : {0, 2, 4}) {
    int d = xi + 1;
    Mat na = vs_nodal_block(a, xi), nb = vs_nodal_block(b, xi), nab = vs_nodal_block(ab, xi);
    for (int row : {7, 901, 3100}) {
      Mat want = node_matrix(na, row, d) * node_matrix(nb, row, d);
      CHECK((node_matrix(nab, row, d) - want).cwiseAbs().maxCoeff() < 1e-11);
    }
  }

  VCtxPtr other = shared_vcontext(g, 3);
  VaryingSymbol c = vs_from_invariant(other, builtin_symbol("I", 4));
  CHECK_THROWS_AS(vs_product(a, c), std::invalid_argument);

  // conjugate transpose acts per node; on a real multiplier pair it swaps ladders
  VaryingSymbol dp = vs_from_invariant(ctx, builtin_symbol("D+", 4));
  VaryingSymbol dm = vs_conj_transpose(dp);
  for (int xi : {1, 3}) {
    Mat got = vs_nodal_block(dm, xi);
    int d = xi + 1;
    CHECK((node_matrix(got, 100, d) - builtin_block("D-", xi)).cwiseAbs().maxCoeff() < 1e-12);
  }

  // linear combinations act on the packed data over the shared key range
  VaryingSymbol lc2 = vs_lc({{2.0, &a}, {-1.0, &a}});
  CHECK(lc2.top_key() == 4);
  for (int xi = 0; xi <= 4; ++xi)
    CHECK((lc2.blocks.at(xi) - a.blocks.at(xi)).cwiseAbs().maxCoeff() < 1e-13);
  VaryingSymbol sc = vs_scale(a, cplx(0.0, 2.0));
  CHECK((sc.blocks.at(2) - cplx(0.0, 2.0) * a.blocks.at(2)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("differences of embedded symbols match the invariant path") {
  GridPtr g = quadrature_grid(4);
  VCtxPtr ctx = shared_vcontext(g, 4);
  auto lap = builtin_symbol("Lap", 8);
  VaryingSymbol v = vs_from_invariant(ctx, lap);

  for (int ch : {+1, -1, 0}) {
    VaryingSymbol dv = vs_difference(v, ch);
    CHECK(dv.top_key() == 7);  // top key dropped: its gather leaves the band
    auto di = difference(lap, ch);
    for (int xi : {0, 3, 7}) {
      int d = xi + 1;
      Mat nodal = vs_nodal_block(dv, xi);
      for (int row : {11, 2048})
        CHECK((node_matrix(nodal, row, d) - di.block(xi)).cwiseAbs().maxCoeff() < 1e-11);
    }
  }

  VaryingSymbol m = vs_multi_difference(v, MultiIndex{{1, 1, 0}});
  VaryingSymbol it = vs_difference(vs_difference(v, +1), -1);
  CHECK(m.top_key() == it.top_key());
  for (auto& [xi, blk] : m.blocks)
    CHECK((blk - it.blocks.at(xi)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("x derivatives of a multiplier differentiate the multiplied function") {
  GridPtr g = quadrature_grid(4);
  VCtxPtr ctx = shared_vcontext(g, 4);
  CoeffStack q0 = q_function(0);
  VaryingSymbol v = vs_mult_function(ctx, q0, 4);

  VaryingSymbol dv = vs_x_derivative(v, MultiIndex{{0, 0, 1}});
  Mat nodal = vs_nodal_block(dv, 0);
  for (int row : {0, 500, 2222}) {
    GroupElement x = g->node(row);
    cplx want = cplx(0.0, 1.0) * std::real(x.a);  // A3 (a - conj a) = i Re a
    CHECK(std::abs(nodal(row, 0) - want) < 1e-10);
  }

  // and agrees with multiplying by the differentiated function
  VaryingSymbol w = vs_mult_function(ctx, x_derivative_stack(q0, 3), 4);
  for (int xi = 0; xi <= 4; ++xi)
    CHECK((dv.blocks.at(xi) - w.blocks.at(xi)).cwiseAbs().maxCoeff() < 1e-10);

  // x-constant symbols are killed by any dual derivative of positive order
  VaryingSymbol c = vs_from_invariant(ctx, builtin_symbol("Lap", 4));
  for (MultiIndex al : {MultiIndex{{1, 0, 0}}, MultiIndex{{0, 1, 1}}}) {
    VaryingSymbol dc = vs_dual_derivative(c, al);
    for (int xi = 0; xi <= 4; ++xi) CHECK(dc.blocks.at(xi).cwiseAbs().maxCoeff() < 1e-9);
  }
  CHECK_THROWS_AS(ctx->dual_matrix(MultiIndex{{2, 2, 0}}), std::invalid_argument);
}

TEST_CASE("packed dual matrices solve the inversion pairing") {
  GridPtr g = quadrature_grid(4);
  VCtxPtr ctx = shared_vcontext(g, 4);
  Vec at_e = ctx->synth_row_at(identity_element());

  auto idx = multi_indices(2);
  for (const MultiIndex& al : idx)
    for (const MultiIndex& be : idx) {
      double sgn = (be.order() % 2) ? -1.0 : 1.0;
      Vec packed = ctx->pack(q_monomial(be));
      cplx val = at_e.transpose() * (ctx->dual_matrix(al) * (sgn * packed));
      double want = (al == be) ? al.factorial() : 0.0;
      CHECK(std::abs(val - want) < 1e-8);
    }
}

TEST_CASE("sup norms agree with dense per-node spectra") {
  GridPtr g = quadrature_grid(4);
  VCtxPtr ctx = shared_vcontext(g, 4);
  CoeffStack q0 = q_function(0), qp = q_function(+1);
  CoeffStack mix = lc({{1.0, &q0}, {cplx(0, 0.5), &qp}});
  VaryingSymbol v = vs_mult_function(ctx, mix, 3);

  const int xi = 2, d = 3;
  Mat nodal = vs_nodal_block(v, xi);
  double dense = 0;
  for (int row = 0; row < nodal.rows(); ++row) {
    Eigen::JacobiSVD<Mat> svd(node_matrix(nodal, row, d));
    dense = std::max(dense, svd.singularValues()[0]);
  }
  CHECK(std::abs(vs_sup_norm(v, xi, 1) - dense) < 1e-10);
  CHECK(vs_sup_norm(v, xi, 7) <= dense + 1e-12);
  CHECK_THROWS_AS(vs_sup_norm(v, 9, 1), std::invalid_argument);
}

TEST_CASE("nodal round trip preserves band-limited symbols") {
  GridPtr g = quadrature_grid(4);
  VCtxPtr ctx = shared_vcontext(g, 4);
  VaryingSymbol v = vs_mult_function(ctx, q_function(+1), 3);

  std::map<int, Mat> nodal;
  for (int xi = 0; xi <= 3; ++xi) nodal[xi] = vs_nodal_block(v, xi);
  VaryingSymbol back = vs_from_nodal(ctx, nodal);
  for (int xi = 0; xi <= 3; ++xi)
    CHECK((back.blocks.at(xi) - v.blocks.at(xi)).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("extraction recovers symbols and detects their layout") {
  GridPtr g = quadrature_grid(4);
  VCtxPtr ctx = shared_vcontext(g, 4);
  const int band = 4;

  Symbol ident = extract_symbol([](const Vec& v) { return v; }, ctx, band);
  REQUIRE(ident.invariant());
  for (int l = 0; l <= band; ++l)
    CHECK((ident.inv->block(l) - Mat::Identity(l + 1, l + 1)).cwiseAbs().maxCoeff() < 1e-9);

  auto d0 = builtin_symbol("D0", band);
  auto d0_op = [&](const Vec& v) { return quantize(d0, analyze(*g, v, band), *g); };
  Symbol got = extract_symbol(d0_op, ctx, band);
  REQUIRE(got.invariant());
  for (int l = 0; l <= band; ++l)
    CHECK((got.inv->block(l) - d0.block(l)).cwiseAbs().maxCoeff() < 1e-9);

  Vec q0n = synthesize(q_function(0), *g);
  auto mult_op = [&](const Vec& v) -> Vec { return q0n.cwiseProduct(v); };
  Symbol vm = extract_symbol(mult_op, ctx, band);
  REQUIRE(!vm.invariant());
  std::mt19937_64 rng(36);
  CoeffStack f = random_stack(3, rng);
  auto pts = sample_points(8, 37);
  auto fv = synthesize(f, pts);
  auto qv = synthesize(q_function(0), pts);
  auto act = quantize(vm, f, pts);
  for (size_t k = 0; k < pts.size(); ++k) CHECK(std::abs(act[k] - qv[k] * fv[k]) < 1e-8);

  auto square_op = [](const Vec& v) -> Vec { return v.cwiseProduct(v); };
  CHECK_THROWS_AS(extract_symbol(square_op, ctx, band), std::invalid_argument);
}
