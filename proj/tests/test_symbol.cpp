#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "su2pdo/fourier.hpp"
#include "su2pdo/group.hpp"
#include "su2pdo/symbol.hpp"

using namespace su2pdo;

namespace {

// Largest entry difference over the blocks both symbols carry, up to `top`.
double sym_err(const InvariantSymbol& a, const InvariantSymbol& b, int top) {
  double e = 0;
  for (int l = 0; l <= top; ++l) e = std::max(e, (a.block(l) - b.block(l)).cwiseAbs().maxCoeff());
  return e;
}

InvariantSymbol scaled(const InvariantSymbol& s, cplx c) {
  InvariantSymbol out = s;
  for (int l = 0; l <= out.band_x2(); ++l) out.block(l) *= c;
  return out;
}

InvariantSymbol random_symbol(int band_x2, std::mt19937_64& rng) {
  return InvariantSymbol(random_stack(band_x2, rng));
}

std::vector<GroupElement> sample_points(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::vector<GroupElement> pts;
  for (int k = 0; k < n; ++k) pts.push_back(random_element(rng));
  return pts;
}

}  // namespace

TEST_CASE("builtin blocks match their closed forms") {
  const cplx i1(0.0, 1.0);

  // spin-half and spin-one entries pinned by hand
  Mat d0 = builtin_block("D0", 1);
  CHECK(d0(0, 0) == cplx(-0.5));
  CHECK(d0(1, 1) == cplx(0.5));
  CHECK(std::abs(d0(0, 1)) + std::abs(d0(1, 0)) == 0.0);

  Mat dp = builtin_block("D+", 2);
  CHECK(std::abs(dp(1, 0) + std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(dp(2, 1) + std::sqrt(2.0)) < 1e-15);
  CHECK(dp.cwiseAbs().sum() == doctest::Approx(2 * std::sqrt(2.0)));

  Mat dm = builtin_block("D-", 2);
  CHECK((dm - dp.transpose()).cwiseAbs().maxCoeff() == 0.0);

  CHECK((builtin_block("Lap", 2) + 2.0 * Mat::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((builtin_block("I", 4) - Mat::Identity(5, 5)).cwiseAbs().maxCoeff() == 0.0);

  for (int l = 0; l <= 6; ++l) {
    Mat sp = builtin_block("D+", l), sm = builtin_block("D-", l), s0 = builtin_block("D0", l);
    Mat a1 = builtin_block("A1", l), a2 = builtin_block("A2", l), a3 = builtin_block("A3", l);
    CHECK((a1 + 0.5 * i1 * (sp + sm)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((sp - (i1 * a1 - a2)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((sm - (i1 * a1 + a2)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((s0 - i1 * a3).cwiseAbs().maxCoeff() < 1e-15);
    // anti-Hermitian frame summing to the Laplacian
    for (const Mat& a : {a1, a2, a3}) CHECK((a + a.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((a1 * a1 + a2 * a2 + a3 * a3 - builtin_block("Lap", l)).cwiseAbs().maxCoeff() < 1e-13);
  }

  CHECK_THROWS_AS(builtin_block("Lap2", 2), std::invalid_argument);
}

TEST_CASE("frame fields obey the right-handed bracket relations") {
  const int B = 8;
  auto A1 = builtin_symbol("A1", B), A2 = builtin_symbol("A2", B), A3 = builtin_symbol("A3", B);
  CHECK(sym_err(commutator(A1, A2), A3, B) < 1e-13);
  CHECK(sym_err(commutator(A2, A3), A1, B) < 1e-13);
  CHECK(sym_err(commutator(A3, A1), A2, B) < 1e-13);

  auto Dp = builtin_symbol("D+", B), Dm = builtin_symbol("D-", B), D0 = builtin_symbol("D0", B);
  CHECK(sym_err(commutator(Dp, Dm), scaled(D0, 2.0), B) < 1e-13);
  CHECK(sym_err(commutator(D0, Dp), Dp, B) < 1e-13);
  CHECK(sym_err(commutator(D0, Dm), scaled(Dm, -1.0), B) < 1e-13);
}

TEST_CASE("difference operators satisfy the closed identity family") {
  const int B = 8, top = B - 1;  // differences gather from l +- 1: interior is l <= B-1
  auto I = builtin_symbol("I", B + 1);
  const std::string gen[3] = {"D+", "D-", "D0"};
  const int chan[3] = {+1, -1, 0};

  for (int a = 0; a < 3; ++a) {
    for (int h = 0; h < 3; ++h) {
      auto d = difference(builtin_symbol(gen[h], B), chan[a]);
      CHECK(d.band_x2() == B + 1);
      if (a == h)
        CHECK(sym_err(d, I, top) < 1e-12);
      else
        CHECK(sym_err(d, InvariantSymbol(B + 1), top) < 1e-12);
    }
    CHECK(sym_err(difference(I, chan[a]), InvariantSymbol(B + 2), top) < 1e-12);
  }

  // second-order: each channel of the Laplacian symbol returns a first-order one
  auto Lap = builtin_symbol("Lap", B);
  CHECK(sym_err(difference(Lap, +1), scaled(builtin_symbol("D-", B + 1), -1.0), top) < 1e-12);
  CHECK(sym_err(difference(Lap, -1), scaled(builtin_symbol("D+", B + 1), -1.0), top) < 1e-12);
  CHECK(sym_err(difference(Lap, 0), scaled(builtin_symbol("D0", B + 1), -2.0), top) < 1e-12);

  std::mt19937_64 rng(71);
  auto s = random_symbol(B, rng);
  CHECK(sym_err(difference(difference(s, +1), -1), difference(difference(s, -1), +1), top) < 1e-10);

  // multi_difference applies the + channel first, then -, then 0
  auto m = multi_difference(s, MultiIndex{{1, 0, 2}});
  CHECK(m.band_x2() == B + 3);
  auto it = difference(difference(difference(s, +1), 0), 0);
  CHECK(sym_err(m, it, B + 3) == 0.0);
}

TEST_CASE("q functions match their matrix-entry closed forms") {
  for (int ch : {+1, -1, 0}) {
    CoeffStack q = q_function(ch);
    CHECK(q.band_x2() == 1);
    CHECK(q.block(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(synth_at_identity(q)) < 1e-15);
  }

  const cplx i1(0.0, 1.0);
  auto pts = sample_points(20, 902);
  auto vp = synthesize(q_function(+1), pts);
  auto vm = synthesize(q_function(-1), pts);
  auto v0 = synthesize(q_function(0), pts);
  for (size_t k = 0; k < pts.size(); ++k) {
    cplx a = pts[k].a, b = pts[k].b;
    CHECK(std::abs(vp[k] - (-i1 * b)) < 1e-13);
    CHECK(std::abs(vm[k] - (-i1 * std::conj(b))) < 1e-13);
    CHECK(std::abs(v0[k] - (a - std::conj(a))) < 1e-13);
  }

  // one-parameter subgroup: q0 along the psi axis
  for (double t : {0.3, 1.7, -2.2}) {
    auto v = synthesize(q_function(0), {basic_rotation(3, t)});
    CHECK(std::abs(v[0] - cplx(0.0, 2.0 * std::sin(t / 2))) < 1e-14);
  }
}

TEST_CASE("taylor coordinates are phase-rotated q monomials") {
  const cplx i1(0.0, 1.0);
  CoeffStack empty_mono = q_monomial(MultiIndex{});
  CoeffStack one = unit_stack();
  CHECK(stack_norm(lc({{1.0, &empty_mono}, {-1.0, &one}})) == 0.0);

  std::vector<MultiIndex> alphas = {{{1, 0, 0}}, {{0, 1, 0}}, {{0, 0, 1}}, {{1, 1, 0}},
                                    {{2, 0, 0}}, {{0, 1, 1}}, {{1, 1, 1}}};
  for (const MultiIndex& al : alphas) {
    CoeffStack tc = taylor_coordinate(al);
    CoeffStack qm = q_monomial(al);
    cplx phase = std::pow(i1, al.a[0]) * std::pow(-i1, al.a[1]);
    CHECK(tc.band_x2() == al.order());
    CHECK(stack_norm(lc({{1.0, &tc}, {-phase, &qm}})) < 1e-14);
  }

  auto pts = sample_points(12, 903);
  auto x12 = synthesize(taylor_coordinate(MultiIndex{{1, 0, 0}}), pts);
  auto x21 = synthesize(taylor_coordinate(MultiIndex{{0, 1, 0}}), pts);
  auto x3 = synthesize(taylor_coordinate(MultiIndex{{0, 0, 1}}), pts);
  auto xx = synthesize(taylor_coordinate(MultiIndex{{1, 1, 0}}), pts);
  for (size_t k = 0; k < pts.size(); ++k) {
    cplx a = pts[k].a, b = pts[k].b;
    CHECK(std::abs(x12[k] - b) < 1e-13);
    CHECK(std::abs(x21[k] + std::conj(b)) < 1e-13);
    CHECK(std::abs(x3[k] - (a - std::conj(a))) < 1e-13);
    CHECK(std::abs(xx[k] - x12[k] * x21[k]) < 1e-12);
  }
}

TEST_CASE("coefficient-space q multiplication is pointwise multiplication") {
  std::mt19937_64 rng(904);
  CoeffStack f = random_stack(3, rng);
  auto pts = sample_points(15, 905);
  auto fv = synthesize(f, pts);
  for (int ch : {+1, -1, 0}) {
    CoeffStack qf = q_times(f, ch);
    CHECK(qf.band_x2() == 4);
    auto qv = synthesize(q_function(ch), pts);
    auto got = synthesize(qf, pts);
    for (size_t k = 0; k < pts.size(); ++k) CHECK(std::abs(got[k] - qv[k] * fv[k]) < 1e-11);
  }
}

TEST_CASE("quantization acts blockwise on the coefficients") {
  std::mt19937_64 rng(906);
  CoeffStack f = random_stack(4, rng);
  auto pts = sample_points(10, 907);

  auto direct = synthesize(f, pts);
  auto through_id = quantize(builtin_symbol("I", 4), f, pts);
  for (size_t k = 0; k < pts.size(); ++k) CHECK(std::abs(through_id[k] - direct[k]) < 1e-13);

  // Laplacian scales block l by -l/2 (l/2 + 1)
  CoeffStack scaled_f = f;
  for (int l = 0; l <= 4; ++l) scaled_f.block(l) *= -0.5 * l * (0.5 * l + 1.0);
  auto lap_pts = quantize(builtin_symbol("Lap", 4), f, pts);
  auto want = synthesize(scaled_f, pts);
  for (size_t k = 0; k < pts.size(); ++k) CHECK(std::abs(lap_pts[k] - want[k]) < 1e-12);

  // lowest-weight spin-half character: an eigenfunction of the vertical derivative
  CoeffStack g(1);
  g.block(1)(0, 0) = 0.5;
  auto gv = synthesize(g, pts);
  for (size_t k = 0; k < pts.size(); ++k) CHECK(std::abs(gv[k] - pts[k].a) < 1e-14);
  auto d0g = quantize(builtin_symbol("D0", 1), g, pts);
  for (size_t k = 0; k < pts.size(); ++k) CHECK(std::abs(d0g[k] + 0.5 * gv[k]) < 1e-14);

  // grid overload agrees with the point overload at the nodes
  GridPtr grid = quadrature_grid(2);
  Vec nodal = quantize(builtin_symbol("Lap", 4), f, *grid);
  std::vector<GroupElement> probe_nodes;
  std::vector<int> picks = {0, 37, 259, grid->node_count() - 1};
  for (int k : picks) probe_nodes.push_back(grid->node(k));
  auto at_nodes = quantize(builtin_symbol("Lap", 4), f, probe_nodes);
  for (size_t k = 0; k < picks.size(); ++k) CHECK(std::abs(nodal[picks[k]] - at_nodes[k]) < 1e-12);
}

TEST_CASE("x derivatives of invariant symbols vanish") {
  std::mt19937_64 rng(908);
  auto s = random_symbol(5, rng);
  auto d = x_derivative(s, MultiIndex{{0, 1, 0}});
  CHECK(d.band_x2() == 5);
  for (int l = 0; l <= 5; ++l) CHECK(d.block(l).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sym_err(x_derivative(s, MultiIndex{}), s, 5) == 0.0);
}

TEST_CASE("frame derivatives act as one-parameter subgroup derivatives") {
  // f(x) = a(x) has A3 f = (i/2) f: the psi flow multiplies a by e^{it/2}
  CoeffStack f(1);
  f.block(1)(0, 0) = 0.5;
  auto pts = sample_points(10, 909);
  auto fv = synthesize(f, pts);
  auto dv = synthesize(x_derivative_stack(f, 3), pts);
  for (size_t k = 0; k < pts.size(); ++k) CHECK(std::abs(dv[k] - cplx(0, 0.5) * fv[k]) < 1e-14);

  // powers compose in frame order: A3^2 A1 f
  CoeffStack p = x_derivative_power(f, MultiIndex{{1, 0, 2}});
  CoeffStack q = x_derivative_stack(x_derivative_stack(x_derivative_stack(f, 1), 3), 3);
  CHECK(stack_norm(lc({{1.0, &p}, {-1.0, &q}})) < 1e-14);
}

TEST_CASE("commutator with the vertical symbol grades by weight difference") {
  std::mt19937_64 rng(910);
  const int B = 6;
  auto s = random_symbol(B, rng);
  auto D0 = builtin_symbol("D0", B);

  InvariantSymbol c = s;
  for (int p = 1; p <= 3; ++p) {
    c = commutator(D0, c);
    for (int l = 0; l <= B; ++l)
      for (int i = 0; i <= l; ++i)
        for (int j = 0; j <= l; ++j) {
          cplx want = std::pow(double(i - j), p) * s.block(l)(i, j);
          CHECK(std::abs(c.block(l)(i, j) - want) < 1e-12 * std::max(1.0, std::abs(want)));
        }
  }

  auto t = random_symbol(4, rng);
  CHECK(commutator(s, t).band_x2() == 4);
}

TEST_CASE("conjugation rotates the frame and fixes isotropic symbols") {
  const int B = 6;
  std::mt19937_64 rng(911);
  GroupElement u = random_element(rng);

  auto I = builtin_symbol("I", B);
  CHECK(sym_err(conjugate_symbol(I, u), I, B) < 1e-13);
  auto Lap = builtin_symbol("Lap", B);
  CHECK(sym_err(conjugate_symbol(Lap, u), Lap, B) < 1e-12);

  auto s = random_symbol(B, rng);
  auto cs = conjugate_symbol(s, u);
  for (int l = 0; l <= B; ++l) CHECK(std::abs(cs.block(l).norm() - s.block(l).norm()) < 1e-12);
  CHECK(sym_err(conjugate_symbol(cs, inverse(u)), s, B) < 1e-12);

  // quarter turns permute the frame fields
  auto A1 = builtin_symbol("A1", B), A2 = builtin_symbol("A2", B), A3 = builtin_symbol("A3", B);
  CHECK(sym_err(conjugate_symbol(A3, basic_rotation(1, -M_PI / 2)), A1, B) < 1e-13);
  CHECK(sym_err(conjugate_symbol(A3, basic_rotation(2, M_PI / 2)), A2, B) < 1e-13);
}

TEST_CASE("dual derivative table is biorthogonal to the taylor coordinates") {
  DualTable T = dual_derivative_coeffs(2);
  const int n = static_cast<int>(T.indices.size());
  CHECK(n == 10);
  CHECK(T.indices == multi_indices(2));
  CHECK(T.cond > 3.0);
  CHECK(T.cond < 4.5);
  CHECK(std::abs(T.coeffs(0, 0) - 1.0) < 1e-12);
  for (int g = 1; g < n; ++g) CHECK(std::abs(T.coeffs(0, g)) < 1e-12);

  for (int ia = 0; ia < n; ++ia)
    for (int ib = 0; ib < n; ++ib) {
      cplx acc = 0;
      CoeffStack mono = taylor_coordinate(T.indices[ib]);
      for (int ig = 0; ig < n; ++ig)
        acc += T.coeffs(ia, ig) * synth_at_identity(x_derivative_power(mono, T.indices[ig]));
      double want = (ia == ib) ? T.indices[ia].factorial() : 0.0;
      CHECK(std::abs(acc - want) < 1e-8);
    }

  // the first-order block inverts the frame Jacobian on the coordinates
  Mat J(3, 3);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      MultiIndex dj{}, xk{};
      dj.a[j] = 1;
      xk.a[k] = 1;
      J(j, k) = synth_at_identity(x_derivative_power(taylor_coordinate(xk), dj));
    }
  Mat C = T.coeffs.block(1, 1, 3, 3);
  CHECK((C * J - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("inversion dual table solves its sign-inverted pairing") {
  DualTable T = inversion_dual_coeffs(2);
  const int n = static_cast<int>(T.indices.size());
  CHECK(T.cond < 1e3);
  for (int ia = 0; ia < n; ++ia)
    for (int ib = 0; ib < n; ++ib) {
      cplx acc = 0;
      CoeffStack mono = q_monomial(T.indices[ib]);
      double sgn = (T.indices[ib].order() % 2) ? -1.0 : 1.0;
      for (int ig = 0; ig < n; ++ig)
        acc += sgn * T.coeffs(ia, ig) * synth_at_identity(x_derivative_power(mono, T.indices[ig]));
      double want = (ia == ib) ? T.indices[ia].factorial() : 0.0;
      CHECK(std::abs(acc - want) < 1e-8);
    }
}
