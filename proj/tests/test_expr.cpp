#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "su2pdo/expr.hpp"
#include "su2pdo/group.hpp"

using namespace su2pdo;

namespace {

std::vector<GroupElement> sample_points(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::vector<GroupElement> pts;
  for (int k = 0; k < n; ++k) pts.push_back(random_element(rng));
  return pts;
}

int thrown_position(const std::string& text) {
  try {
    expr::parse(text);
  } catch (const expr::ExprError& e) {
    return e.position;
  }
  return -1;
}

}  // namespace

TEST_CASE("parser builds the canonical tree shapes") {
  CHECK(expr::to_string(expr::parse("D+*D- + D0^2 + D0")) ==
        "Sum(Product(D+, D-), Power(D0, 2), D0)");
  CHECK(expr::to_string(expr::parse("2*(I - Lap)")) ==
        "Product(Scalar(2), Sum(I, Product(Scalar(-1), Lap)))");
  CHECK(expr::to_string(expr::parse("I + D0 * Lap^2")) ==
        "Sum(I, Product(D0, Power(Lap, 2)))");
  CHECK(expr::to_string(expr::parse("(D0)")) == "D0");
  CHECK(expr::to_string(expr::parse("q+ * q-")) == "Product(q+, q-)");

  expr::Node n = expr::parse("2.5e-1");
  CHECK(n.kind == expr::Kind::Scalar);
  CHECK(n.value == 0.25);

  CHECK(!expr::uses_multiplication(expr::parse("D+*D- + I")));
  CHECK(expr::uses_multiplication(expr::parse("2*q0*D+")));
  CHECK(expr::uses_multiplication(expr::parse("Lap + (q-)")));
}

TEST_CASE("parse errors carry one-based positions") {
  try {
    expr::parse("D+ * Foo");
    CHECK(false);
  } catch (const expr::ExprError& e) {
    CHECK(e.position == 6);
    std::string msg = e.what();
    CHECK(msg.find("unknown identifier 'Foo'") != std::string::npos);
    CHECK(msg.find("known: I, D+, D-, D0, A1, A2, A3, Lap, q+, q-, q0") != std::string::npos);
  }

  CHECK(thrown_position("D0 ^ x") == 6);
  CHECK(thrown_position("D0 ^ 3.5") == 6);
  CHECK(thrown_position("D0 +") == 5);
  CHECK(thrown_position("(D0") == 4);
  CHECK(thrown_position("D0 )") == 4);
  CHECK(thrown_position("#") == 1);
  CHECK(thrown_position("D0 ^ -2") == 6);
  CHECK(thrown_position("") == 1);
}

TEST_CASE("apply reproduces the manual coefficient action") {
  std::mt19937_64 rng(61);
  CoeffStack f = random_stack(4, rng);

  CoeffStack got = expr::apply(expr::parse("D+*D- + D0^2 + D0"), f);
  CHECK(got.band_x2() == 4);
  for (int l = 0; l <= 4; ++l) {
    Mat sp = builtin_block("D+", l), sm = builtin_block("D-", l), s0 = builtin_block("D0", l);
    Mat want = (sp * sm + s0 * s0 + s0) * f.block(l);
    CHECK((got.block(l) - want).cwiseAbs().maxCoeff() < 1e-13);
  }

  CoeffStack g2 = expr::apply(expr::parse("2*(I - Lap)"), f);
  for (int l = 0; l <= 4; ++l) {
    const double lam = 0.5 * l * (0.5 * l + 1.0);
    CHECK((g2.block(l) - 2.0 * (1.0 + lam) * f.block(l)).cwiseAbs().maxCoeff() < 1e-13);
  }

  // multiplication atoms act through the coefficient gather, right to left
  CoeffStack lhs = expr::apply(expr::parse("q0*D+ - D+*q0"), f);
  CHECK(lhs.band_x2() == 5);
  CoeffStack t1 = q_times(apply_symbol(builtin_symbol("D+", 4), f), 0);
  CoeffStack q0f = q_times(f, 0);
  CoeffStack t2 = apply_symbol(builtin_symbol("D+", 5), q0f);
  CoeffStack want = lc({{1.0, &t1}, {-1.0, &t2}});
  for (int l = 0; l <= 5; ++l)
    CHECK((lhs.block(l) - want.block(l)).cwiseAbs().maxCoeff() < 1e-12);

  CoeffStack half = expr::apply(expr::parse("0.5*D0"), f);
  for (int l = 0; l <= 4; ++l)
    CHECK((half.block(l) - 0.5 * builtin_block("D0", l) * f.block(l)).cwiseAbs().maxCoeff() <
          1e-14);

  CoeffStack idp = expr::apply(expr::parse("D0^0"), f);
  for (int l = 0; l <= 4; ++l)
    CHECK((idp.block(l) - f.block(l)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("symbols of q-free expressions are invariant and act alike") {
  expr::Node n = expr::parse("D+*D- + D0^2 + D0");
  Symbol s = expr::symbol_of(n, 6, nullptr, 0, 2);
  REQUIRE(s.invariant());
  CHECK(s.inv->band_x2() == 6);
  for (int l = 0; l <= 6; ++l) {
    Mat sp = builtin_block("D+", l), sm = builtin_block("D-", l), s0 = builtin_block("D0", l);
    CHECK((s.inv->block(l) - (sp * sm + s0 * s0 + s0)).cwiseAbs().maxCoeff() < 1e-13);
  }

  std::mt19937_64 rng(62);
  CoeffStack f = random_stack(4, rng);
  auto pts = sample_points(8, 63);
  auto via_sym = quantize(s, f.truncated(6), pts);
  auto via_apply = synthesize(expr::apply(n, f), pts);
  for (size_t k = 0; k < pts.size(); ++k) CHECK(std::abs(via_sym[k] - via_apply[k]) < 1e-10);

  Symbol e = expr::symbol_of(expr::parse("2*(I - Lap)"), 4, nullptr, 0, 1);
  for (int l = 0; l <= 4; ++l) {
    const double lam = 0.5 * l * (0.5 * l + 1.0);
    Mat want = 2.0 * (1.0 + lam) * Mat::Identity(l + 1, l + 1);
    CHECK((e.inv->block(l) - want).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("symbols with q atoms compose on the varying context") {
  GridPtr g = quadrature_grid(4);
  VCtxPtr ctx = shared_vcontext(g, 4);
  std::mt19937_64 rng(64);
  CoeffStack f = random_stack(3, rng);
  auto pts = sample_points(10, 65);

  // right factor invariant: the truncated composition is exact at every order
  expr::Node mul_right = expr::parse("q0*(I - Lap)");
  Symbol vs = expr::symbol_of(mul_right, 0, ctx, 6, 1);
  REQUIRE(!vs.invariant());
  auto want = synthesize(expr::apply(mul_right, f), pts);
  auto got = quantize(vs, f, pts);
  for (size_t k = 0; k < pts.size(); ++k) CHECK(std::abs(got[k] - want[k]) < 1e-9);

  // differential left factor: exact from order 1, visibly wrong at order 0
  expr::Node dq = expr::parse("D+*q0");
  auto dq_want = synthesize(expr::apply(dq, f), pts);
  double e0 = 0, e1 = 0;
  auto at0 = quantize(expr::symbol_of(dq, 0, ctx, 6, 0), f, pts);
  auto at1 = quantize(expr::symbol_of(dq, 0, ctx, 6, 1), f, pts);
  for (size_t k = 0; k < pts.size(); ++k) {
    e0 = std::max(e0, std::abs(at0[k] - dq_want[k]));
    e1 = std::max(e1, std::abs(at1[k] - dq_want[k]));
  }
  CHECK(e0 > 1e-3);
  CHECK(e1 < 1e-8);

  CHECK_THROWS_AS(expr::symbol_of(expr::parse("q0"), 4, nullptr, 6, 1), std::invalid_argument);
}
