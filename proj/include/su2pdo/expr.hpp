#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "su2pdo/stack.hpp"
#include "su2pdo/vsym.hpp"

namespace su2pdo::expr {

// Operator-expression grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := atom ('^' uint)?
//   atom   := 'I'|'D+'|'D-'|'D0'|'A1'|'A2'|'A3'|'Lap'|'q+'|'q-'|'q0'
//             | number | '(' expr ')'
// q+/q-/q0 are multiplication operators; '*' is operator composition.
// There is no unary minus; subtraction binds a Scalar(-1) Product.

struct ExprError : std::runtime_error {
  int position;  // 1-based column in the input text
  ExprError(const std::string& msg, int pos) : std::runtime_error(msg), position(pos) {}
};

enum class Kind { Op, Scalar, Sum, Product, Power };

struct Node {
  Kind kind;
  std::string op;              // Kind::Op: atom name
  double value = 0.0;          // Kind::Scalar
  std::vector<Node> children;  // Sum/Product: operands; Power: {base}
  int exponent = 0;            // Kind::Power
};

Node parse(const std::string& text);

// Canonical shape rendering, e.g. "Sum(Product(D+, D-), Power(D0, 2), D0)".
std::string to_string(const Node& n);

// True if any q+/q-/q0 multiplication atom occurs in the tree.
bool uses_multiplication(const Node& n);

// Exact action on Fourier coefficients: atoms act blockwise (differential
// operators) or through the coefficient-side gather (q multipliers),
// products apply right to left.
CoeffStack apply(const Node& n, const CoeffStack& f);

// Symbol of the expression. Without q atoms the result is invariant with
// band inv_band_x2 and ctx may be null; with q atoms all atoms are built on
// ctx over keys 0..xi_max_x2 and '*' becomes the truncated composition at
// the given order.
Symbol symbol_of(const Node& n, int inv_band_x2, const VCtxPtr& ctx, int xi_max_x2, int order);

}  // namespace su2pdo::expr
