#pragma once

#include <string>
#include <vector>

#include "su2pdo/fourier.hpp"
#include "su2pdo/stack.hpp"
#include "su2pdo/types.hpp"

namespace su2pdo {

// Operator symbol with no x-dependence: one matrix per representation index.
// The block container is a CoeffStack because the difference operators act on
// symbol blocks by exactly the gather that multiplies a Fourier series by a
// spin-half entry.
struct InvariantSymbol {
  CoeffStack blocks;

  InvariantSymbol() = default;
  explicit InvariantSymbol(int band_x2) : blocks(band_x2) {}
  explicit InvariantSymbol(CoeffStack b) : blocks(std::move(b)) {}
  int band_x2() const { return blocks.band_x2(); }
  Mat& block(int l_x2) { return blocks.block(l_x2); }
  const Mat& block(int l_x2) const { return blocks.block(l_x2); }
};

// Closed-form symbol blocks of the built-in operators.
// Names: "I", "D+", "D-", "D0" (ladder derivatives), "A1", "A2", "A3"
// (left-invariant basis fields), "Lap" (Laplacian).
Mat builtin_block(const std::string& name, int l_x2);
InvariantSymbol builtin_symbol(const std::string& name, int band_x2);

// sigma(l) f_hat(l): coefficient-space action of the quantized operator.
CoeffStack apply_symbol(const InvariantSymbol& s, const CoeffStack& f);

// Quantization Op(sigma) f evaluated pointwise:
// sum_l (l_x2+1) Tr(sigma(l) f_hat(l) t^l(x)^H).
std::vector<cplx> quantize(const InvariantSymbol& s, const CoeffStack& f,
                           const std::vector<GroupElement>& points);
Vec quantize(const InvariantSymbol& s, const CoeffStack& f, const QuadratureGrid& g);

// Difference operators on symbols. channel +1, -1, 0. The output has one more
// block than the input; blocks are exact at interior indices (xi such that the
// gather never reaches past the input band).
InvariantSymbol difference(const InvariantSymbol& s, int channel);
InvariantSymbol multi_difference(const InvariantSymbol& s, const MultiIndex& alpha);

// d/dx derivatives of an x-independent symbol vanish.
InvariantSymbol x_derivative(const InvariantSymbol& s, const MultiIndex& beta);

// Blockwise commutator [a(l), b(l)] on the shared band.
InvariantSymbol commutator(const InvariantSymbol& a, const InvariantSymbol& b);

// Blockwise conjugation t^l(u) sigma(l) t^l(u)^H.
InvariantSymbol conjugate_symbol(const InvariantSymbol& s, const GroupElement& u);

// Left-invariant derivative of a Fourier series: f_hat(l) -> sigma_Aj(l) f_hat(l),
// iterated with A1 powers first, then A2, then A3.
CoeffStack x_derivative_stack(const CoeffStack& st, int j);
CoeffStack x_derivative_power(const CoeffStack& st, const MultiIndex& beta);

// Dual derivative coefficients: row alpha holds the combination c of plain
// derivatives d^gamma with  (d^(alpha) mono^(beta))(e) = alpha! delta, where
// mono is the coordinate system the table was built against.
struct DualTable {
  std::vector<MultiIndex> indices;  // graded order, |alpha| <= N
  Mat coeffs;                       // indices.size() x indices.size()
  double cond;                      // condition number of the pairing matrix
};

// Built against the Taylor coordinates x^(alpha) (criterion: biorthogonality).
DualTable dual_derivative_coeffs(int order);
// Built against the sign-inverted q monomials, the coordinates whose
// differences the expansion machinery actually realizes. Used internally by
// composition, adjoint and parametrix.
DualTable inversion_dual_coeffs(int order);

}  // namespace su2pdo
