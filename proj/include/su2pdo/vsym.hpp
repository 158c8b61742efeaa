#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "su2pdo/fourier.hpp"
#include "su2pdo/symbol.hpp"

namespace su2pdo {

// Shared tables for x-varying symbols on a fixed grid. The x-dependence of
// every block is stored as packed Fourier coefficients over the matrix entries
// of t^{lx}, lx <= xband: packed index offs[lx] + i*(lx+1) + j. Products are
// formed through nodal values and projected back to the packed band, so the
// grid must integrate products of band 3*xband exactly.
class VContext {
 public:
  static std::shared_ptr<const VContext> make(GridPtr grid, int xband_x2);

  GridPtr grid;
  int xband_x2 = 0;
  int packed_len = 0;
  std::vector<int> offs;

  Mat SY;     // node_count x packed_len, row = synthesis weights (lx+1)*conj(t)
  Mat AN;     // packed_len x node_count, analysis projection
  Mat D[3];   // left-invariant derivatives A1, A2, A3 on packed coefficients

  // Dual derivative operator for alpha (|alpha| <= 3), biorthogonal to the
  // coordinates realized by the difference operators.
  const Mat& dual_matrix(const MultiIndex& alpha) const;

  Vec pack(const CoeffStack& st) const;
  CoeffStack unpack(const Vec& v) const;
  // Synthesis rows for this packed basis evaluated on another grid.
  Mat synth_rows(const QuadratureGrid& target) const;
  Vec synth_row_at(const GroupElement& x) const;

 private:
  VContext() = default;
  std::map<MultiIndex, Mat> duals_;
};

using VCtxPtr = std::shared_ptr<const VContext>;

// Cached context handles keyed by (grid spec, xband): symbols rebuilt from
// files share one context so composition sees identical tables.
VCtxPtr shared_vcontext(const GridPtr& grid, int xband_x2);

// x-varying symbol: packed x-coefficients per representation block.
// blocks[xi_x2] is packed_len x d^2 with column ia*d + ib (d = xi_x2+1).
// Keys must stay contiguous from 0; difference operators drop the top key.
struct VaryingSymbol {
  VCtxPtr ctx;
  std::map<int, Mat> blocks;

  VaryingSymbol() = default;
  explicit VaryingSymbol(VCtxPtr c) : ctx(std::move(c)) {}
  int top_key() const { return blocks.empty() ? -1 : blocks.rbegin()->first; }
};

VaryingSymbol vs_from_invariant(const VCtxPtr& ctx, const InvariantSymbol& s,
                                int xi_max_x2 = -1);
// Symbol of the multiplication operator by the band-limited function f.
VaryingSymbol vs_mult_function(const VCtxPtr& ctx, const CoeffStack& f, int xi_max_x2);
// Linear combination over the intersection of key sets.
VaryingSymbol vs_lc(const std::vector<std::pair<cplx, const VaryingSymbol*>>& terms);
VaryingSymbol vs_scale(const VaryingSymbol& s, cplx c);
// Difference operator (channel +1, -1, 0); the top key is dropped because its
// gather would need data beyond the tracked band.
VaryingSymbol vs_difference(const VaryingSymbol& s, int channel);
VaryingSymbol vs_multi_difference(const VaryingSymbol& s, const MultiIndex& alpha);
// Dual x-derivative applied blockwise to the packed coefficients.
VaryingSymbol vs_dual_derivative(const VaryingSymbol& s, const MultiIndex& alpha);
// Plain x-derivative power (A1^b1 A2^b2 A3^b3).
VaryingSymbol vs_x_derivative(const VaryingSymbol& s, const MultiIndex& beta);
// Pointwise (in x) blockwise (in xi) product, projected back to the x-band.
VaryingSymbol vs_product(const VaryingSymbol& a, const VaryingSymbol& b);
VaryingSymbol vs_conj_transpose(const VaryingSymbol& s);

// Nodal values of one block: node_count x d^2.
Mat vs_nodal_block(const VaryingSymbol& s, int xi_x2);
VaryingSymbol vs_from_nodal(const VCtxPtr& ctx, const std::map<int, Mat>& nodal);

// sup over sampled nodes (stride >= 1) of the spectral norm of sigma(x, xi).
double vs_sup_norm(const VaryingSymbol& s, int xi_x2, int node_stride);

// Op(sigma) f sampled on a target grid or at points.
Vec vs_quantize(const VaryingSymbol& s, const CoeffStack& f, const QuadratureGrid& target);
std::vector<cplx> vs_quantize(const VaryingSymbol& s, const CoeffStack& f,
                              const std::vector<GroupElement>& points);

// Either layout, for interfaces that accept both.
struct Symbol {
  std::optional<InvariantSymbol> inv;
  std::optional<VaryingSymbol> var;

  Symbol() = default;
  explicit Symbol(InvariantSymbol s) : inv(std::move(s)) {}
  explicit Symbol(VaryingSymbol s) : var(std::move(s)) {}
  bool invariant() const { return inv.has_value(); }
};

// Recover a symbol from the operator's action on band-limited data: the
// callback applies the operator to nodal samples on the context grid.
// Linearity is spot-checked first; the layout is detected from the nodal
// spread (constant in x to 1e-9 -> Invariant).
Symbol extract_symbol(const std::function<Vec(const Vec&)>& apply_op, const VCtxPtr& ctx,
                      int band_x2);

std::vector<cplx> quantize(const Symbol& s, const CoeffStack& f,
                           const std::vector<GroupElement>& points);
Vec quantize(const Symbol& s, const CoeffStack& f, const QuadratureGrid& g);
Symbol difference(const Symbol& s, int channel);
Symbol multi_difference(const Symbol& s, const MultiIndex& alpha);
Symbol x_derivative(const Symbol& s, const MultiIndex& beta);

}  // namespace su2pdo
