#pragma once

#include <string>
#include <vector>

#include "su2pdo/vsym.hpp"

namespace su2pdo {

struct ExpansionTerm {
  int order_hint = 0;  // expected degree drop relative to the leading term
  Symbol symbol;
};

// Ordered asymptotic expansion; term k is expected to improve the remainder
// by one order. truncation records the order the expansion was built to.
struct SymbolExpansion {
  std::vector<ExpansionTerm> terms;
  int truncation = 0;
  Symbol total() const;
};

// Composition expansion
//   sigma_{AB} = sum_{|alpha| <= order} (1/alpha!) (Delta^alpha sigma_A)(d^(alpha) sigma_B),
// exact (all higher terms vanish) when sigma_B is invariant.
Symbol compose(const Symbol& a, const Symbol& b, int order);

// Adjoint expansion  sum_{|alpha| <= order} (1/alpha!) Delta^alpha d^(alpha) (sigma_A^H);
// exact blockwise conjugate transpose for invariant input.
Symbol adjoint_symbol(const Symbol& a, int order);

// Left parametrix of an elliptic symbol expansion: B_0 is the pointwise
// pivoted inverse of the leading term (condition number > 1e12 fails
// ellipticity) and
//   B_n = -[ sum_{j+k+|gamma| = n, k < n} (1/gamma!)
//            (Delta^gamma B_k)(d^(gamma) sigma_{A_j}) ] B_0.
SymbolExpansion parametrix(const SymbolExpansion& a, int order);
SymbolExpansion parametrix(const Symbol& a, int order);

// Least-squares slope of log sup_x ||sigma(x,xi)||_2 against log<xi>, over
// blocks with xi_x2 in [lo_x2, hi_x2]. An identically zero symbol returns
// -infinity; fewer than 4 usable points is an error.
double estimate_order(const Symbol& s, int lo_x2, int hi_x2);

struct DecayRow {
  int p;
  int xi_x2;
  double sup;
};

struct DecayReport {
  double m = 0.0;                    // weight exponent the suprema are normalized by
  std::vector<DecayRow> entry_rows;  // sup_{ij} <xi>^-m <i-j>^p |sigma_ij|
  std::vector<DecayRow> block_rows;  // p = 0, <xi>^-m ||sigma(xi)||_2
  std::vector<std::vector<DecayRow>> conjugated_entry_rows;  // one list per u
  std::vector<std::vector<DecayRow>> conjugated_block_rows;
  // Geometric growth of the entry suprema in p stays within the bracket of a
  // fixed bandwidth (<= 4 per step); dense families grow like <xi_max> instead.
  bool decaying = true;
};

DecayReport decay_report(const Symbol& s, double m, int p_max,
                         const std::vector<GroupElement>& conjugators);

struct CommutatorDiagnostics {
  struct Row {
    std::string channel;
    int p = 0;          // iteration depth, or |gamma| for membership rows
    double order = 0.0;  // fitted order (-inf when the commutator vanishes)
  };
  std::vector<Row> iterated;
  std::vector<Row> memberships;
};

// Fitted orders of p-fold commutators with the ladder derivatives and of the
// products (Delta^gamma sigma_{d_j}) sigma_A that the symbol-class recursion
// treats as automatic.
CommutatorDiagnostics commutator_diagnostics(const InvariantSymbol& a, int lo_x2, int hi_x2);

// Blockwise solve sigma(l) f_hat(l) = g_hat(l) with a pivoted factorization;
// near-singular blocks (condition > 1e12) fail.
CoeffStack solve_invariant(const InvariantSymbol& s, const CoeffStack& g);

// Elliptic test operator  A f = a (f - Lap f)  with a(x) = 2 - (i/2) q0(x),
// a real-valued multiplier with range [1, 3].
CoeffStack apply_demo_operator(const CoeffStack& f);
VaryingSymbol demo_operator_symbol(const VCtxPtr& ctx, int xi_max_x2);

struct SolveResult {
  CoeffStack f;
  double residual;  // ||A f - g|| / ||g||, Plancherel norm, coefficient space
};

// Parametrix solve of the elliptic test operator at expansion order `order`.
SolveResult solve_demo(const CoeffStack& g, int order, const VCtxPtr& ctx, int xi_max_x2,
                       const QuadratureGrid& transform_grid);

}  // namespace su2pdo
