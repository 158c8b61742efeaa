#pragma once

#include <utility>
#include <vector>

#include "su2pdo/group.hpp"
#include "su2pdo/types.hpp"

namespace su2pdo {

// Matrix entries of the band-l_x2 irreducible representation factor as
//   t^l_{mn}(phi, theta, psi) = e^{i(m phi + n psi)} * (-i)^{(n-m) mod 4} * P_{mn}(theta)
// where P is a real polynomial in s = sin(theta/2), c = cos(theta/2) and the row
// index runs from m = -l to m = +l (row 0 is the lowest weight).
struct TrigTerm {
  double coeff;
  int pow_s;
  int pow_c;
};

// Closed-form expansion of P_{mn} for block l_x2, rows/cols indexed 0..l_x2.
const std::vector<TrigTerm>& entry_coeffs(int l_x2, int im, int in);

// Rodrigues-type closed form for the real radial factor at weights (m, n):
//   P(x) = c * (1-x)^{(n-m)/2} (1+x)^{-(m+n)/2} (d/dx)^{l-m} [(1-x)^{l-n} (1+x)^{l+n}]
// with c = 2^{-l} (-1)^{l-n} sqrt((l+m)! / ((l-m)! (l-n)! (l+n)!)).
// The derivative is taken by exact polynomial differentiation; the forced roots
// at x = +-1 are divided out so the remaining half powers are nonnegative and
// the endpoints evaluate to their analytic limits. Equals the s,c expansion of
// entry_coeffs at x = cos(theta): an entirely independent route to the same
// function, kept for cross-validation. Loses relative accuracy for large l_x2
// through coefficient cancellation, which is why synthesis beyond the ladder
// switch never uses it.
double legendre_P(int l_x2, int m_x2, int n_x2, double x);

// Row index of weight m_x2 inside block l_x2.
inline int index_map(int l_x2, int m_x2) { return (m_x2 + l_x2) / 2; }

// Real reduced matrices P^{l}(theta) for all blocks l_x2 = 0..L_x2.
// Low blocks come from the closed form; high blocks from a three-term ladder
// in l that stays well conditioned through l_x2 = 32.
std::vector<RMat> reduced_matrices(int L_x2, double theta);
RMat reduced_matrix(int l_x2, double theta);

// Full representation block at Euler angles / at a group element.
Mat wigner_matrix(int l_x2, const EulerAngles& e);
Mat wigner_matrix(int l_x2, const GroupElement& g);

// Raising/lowering weights of the product expansion
//   t^{1/2}_{uv} * t^{l}_{mn} = Wp * t^{l+1/2}_{m+u,n+v} + Wm * t^{l-1/2}_{m+u,n+v}
// evaluated at block l_x2 and indices (im, in); iu, iv in {0, 1}.
// Wm vanishes exactly whenever the lower target index falls out of range.
std::pair<double, double> product_weights(int iu, int iv, int l_x2, int im, int in);

// Cross-check of the spin-half block against the defining 2x2 matrix on random
// group elements; throws NumericalError on mismatch. Runs once per process.
void calibrate_spin_half();

// Environment-driven fault injection for negative-control testing:
// SU2PDO_FAULT=wigner-phase perturbs every entry phase by 1e-6.
bool fault_wigner_phase();

}  // namespace su2pdo
