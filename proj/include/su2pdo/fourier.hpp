#pragma once

#include <map>
#include <memory>
#include <random>
#include <vector>

#include "su2pdo/group.hpp"
#include "su2pdo/stack.hpp"
#include "su2pdo/types.hpp"

namespace su2pdo {

struct GridSpec {
  int n_phi = 0;
  int n_theta = 0;
  int n_psi = 0;
  bool operator==(const GridSpec&) const = default;
};

// Product quadrature rule for the normalized Haar measure: uniform angles in
// phi over (-pi,pi] and psi over (-2pi,2pi], Gauss-Legendre in cos(theta).
// Node k = (i_phi * n_theta + i_theta) * n_psi + i_psi (phi-major ordering).
//
// The constructor certifies itself: weights sum to 1, the trigonometric sums
// and Legendre moments that make up the matrix-entry Gram are checked at
// 1e-10, and node counts are doubled until the check passes or a cap is hit
// (construction then fails with a diagnostic). The certified product band is
// the largest total band for which integrands of that band are integrated
// exactly: min(2*n_phi - 1, n_psi - 1, 4*n_theta - 4) in doubled-index units.
class QuadratureGrid {
 public:
  explicit QuadratureGrid(int band_x2);
  explicit QuadratureGrid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  int node_count() const { return static_cast<int>(weights_.size()); }
  // Largest band whose functions this grid analyzes exactly (half of the
  // certified product band).
  int band_x2() const { return certified_product_band_x2_ / 2; }
  int certified_product_band_x2() const { return certified_product_band_x2_; }

  const RVec& weights() const { return weights_; }
  double phi(int i) const;
  double theta(int i) const { return thetas_[i]; }
  double psi(int i) const;
  EulerAngles node_euler(int k) const;
  GroupElement node(int k) const;

  // Reduced (theta-only) representation tables at theta node i, blocks
  // l_x2 = 0..band. Cached; grown on demand. Single-threaded use assumed, as
  // documented in the concurrency notes: caches have one writer.
  const std::vector<RMat>& reduced_at_theta(int i_theta, int band_x2) const;

  // Dense tabulation of all matrix entries of t^l on the nodes: an
  // N x (l_x2+1)^2 matrix whose column im*(l_x2+1)+in holds t^l_{mn} at every
  // node, contiguous in memory. Reference path only; memory grows as N*L^3.
  const Mat& dense_block(int l_x2) const;

  // Residual of the structured Gram self-test at the given band.
  double gram_residual(int band_x2) const;

 private:
  void build();
  GridSpec spec_;
  int certified_product_band_x2_ = 0;
  std::vector<double> thetas_;
  std::vector<double> theta_weights_;  // Gauss-Legendre weights, sum 2
  RVec weights_;                       // per-node Haar weights, sum 1
  mutable std::vector<std::vector<RMat>> reduced_cache_;  // per theta node
  mutable std::map<int, Mat> dense_cache_;                // per l_x2, stable refs
};

using GridPtr = std::shared_ptr<const QuadratureGrid>;

// Shared, cached grid handles (construction reruns the self-test otherwise).
GridPtr quadrature_grid(int band_x2);
GridPtr quadrature_grid(const GridSpec& spec);
// Smallest cached grid that analyzes band `analysis_band_x2` data while
// integrating products of total band `product_band_x2` exactly.
GridPtr quadrature_grid_for_products(int analysis_band_x2, int product_band_x2);

struct GridFunction {
  GridPtr grid;
  Vec values;
};

// Forward transform f_hat(l) = integral f * t^l dmu by weighted sums, factored
// over the three angles. `f_band_x2` declares the band of the sampled data
// (default: same as the requested output band); the call refuses with a
// required-size diagnostic when the grid cannot integrate the product
// f * t^l exactly.
CoeffStack analyze(const QuadratureGrid& g, const Vec& values, int band_x2, int f_band_x2 = -1);

// Fourier series  f(x) = sum_l (l_x2+1) Tr(f_hat(l) t^l(x)^H)  on all nodes.
Vec synthesize(const CoeffStack& c, const QuadratureGrid& g);
// Same series at arbitrary points.
std::vector<cplx> synthesize(const CoeffStack& c, const std::vector<GroupElement>& points);

// Reference implementations using the dense per-l tabulation and the hot-loop
// kernels; results must agree with the factored path to reduction roundoff.
CoeffStack analyze_dense(const QuadratureGrid& g, const Vec& values, int band_x2,
                         int f_band_x2 = -1);
Vec synthesize_dense(const CoeffStack& c, const QuadratureGrid& g);

// Blockwise product f_hat(l) g_hat(l): the coefficients of
// (f*g)(x) = integral f(y) g(y^-1 x) dmu(y). Bands are unified by zero-pad.
CoeffStack convolve(const CoeffStack& f, const CoeffStack& g);

// Coefficients of x |-> f(u^-1 x u): blockwise t^l(u) f_hat(l) t^l(u)^H.
CoeffStack conjugate_transform(const CoeffStack& f, const GroupElement& u);

// <xi> = (1 + xi + xi^2)^{1/2} = (1 + lambda_xi)^{1/2} with lambda = xi(xi+1).
double weight(int xi_x2);

// L2 operator norm of f |-> f * a estimated by power iteration (started from
// a random grid function, then iterated on coefficient blocks), and the exact
// value max_l ||a_hat(l)||_2 it must match.
double convolution_operator_norm(const CoeffStack& a, const QuadratureGrid& g,
                                 std::mt19937_64& rng);
double max_block_operator_norm(const CoeffStack& a);

}  // namespace su2pdo
