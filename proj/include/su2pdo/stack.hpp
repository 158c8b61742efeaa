#pragma once

#include <random>
#include <utility>
#include <vector>

#include "su2pdo/types.hpp"

namespace su2pdo {

// Fourier coefficient stack: one (l_x2+1) x (l_x2+1) block per representation
// index l_x2 = 0..band_x2. Blocks not stored are identically zero.
class CoeffStack {
 public:
  CoeffStack() = default;
  explicit CoeffStack(int band_x2) {
    blocks_.reserve(band_x2 + 1);
    for (int l = 0; l <= band_x2; ++l) blocks_.push_back(Mat::Zero(l + 1, l + 1));
  }

  int band_x2() const { return static_cast<int>(blocks_.size()) - 1; }
  bool has(int l_x2) const { return 0 <= l_x2 && l_x2 <= band_x2(); }
  Mat& block(int l_x2) { return blocks_[l_x2]; }
  const Mat& block(int l_x2) const { return blocks_[l_x2]; }

  // Grow with zero blocks (no-op if already at least this band).
  void extend(int band_x2) {
    for (int l = this->band_x2() + 1; l <= band_x2; ++l) blocks_.push_back(Mat::Zero(l + 1, l + 1));
  }
  CoeffStack truncated(int band_x2) const {
    CoeffStack out(std::min(band_x2, this->band_x2()));
    for (int l = 0; l <= out.band_x2(); ++l) out.block(l) = blocks_[l];
    out.extend(band_x2);
    return out;
  }

 private:
  std::vector<Mat> blocks_;
};

CoeffStack zero_stack(int band_x2);
// Coefficients of the constant function 1.
CoeffStack unit_stack();
// Standard complex Gaussian entries in every block.
CoeffStack random_stack(int band_x2, std::mt19937_64& rng);

// Linear combination; output band is the largest input band, missing blocks zero.
CoeffStack lc(const std::vector<std::pair<cplx, const CoeffStack*>>& terms);

// Coefficients of the pointwise product t^{1/2}_{uv} * f, where f has the given
// stack; the band grows by one. `iu`, `iv` in {0,1} index the spin-half entry
// (0 = weight -1/2, 1 = weight +1/2). Each input coefficient is redistributed
// to the two neighbouring blocks with the square-root weights of the
// multiplication formulae (see product_weights).
CoeffStack entry_times(const CoeffStack& f, int iu, int iv);

// Spin-half channel named by weights, e.g. "+-" = row +1/2, column -1/2.
CoeffStack product_with_spin_half(const CoeffStack& f, const std::string& which);

// Coefficients of q_channel * f; channel +1, -1, 0 selects q_plus, q_minus, q_zero.
CoeffStack q_times(const CoeffStack& f, int channel);

// The q functions themselves (q * 1): band-1/2 stacks vanishing at the identity.
CoeffStack q_function(int channel);

// q^(alpha) = q_+^{a1} q_-^{a2} q_0^{a3} and the Taylor coordinates
// x^(alpha) = x12^{a1} x21^{a2} (x11-x22)^{a3} = i^{a1} (-i)^{a2} q^(alpha).
CoeffStack q_monomial(const MultiIndex& alpha);
CoeffStack taylor_coordinate(const MultiIndex& alpha);

// Value of the Fourier series at the neutral element: sum (l_x2+1) tr(block).
cplx synth_at_identity(const CoeffStack& st);

// Plancherel pairing sum_l (l_x2+1) tr(u(l) v(l)^H) and the induced L2 norm.
cplx parseval_inner(const CoeffStack& u, const CoeffStack& v);
double stack_norm(const CoeffStack& u);

}  // namespace su2pdo
