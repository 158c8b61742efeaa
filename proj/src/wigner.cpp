#include "su2pdo/wigner.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <map>
#include <random>
#include <stdexcept>

namespace su2pdo {

namespace {

// Blocks up to this index come straight from the closed form; above it the
// closed form starts cancelling catastrophically and the ladder takes over.
constexpr int kLadderSwitchX2 = 16;

double lg(int k) { return std::lgamma(static_cast<double>(k)); }

cplx quarter_phase(int k) {
  // (-i)^(k mod 4)
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

double fault_scale() { return fault_wigner_phase() ? 1.0 + 1e-6 : 1.0; }

RMat closed_block(int l_x2, const std::vector<double>& spow, const std::vector<double>& cpow) {
  int d = l_x2 + 1;
  RMat M(d, d);
  for (int im = 0; im < d; ++im)
    for (int in = 0; in < d; ++in) {
      double v = 0;
      for (const TrigTerm& t : entry_coeffs(l_x2, im, in)) v += t.coeff * spow[t.pow_s] * cpow[t.pow_c];
      M(im, in) = v;
    }
  return M;
}

}  // namespace

bool fault_wigner_phase() {
  static const bool on = [] {
    const char* v = std::getenv("SU2PDO_FAULT");
    return v != nullptr && std::strcmp(v, "wigner-phase") == 0;
  }();
  return on;
}

const std::vector<TrigTerm>& entry_coeffs(int l_x2, int im, int in) {
  static std::map<int, std::vector<TrigTerm>> cache;
  int key = (l_x2 * 64 + im) * 64 + in;
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  // All lgamma arguments below are integers; the half-integer bookkeeping
  // cancels once m = im - l, n = in - l are substituted.
  std::vector<TrigTerm> out;
  int jmin = std::max(0, l_x2 - im - in);
  int jmax = std::min(l_x2 - im, l_x2 - in);
  double base = std::exp(0.5 * (lg(im + 1) - lg(l_x2 - im + 1) - lg(l_x2 - in + 1) - lg(in + 1)));
  if ((l_x2 - in) & 1) base = -base;
  for (int j = jmin; j <= jmax; ++j) {
    int a = 2 * l_x2 - im - in - 2 * j;
    int b = im + in - l_x2 + 2 * j;
    double cj = std::exp(lg(l_x2 - im + 1) - lg(j + 1) - lg(l_x2 - im - j + 1)
                         + lg(l_x2 - in + 1) - lg(l_x2 - in - j + 1)
                         + lg(in + 1) - lg(im + in - l_x2 + j + 1));
    out.push_back({(j & 1) ? -base * cj : base * cj, a, b});
  }
  return cache.emplace(key, std::move(out)).first->second;
}

double legendre_P(int l_x2, int m_x2, int n_x2, double x) {
  if (l_x2 < 0 || std::abs(m_x2) > l_x2 || std::abs(n_x2) > l_x2 ||
      ((l_x2 - m_x2) & 1) || ((l_x2 - n_x2) & 1))
    throw std::invalid_argument("legendre_P: weights must be half-integers in [-l, l] with l - m, l - n integral");
  if (!(x >= -1.0 && x <= 1.0)) throw std::invalid_argument("legendre_P: x outside [-1, 1]");

  const int a = (l_x2 - n_x2) / 2;  // multiplicity of (1 - x) inside the bracket
  const int b = (l_x2 + n_x2) / 2;  // multiplicity of (1 + x)
  const int d = (l_x2 - m_x2) / 2;  // derivative count

  // (1 - x)^a (1 + x)^b, ascending coefficients.
  std::vector<double> q{1.0};
  for (int k = 0; k < a + b; ++k) {
    double sgn = k < a ? -1.0 : 1.0;
    q.push_back(0.0);
    for (int j = static_cast<int>(q.size()) - 1; j > 0; --j) q[j] = q[j] * 1.0 + sgn * q[j - 1];
  }
  for (int k = 0; k < d; ++k) {
    for (int j = 1; j < static_cast<int>(q.size()); ++j) q[j - 1] = j * q[j];
    q.pop_back();
  }

  // The derivative vanishes at +1 to order m - n and at -1 to order m + n
  // (when positive); dividing those roots out leaves nonnegative half powers,
  // so the endpoint values are the analytic limits rather than 0 * inf.
  double scale = 0.0;
  for (double c : q) scale = std::max(scale, std::abs(c));
  auto divide_root = [&](double root) {
    // q(x) = (x - root) s(x) + rem with rem = q(root) known to vanish.
    double carry = q.back();
    for (int j = static_cast<int>(q.size()) - 2; j >= 0; --j) {
      double next = q[j] + root * carry;
      q[j] = carry;
      carry = next;
    }
    if (std::abs(carry) > 1e-9 * scale)
      throw NumericalError("legendre_P: expected root missing from derivative polynomial");
    q.pop_back();
  };
  const int r1 = std::max(0, (m_x2 - n_x2) / 2);
  const int r2 = std::max(0, (m_x2 + n_x2) / 2);
  for (int k = 0; k < r1; ++k) divide_root(1.0);   // divisor (x - 1) = -(1 - x)
  for (int k = 0; k < r2; ++k) divide_root(-1.0);  // divisor (x + 1)
  double sign_fix = (r1 & 1) ? -1.0 : 1.0;

  double val = 0.0;
  for (int j = static_cast<int>(q.size()) - 1; j >= 0; --j) val = val * x + q[j];

  double logc = -0.5 * l_x2 * std::log(2.0)
                + 0.5 * (lg((l_x2 + m_x2) / 2 + 1) - lg((l_x2 - m_x2) / 2 + 1)
                         - lg((l_x2 - n_x2) / 2 + 1) - lg((l_x2 + n_x2) / 2 + 1));
  double sign = (((l_x2 - n_x2) / 2) & 1) ? -1.0 : 1.0;
  double e1 = 0.25 * std::abs(n_x2 - m_x2);
  double e2 = 0.25 * std::abs(n_x2 + m_x2);
  double out = sign * sign_fix * std::exp(logc) * std::pow(1.0 - x, e1) * std::pow(1.0 + x, e2) * val;
  if (!std::isfinite(out)) throw NumericalError("legendre_P: non-finite value");
  return out;
}

std::pair<double, double> product_weights(int iu, int iv, int l_x2, int im, int in) {
  int fp_u = iu ? im + 1 : l_x2 - im + 1;
  int fp_v = iv ? in + 1 : l_x2 - in + 1;
  int fm_u = iu ? l_x2 - im : im;
  int fm_v = iv ? l_x2 - in : in;
  double rel = (iu == iv) ? 1.0 : -1.0;
  double inv = 1.0 / (l_x2 + 1);
  return {std::sqrt(double(fp_u) * fp_v) * inv, rel * std::sqrt(double(fm_u) * fm_v) * inv};
}

std::vector<RMat> reduced_matrices(int L_x2, double theta) {
  double s = std::sin(theta / 2), c = std::cos(theta / 2);
  int closed_top = std::min(L_x2, kLadderSwitchX2);
  std::vector<double> spow(closed_top + 1), cpow(closed_top + 1);
  spow[0] = cpow[0] = 1.0;
  for (int k = 1; k <= closed_top; ++k) {
    spow[k] = spow[k - 1] * s;
    cpow[k] = cpow[k - 1] * c;
  }
  std::vector<RMat> P;
  P.reserve(L_x2 + 1);
  for (int l = 0; l <= closed_top; ++l) P.push_back(closed_block(l, spow, cpow));

  // Ladder: the product expansion t^{1/2}_{uv} t^l = Wp t^{l+1/2} + Wm t^{l-1/2}
  // holds entrywise for the reduced matrices (the phases factor out). The
  // channel is chosen per entry so the raising weight Wp stays O(1): raising
  // from below for low target weights, from above for high ones. A fixed
  // channel leaves Wp ~ 1/sqrt(l) at the far corner and the division
  // amplifies roundoff exponentially in the number of ladder steps.
  const double ph[2][2] = {{c, s}, {-s, c}};
  for (int l = closed_top + 1; l <= L_x2; ++l) {
    int d = l + 1;
    RMat M(d, d);
    const RMat& P1 = P[l - 1];
    const RMat& P2 = P[l - 2];
    for (int imp = 0; imp < d; ++imp) {
      int iu = 2 * imp >= d ? 1 : 0;
      for (int inp = 0; inp < d; ++inp) {
        int iv = 2 * inp >= d ? 1 : 0;
        auto [wp, wm] = product_weights(iu, iv, l - 1, imp - iu, inp - iv);
        double val = ph[iu][iv] * P1(imp - iu, inp - iv);
        if (wm != 0.0 && imp >= 1 && inp >= 1 && imp - 1 < l - 1 && inp - 1 < l - 1)
          val -= wm * P2(imp - 1, inp - 1);
        M(imp, inp) = val / wp;
      }
    }
    P.push_back(std::move(M));
  }
  if (fault_wigner_phase())
    for (RMat& M : P) M *= fault_scale();
  return P;
}

RMat reduced_matrix(int l_x2, double theta) {
  if (l_x2 <= kLadderSwitchX2) {
    double s = std::sin(theta / 2), c = std::cos(theta / 2);
    std::vector<double> spow(l_x2 + 1), cpow(l_x2 + 1);
    spow[0] = cpow[0] = 1.0;
    for (int k = 1; k <= l_x2; ++k) {
      spow[k] = spow[k - 1] * s;
      cpow[k] = cpow[k - 1] * c;
    }
    return closed_block(l_x2, spow, cpow) * fault_scale();
  }
  return reduced_matrices(l_x2, theta).back();
}

Mat wigner_matrix(int l_x2, const EulerAngles& e) {
  RMat P = reduced_matrix(l_x2, e.theta);
  int d = l_x2 + 1;
  Vec row(d), col(d);
  for (int im = 0; im < d; ++im) {
    double m = half(2 * im - l_x2);
    row(im) = std::exp(cplx(0, m * e.phi));
  }
  for (int in = 0; in < d; ++in) {
    double n = half(2 * in - l_x2);
    col(in) = std::exp(cplx(0, n * e.psi));
  }
  Mat T(d, d);
  for (int im = 0; im < d; ++im)
    for (int in = 0; in < d; ++in)
      T(im, in) = row(im) * col(in) * quarter_phase(in - im) * P(im, in);
  return T;
}

Mat wigner_matrix(int l_x2, const GroupElement& g) { return wigner_matrix(l_x2, to_euler(g)); }

void calibrate_spin_half() {
  static const bool done = [] {
    Eigen::Matrix2cd C;
    C << cplx(0, 0), cplx(-1, 0), cplx(0, -1), cplx(0, 0);
    std::mt19937_64 rng(1297553);
    for (int k = 0; k < 12; ++k) {
      GroupElement g = random_element(rng);
      Mat T = wigner_matrix(1, g);
      Mat want = C * g.matrix() * C.adjoint();
      if ((T - want).cwiseAbs().maxCoeff() > 1e-12)
        throw NumericalError("spin-half block disagrees with the defining representation");
    }
    return true;
  }();
  (void)done;
}

}  // namespace su2pdo
