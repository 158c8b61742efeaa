#include "su2pdo/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "su2pdo/kernels.hpp"
#include "su2pdo/wigner.hpp"

namespace su2pdo {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Gauss-Legendre nodes (ascending) and weights on [-1,1], weights sum to 2.
void gauss_legendre(int n, std::vector<double>& xs, std::vector<double>& ws) {
  xs.assign(n, 0.0);
  ws.assign(n, 0.0);
  for (int k = 0; k < n; ++k) {
    double x = std::cos(kPi * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        p0 = 1.0;
        p1 = x;
        for (int j = 2; j <= n; ++j) {
          double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        break;
      }
    }
    xs[n - 1 - k] = x;
    ws[n - 1 - k] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

GridSpec default_spec(int band_x2) {
  return GridSpec{4 * band_x2 + 2, 2 * band_x2 + 2, 4 * band_x2 + 2};
}

int product_band_of(const GridSpec& s) {
  return std::min({2 * s.n_phi - 1, s.n_psi - 1, 4 * s.n_theta - 4});
}

cplx quarter_power(int q) {
  // (-i)^q
  switch (((q % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

}  // namespace

QuadratureGrid::QuadratureGrid(int band_x2) : QuadratureGrid(default_spec(band_x2)) {}

QuadratureGrid::QuadratureGrid(const GridSpec& spec) : spec_(spec) {
  if (spec.n_phi < 1 || spec.n_theta < 1 || spec.n_psi < 1)
    throw NumericalError("quadrature grid needs positive node counts");
  for (int doubling = 0;; ++doubling) {
    build();
    double wsum = weights_.sum();
    double res = std::abs(wsum - 1.0) <= 1e-12 ? gram_residual(band_x2()) : 1.0;
    if (res <= 1e-10) break;
    if (doubling == 2) {
      std::ostringstream os;
      os << "quadrature grid (" << spec_.n_phi << "," << spec_.n_theta << "," << spec_.n_psi
         << ") failed its Gram self-test after refinement (residual " << res << ")";
      throw NumericalError(os.str());
    }
    spec_.n_phi *= 2;
    spec_.n_theta *= 2;
    spec_.n_psi *= 2;
  }
}

void QuadratureGrid::build() {
  certified_product_band_x2_ = product_band_of(spec_);
  std::vector<double> xs;
  gauss_legendre(spec_.n_theta, xs, theta_weights_);
  thetas_.resize(spec_.n_theta);
  for (int i = 0; i < spec_.n_theta; ++i) thetas_[i] = std::acos(xs[i]);
  weights_.resize(spec_.n_phi * spec_.n_theta * spec_.n_psi);
  const double scale = 1.0 / (2.0 * spec_.n_phi * spec_.n_psi);
  int k = 0;
  for (int ip = 0; ip < spec_.n_phi; ++ip)
    for (int it = 0; it < spec_.n_theta; ++it)
      for (int is = 0; is < spec_.n_psi; ++is) weights_[k++] = theta_weights_[it] * scale;
  reduced_cache_.assign(spec_.n_theta, {});
  dense_cache_.clear();
}

double QuadratureGrid::phi(int i) const { return -kPi + 2.0 * kPi * (i + 1) / spec_.n_phi; }
double QuadratureGrid::psi(int i) const {
  return -2.0 * kPi + 4.0 * kPi * (i + 1) / spec_.n_psi;
}

EulerAngles QuadratureGrid::node_euler(int k) const {
  const int is = k % spec_.n_psi;
  const int it = (k / spec_.n_psi) % spec_.n_theta;
  const int ip = k / (spec_.n_psi * spec_.n_theta);
  return EulerAngles{phi(ip), thetas_[it], psi(is)};
}

GroupElement QuadratureGrid::node(int k) const { return from_euler(node_euler(k)); }

const std::vector<RMat>& QuadratureGrid::reduced_at_theta(int i_theta, int band_x2) const {
  auto& cache = reduced_cache_[i_theta];
  if (static_cast<int>(cache.size()) <= band_x2)
    cache = reduced_matrices(band_x2, thetas_[i_theta]);
  return cache;
}

const Mat& QuadratureGrid::dense_block(int l_x2) const {
  auto hit = dense_cache_.find(l_x2);
  if (hit != dense_cache_.end()) return hit->second;
  const int d = l_x2 + 1;
  const int N = node_count();
  Mat T(N, d * d);
  std::vector<cplx> col_phase(d), row_phase(d);
  int k = 0;
  for (int ip = 0; ip < spec_.n_phi; ++ip) {
    const double ph = phi(ip);
    for (int it = 0; it < spec_.n_theta; ++it) {
      const RMat& P = reduced_at_theta(it, l_x2)[l_x2];
      for (int is = 0; is < spec_.n_psi; ++is, ++k) {
        const double ps = psi(is);
        for (int a = 0; a < d; ++a) {
          const int m_x2 = 2 * a - l_x2;
          row_phase[a] = std::exp(cplx(0.0, 0.5 * m_x2 * ph));
          col_phase[a] = std::exp(cplx(0.0, 0.5 * m_x2 * ps));
        }
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            T(k, a * d + b) = row_phase[a] * col_phase[b] * quarter_power(b - a) * P(a, b);
      }
    }
  }
  return dense_cache_.emplace(l_x2, std::move(T)).first->second;
}

double QuadratureGrid::gram_residual(int band_x2) const {
  double worst = 0.0;
  // Exponential sums over the two uniform angles: these are the factors of
  // every off-diagonal Gram entry. Odd doubled frequencies only ever occur in
  // cross-parity pairs, where the psi sum (full 4pi period) is the factor
  // that has to vanish; the phi sum only needs the even ones.
  for (int m = 1; m <= 2 * band_x2; ++m) {
    cplx ss = 0.0;
    for (int i = 0; i < spec_.n_psi; ++i) ss += std::exp(cplx(0.0, 0.5 * m * psi(i)));
    worst = std::max(worst, std::abs(ss) / spec_.n_psi);
    if (m % 2 == 0) {
      cplx sp = 0.0;
      for (int i = 0; i < spec_.n_phi; ++i) sp += std::exp(cplx(0.0, 0.5 * m * phi(i)));
      worst = std::max(worst, std::abs(sp) / spec_.n_phi);
    }
  }
  // Legendre moments certify the theta rule to its stated degree.
  for (int p = 0; p <= 2 * spec_.n_theta - 1; ++p) {
    double mom = 0.0;
    for (int i = 0; i < spec_.n_theta; ++i)
      mom += theta_weights_[i] * std::pow(std::cos(thetas_[i]), p);
    const double exact = (p % 2 == 0) ? 2.0 / (p + 1) : 0.0;
    worst = std::max(worst, std::abs(mom - exact) / 2.0);
  }
  // Reduced-entry Grams over the surviving index pairs (same m and n, hence
  // same parity of l): the diagonal of the matrix-entry Gram in factored form.
  for (int l = 0; l <= band_x2; ++l) {
    for (int lp = l; lp <= band_x2; lp += 2) {
      for (int a = 0; a <= l; ++a) {
        const int m_x2 = 2 * a - l;
        for (int b = 0; b <= l; ++b) {
          const int n_x2 = 2 * b - l;
          const int ap = (m_x2 + lp) / 2;
          const int bp = (n_x2 + lp) / 2;
          double acc = 0.0;
          for (int it = 0; it < spec_.n_theta; ++it) {
            const auto& tabs = reduced_at_theta(it, band_x2);
            acc += theta_weights_[it] * tabs[l](a, b) * tabs[lp](ap, bp);
          }
          const double val = std::sqrt(double(l + 1) * double(lp + 1)) * 0.5 * acc;
          const double expect = (l == lp) ? 1.0 : 0.0;
          worst = std::max(worst, std::abs(val - expect));
        }
      }
    }
  }
  return worst;
}

namespace {
std::map<std::tuple<int, int, int>, GridPtr>& grid_registry() {
  static std::map<std::tuple<int, int, int>, GridPtr> reg;
  return reg;
}
}  // namespace

GridPtr quadrature_grid(const GridSpec& spec) {
  auto key = std::make_tuple(spec.n_phi, spec.n_theta, spec.n_psi);
  auto& reg = grid_registry();
  auto it = reg.find(key);
  if (it != reg.end()) return it->second;
  auto g = std::make_shared<const QuadratureGrid>(spec);
  reg[key] = g;
  return g;
}

GridPtr quadrature_grid(int band_x2) { return quadrature_grid(default_spec(band_x2)); }

GridPtr quadrature_grid_for_products(int analysis_band_x2, int product_band_x2) {
  int P = std::max(product_band_x2, 2 * analysis_band_x2);
  GridSpec s;
  s.n_phi = P / 2 + 4 - (P / 2 % 2);  // even, > P/2 + 1
  s.n_psi = P + 2;
  s.n_theta = P / 4 + 3;
  return quadrature_grid(s);
}

namespace {

void check_product_band(const QuadratureGrid& g, int band_x2, int f_band_x2, const char* op) {
  const int need = f_band_x2 + band_x2;
  if (need <= g.certified_product_band_x2()) return;
  std::ostringstream os;
  os << op << ": grid (" << g.spec().n_phi << "," << g.spec().n_theta << "," << g.spec().n_psi
     << ") integrates products of band " << g.certified_product_band_x2()
     << "/2 exactly, but band " << f_band_x2 << "/2 data against representations up to "
     << band_x2 << "/2 needs " << need
     << "/2; use quadrature_grid_for_products(" << band_x2 << ", " << need << ")";
  throw NumericalError(os.str());
}

}  // namespace

CoeffStack analyze(const QuadratureGrid& g, const Vec& values, int band_x2, int f_band_x2) {
  if (f_band_x2 < 0) f_band_x2 = band_x2;
  check_product_band(g, band_x2, f_band_x2, "analyze");
  if (values.size() != g.node_count()) throw NumericalError("analyze: value count != node count");
  const auto& s = g.spec();
  const int L = band_x2;
  const int nm = 2 * L + 1;

  Mat phase_phi(s.n_phi, nm);
  for (int mi = 0; mi < nm; ++mi)
    for (int i = 0; i < s.n_phi; ++i)
      phase_phi(i, mi) = std::exp(cplx(0.0, 0.5 * (mi - L) * g.phi(i)));
  Mat phase_psi(nm, s.n_psi);
  for (int ni = 0; ni < nm; ++ni)
    for (int i = 0; i < s.n_psi; ++i)
      phase_psi(ni, i) = std::exp(cplx(0.0, 0.5 * (ni - L) * g.psi(i)));

  // F1[(theta,psi), m] = sum_phi f * e^{i(m/2)phi}
  Eigen::Map<const Mat> M0(values.data(), s.n_theta * s.n_psi, s.n_phi);
  Mat F1 = M0 * phase_phi;
  // F2 per m: [n, theta] = sum_psi e^{i(n/2)psi} F1
  std::vector<Mat> F2(nm);
  for (int mi = 0; mi < nm; ++mi) {
    Eigen::Map<const Mat> slab(F1.col(mi).data(), s.n_psi, s.n_theta);
    F2[mi] = phase_psi * slab;  // nm x n_theta
  }

  CoeffStack out(L);
  for (int l = 0; l <= L; ++l) {
    Mat& blk = out.block(l);
    for (int a = 0; a <= l; ++a) {
      const int mi = (2 * a - l) + L;
      for (int b = 0; b <= l; ++b) {
        const int ni = (2 * b - l) + L;
        cplx acc = 0.0;
        for (int it = 0; it < s.n_theta; ++it)
          acc += g.reduced_at_theta(it, L)[l](a, b) * F2[mi](ni, it) * g.weights()[it * s.n_psi];
        blk(a, b) = quarter_power(b - a) * acc;
      }
    }
  }
  return out;
}

Vec synthesize(const CoeffStack& c, const QuadratureGrid& g) {
  const auto& s = g.spec();
  const int L = c.band_x2();
  const int nm = 2 * L + 1;

  Mat phase_phi(s.n_phi, nm);
  for (int mi = 0; mi < nm; ++mi)
    for (int i = 0; i < s.n_phi; ++i)
      phase_phi(i, mi) = std::exp(cplx(0.0, 0.5 * (mi - L) * g.phi(i)));
  Mat phase_psi(nm, s.n_psi);
  for (int ni = 0; ni < nm; ++ni)
    for (int i = 0; i < s.n_psi; ++i)
      phase_psi(ni, i) = std::exp(cplx(0.0, 0.5 * (ni - L) * g.psi(i)));

  // G2 per m: [n, theta] = sum_l (l_x2+1) c_mn conj(phase) P_mn(theta)
  std::vector<Mat> G2(nm, Mat::Zero(nm, s.n_theta));
  for (int l = 0; l <= L; ++l) {
    const Mat& blk = c.block(l);
    for (int a = 0; a <= l; ++a) {
      const int mi = (2 * a - l) + L;
      for (int b = 0; b <= l; ++b) {
        const int ni = (2 * b - l) + L;
        const cplx w = double(l + 1) * blk(a, b) * std::conj(quarter_power(b - a));
        if (w == 0.0) continue;
        for (int it = 0; it < s.n_theta; ++it)
          G2[mi](ni, it) += w * g.reduced_at_theta(it, L)[l](a, b);
      }
    }
  }
  // G[(theta,psi), m] then contraction against conj(phase_phi)
  Mat G(s.n_theta * s.n_psi, nm);
  for (int mi = 0; mi < nm; ++mi) {
    Mat slab = phase_psi.adjoint() * G2[mi];  // n_psi x n_theta
    G.col(mi) = Eigen::Map<Vec>(slab.data(), s.n_theta * s.n_psi);
  }
  Mat out = G * phase_phi.conjugate().transpose();  // (theta,psi) x phi
  return Eigen::Map<Vec>(out.data(), g.node_count());
}

std::vector<cplx> synthesize(const CoeffStack& c, const std::vector<GroupElement>& points) {
  std::vector<cplx> out(points.size(), cplx(0.0));
  for (std::size_t k = 0; k < points.size(); ++k) {
    cplx acc = 0.0;
    for (int l = 0; l <= c.band_x2(); ++l) {
      Mat t = wigner_matrix(l, points[k]);
      acc += double(l + 1) * (c.block(l).array() * t.array().conjugate()).sum();
    }
    out[k] = acc;
  }
  return out;
}

CoeffStack analyze_dense(const QuadratureGrid& g, const Vec& values, int band_x2, int f_band_x2) {
  if (f_band_x2 < 0) f_band_x2 = band_x2;
  check_product_band(g, band_x2, f_band_x2, "analyze");
  if (values.size() != g.node_count()) throw NumericalError("analyze: value count != node count");
  const int N = g.node_count();
  CoeffStack out(band_x2);
  for (int l = 0; l <= band_x2; ++l) {
    const Mat& T = g.dense_block(l);
    const int d = l + 1;
    Mat& blk = out.block(l);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        blk(a, b) =
            kernels::weighted_dot(g.weights().data(), values.data(), T.col(a * d + b).data(), N);
  }
  return out;
}

Vec synthesize_dense(const CoeffStack& c, const QuadratureGrid& g) {
  const int N = g.node_count();
  Vec out = Vec::Zero(N);
  for (int l = 0; l <= c.band_x2(); ++l) {
    const Mat& T = g.dense_block(l);
    const int d = l + 1;
    const Mat& blk = c.block(l);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const cplx coef = double(l + 1) * blk(a, b);
        if (coef == 0.0) continue;
        kernels::axpy_conj(coef, T.col(a * d + b).data(), out.data(), N);
      }
  }
  return out;
}

CoeffStack convolve(const CoeffStack& f, const CoeffStack& g) {
  const int band = std::max(f.band_x2(), g.band_x2());
  CoeffStack a = f.truncated(band);
  CoeffStack b = g.truncated(band);
  CoeffStack out(band);
  for (int l = 0; l <= band; ++l) out.block(l) = a.block(l) * b.block(l);
  return out;
}

CoeffStack conjugate_transform(const CoeffStack& f, const GroupElement& u) {
  CoeffStack out(f.band_x2());
  for (int l = 0; l <= f.band_x2(); ++l) {
    Mat t = wigner_matrix(l, u);
    out.block(l) = t * f.block(l) * t.adjoint();
  }
  return out;
}

double weight(int xi_x2) {
  const double xi = 0.5 * xi_x2;
  return std::sqrt(1.0 + xi * (xi + 1.0));
}

double max_block_operator_norm(const CoeffStack& a) {
  double best = 0.0;
  for (int l = 0; l <= a.band_x2(); ++l) {
    Eigen::JacobiSVD<Mat> svd(a.block(l));
    if (svd.singularValues().size() > 0) best = std::max(best, svd.singularValues()[0]);
  }
  return best;
}

double convolution_operator_norm(const CoeffStack& a, const QuadratureGrid& g,
                                 std::mt19937_64& rng) {
  // Left convolution acts on coefficients as f_hat(l) -> f_hat(l) a_hat(l);
  // iterate the normal map f_hat -> f_hat a_hat a_hat^H from a random grid
  // function, with the Plancherel norm as the inner product.
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec start(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) start[i] = cplx(gauss(rng), gauss(rng));
  CoeffStack x = analyze(g, start, a.band_x2());
  std::vector<Mat> normal(a.band_x2() + 1);
  for (int l = 0; l <= a.band_x2(); ++l) normal[l] = a.block(l) * a.block(l).adjoint();

  double norm0 = stack_norm(x);
  if (norm0 == 0.0) throw NumericalError("operator norm: zero start vector");
  for (int l = 0; l <= x.band_x2(); ++l) x.block(l) /= norm0;

  double prev = 0.0;
  for (int it = 0; it < 200000; ++it) {
    CoeffStack y(x.band_x2());
    for (int l = 0; l <= x.band_x2(); ++l) y.block(l) = x.block(l) * normal[l];
    const double rayleigh = std::abs(parseval_inner(y, x));
    const double ynorm = stack_norm(y);
    if (ynorm == 0.0) return 0.0;
    for (int l = 0; l <= y.band_x2(); ++l) y.block(l) /= ynorm;
    x = std::move(y);
    if (it > 3 && std::abs(rayleigh - prev) <= 1e-14 * std::max(1.0, rayleigh)) {
      prev = rayleigh;
      break;
    }
    prev = rayleigh;
  }
  return std::sqrt(prev);
}

}  // namespace su2pdo
