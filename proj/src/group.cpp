#include "su2pdo/group.hpp"

#include <cmath>

namespace su2pdo {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void GroupElement::renormalize() {
  double n = std::sqrt(std::norm(a) + std::norm(b));
  a /= n;
  b /= n;
}

GroupElement identity_element() { return GroupElement{}; }

GroupElement multiply(const GroupElement& g, const GroupElement& h) {
  // quaternion product in the (a, b) chart
  GroupElement r;
  r.a = g.a * h.a - g.b * std::conj(h.b);
  r.b = g.a * h.b + g.b * std::conj(h.a);
  if (r.det_drift() > 1e-13) r.renormalize();
  return r;
}

GroupElement inverse(const GroupElement& g) {
  return GroupElement{std::conj(g.a), -g.b};
}

GroupElement basic_rotation(int j, double t) {
  double c = std::cos(t / 2), s = std::sin(t / 2);
  switch (j) {
    case 1: return GroupElement{cplx(c, 0), cplx(0, s)};
    case 2: return GroupElement{cplx(c, 0), cplx(-s, 0)};
    case 3: return GroupElement{cplx(c, s), cplx(0, 0)};
    default: throw std::invalid_argument("basic_rotation: axis must be 1, 2, or 3");
  }
}

Eigen::Matrix2cd algebra_generator(int j) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  const cplx i(0, 1);
  switch (j) {
    case 1: m << 0, 0.5 * i, 0.5 * i, 0; break;
    case 2: m << 0, -0.5, 0.5, 0; break;
    case 3: m << 0.5 * i, 0, 0, -0.5 * i; break;
    default: throw std::invalid_argument("algebra_generator: axis must be 1, 2, or 3");
  }
  return m;
}

Eigen::Matrix2cd algebra_matrix(const AlgebraVector& z) {
  return z.z[0] * algebra_generator(1) + z.z[1] * algebra_generator(2) +
         z.z[2] * algebra_generator(3);
}

GroupElement from_euler(const EulerAngles& e) {
  if (!(e.phi > -kPi - 1e-12 && e.phi <= kPi + 1e-12) ||
      !(e.theta >= -1e-12 && e.theta <= kPi + 1e-12) ||
      !(e.psi > -2 * kPi - 1e-12 && e.psi <= 2 * kPi + 1e-12))
    throw std::invalid_argument("from_euler: angles out of range");
  double c = std::cos(e.theta / 2), s = std::sin(e.theta / 2);
  double u = (e.phi + e.psi) / 2, v = (e.phi - e.psi) / 2;
  return GroupElement{c * std::polar(1.0, u), -s * std::polar(1.0, v)};
}

EulerAngles to_euler(const GroupElement& g) {
  EulerAngles e;
  double na = std::abs(g.a), nb = std::abs(g.b);
  e.theta = 2 * std::atan2(nb, na);
  if (nb < 1e-15) {  // theta = 0 chart boundary: phi = 0 by convention
    e.theta = 0;
    e.psi = 2 * std::atan2(g.a.imag(), g.a.real());
    return e;
  }
  if (na < 1e-15) {  // theta = pi: b = -e^{-i psi/2}
    e.theta = kPi;
    e.psi = -2 * std::atan2(-g.b.imag(), -g.b.real());
    if (e.psi <= -2 * kPi) e.psi += 4 * kPi;
    return e;
  }
  double s1 = std::arg(g.a);   // (phi + psi)/2
  double s2 = std::arg(-g.b);  // (phi - psi)/2
  e.phi = s1 + s2;
  e.psi = s1 - s2;
  // (phi, psi) -> (phi - 2pi, psi - 2pi) fixes the group element; psi alone is
  // free mod 4pi.
  if (e.phi > kPi) {
    e.phi -= 2 * kPi;
    e.psi -= 2 * kPi;
  } else if (e.phi <= -kPi) {
    e.phi += 2 * kPi;
    e.psi += 2 * kPi;
  }
  while (e.psi > 2 * kPi) e.psi -= 4 * kPi;
  while (e.psi <= -2 * kPi) e.psi += 4 * kPi;
  return e;
}

GroupElement exp_su2(const AlgebraVector& z) {
  double t = z.norm() / 2;
  double k;  // sin(t)/t with its analytic limit
  if (t < 1e-6) {
    k = 1.0 - t * t / 6.0;
  } else {
    k = std::sin(t) / t;
  }
  const cplx i(0, 1);
  GroupElement g;
  g.a = std::cos(t) + 0.5 * k * i * z.z[2];
  g.b = 0.5 * k * (i * z.z[0] - z.z[1]);
  if (g.det_drift() > 1e-13) g.renormalize();
  return g;
}

AlgebraVector log_su2(const GroupElement& g) {
  // exp gives a = cos t + i z3 k/2, b = (i z1 - z2) k/2 with k = sin(t)/t.
  double v1 = 2 * g.b.imag(), v2 = -2 * g.b.real(), v3 = 2 * g.a.imag();
  double vn = std::sqrt(v1 * v1 + v2 * v2 + v3 * v3);  // = 2 sin(t)
  double ca = g.a.real();
  double t = std::atan2(vn / 2, ca);
  if (ca < -1.0 + 1e-12 && vn < 1e-6)
    throw NumericalError("log_su2: branch point at -identity");
  double scale;  // t / sin(t)
  if (t < 1e-6) {
    scale = 1.0 + t * t / 6.0;
  } else {
    scale = t / std::sin(t);
  }
  return AlgebraVector{{v1 * scale, v2 * scale, v3 * scale}};
}

GroupElement random_element(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  double v[4];
  double s = 0;
  do {
    s = 0;
    for (double& x : v) {
      x = n(rng);
      s += x * x;
    }
  } while (s < 1e-12);
  s = std::sqrt(s);
  return GroupElement{cplx(v[0] / s, v[1] / s), cplx(v[2] / s, v[3] / s)};
}

GroupElement element_from_matrix(const Eigen::Matrix2cd& m) {
  GroupElement g{m(0, 0), m(0, 1)};
  if (g.det_drift() > 1e-9)
    throw std::invalid_argument("element_from_matrix: not close to SU(2)");
  g.renormalize();
  return g;
}

}  // namespace su2pdo
