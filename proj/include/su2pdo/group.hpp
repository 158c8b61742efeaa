#pragma once

#include <random>

#include "su2pdo/types.hpp"

namespace su2pdo {

// Unit quaternion storage: x = [[a, b], [-conj(b), conj(a)]]. Unitarity and
// det = 1 hold by construction up to normalization drift; multiply()
// renormalizes when |det - 1| exceeds 1e-13.
struct GroupElement {
  cplx a{1.0, 0.0};
  cplx b{0.0, 0.0};

  Eigen::Matrix2cd matrix() const {
    Eigen::Matrix2cd m;
    m << a, b, -std::conj(b), std::conj(a);
    return m;
  }
  double det_drift() const { return std::abs(std::norm(a) + std::norm(b) - 1.0); }
  void renormalize();
};

struct EulerAngles {
  double phi = 0;    // (-pi, pi]
  double theta = 0;  // [0, pi]
  double psi = 0;    // (-2pi, 2pi]
};

struct AlgebraVector {
  std::array<double, 3> z{0, 0, 0};
  double norm() const { return std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]); }
};

GroupElement identity_element();
GroupElement multiply(const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupElement& g);

// omega_j(t): the three one-parameter subgroups; basic_rotation(j, t) = exp(t X_j).
GroupElement basic_rotation(int j, double t);

// Basis of su(2) with [X1,X2]=X3, [X2,X3]=X1, [X3,X1]=X2 (entries exact halves).
Eigen::Matrix2cd algebra_generator(int j);
Eigen::Matrix2cd algebra_matrix(const AlgebraVector& z);

GroupElement from_euler(const EulerAngles& e);
EulerAngles to_euler(const GroupElement& g);

// Rodrigues form; analytic limit at z = 0.
GroupElement exp_su2(const AlgebraVector& z);
// Principal branch, ||z||/2 in [0, pi). Throws NumericalError at g = -I.
AlgebraVector log_su2(const GroupElement& g);

// Haar-uniform sample (normalized 4-dimensional Gaussian).
GroupElement random_element(std::mt19937_64& rng);

GroupElement element_from_matrix(const Eigen::Matrix2cd& m);

}  // namespace su2pdo
