#pragma once

#include <array>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace su2pdo {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Half-integers are carried everywhere as doubled integers ("x2"): l_x2 = 2l.
// Representation dimension for index l is l_x2 + 1.
inline int dim_of(int l_x2) { return l_x2 + 1; }
inline double half(int x2) { return 0.5 * x2; }

// Thrown for numerical failures the caller can act on (ellipticity, grid
// refinement cap, branch points). The CLI maps it to exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Multi-index over the three difference/derivative channels (+, -, 0).
struct MultiIndex {
  std::array<int, 3> a{0, 0, 0};
  int order() const { return a[0] + a[1] + a[2]; }
  double factorial() const;
  bool operator==(const MultiIndex&) const = default;
  bool operator<(const MultiIndex& o) const { return a < o.a; }
};

// Graded lexicographic enumeration of all |alpha| <= N; the term order used
// in every expansion and golden file.
std::vector<MultiIndex> multi_indices(int N);

inline double MultiIndex::factorial() const {
  auto f = [](int n) { double r = 1; for (int i = 2; i <= n; ++i) r *= i; return r; };
  return f(a[0]) * f(a[1]) * f(a[2]);
}

inline std::vector<MultiIndex> multi_indices(int N) {
  std::vector<MultiIndex> out;
  for (int tot = 0; tot <= N; ++tot)
    for (int a1 = tot; a1 >= 0; --a1)
      for (int a2 = tot - a1; a2 >= 0; --a2)
        out.push_back(MultiIndex{{a1, a2, tot - a1 - a2}});
  return out;
}

}  // namespace su2pdo
