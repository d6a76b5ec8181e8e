#pragma once

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace testing_support {

inline std::vector<double> sorted(const Eigen::VectorXd& v) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end());
  return s;
}

inline double max_sorted_difference(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a.size() != b.size()) return 1e300;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Central-difference Hessian of a scalar function.
inline Eigen::MatrixXd numeric_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                       const Eigen::VectorXd& x0, double h) {
  const Eigen::Index n = x0.size();
  Eigen::MatrixXd H(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      auto at = [&](double si, double sj) {
        Eigen::VectorXd x = x0;
        x(i) += si * h;
        x(j) += sj * h;
        return f(x);
      };
      H(i, j) = H(j, i) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
    }
  return H;
}

// Eigenvalues of M^{-1/2} V M^{-1/2}.
inline std::vector<double> weighted_eigenvalues(const Eigen::VectorXd& masses,
                                                const Eigen::MatrixXd& V) {
  const Eigen::VectorXd s = masses.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd W = s.asDiagonal() * V * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (W + W.transpose()));
  return sorted(es.eigenvalues());
}

}  // namespace testing_support
