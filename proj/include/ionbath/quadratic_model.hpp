#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ionbath {

using Index = Eigen::Index;

// H = sum_i p_i^2 / (2 m_i) + (1/2) x^T V x
struct QuadraticModel {
  Eigen::VectorXd masses;
  Eigen::MatrixXd potential;
  std::vector<std::string> labels;

  Index size() const { return masses.size(); }
  // W = M^{-1/2} V M^{-1/2}
  Eigen::MatrixXd weighted_potential() const;
  // Throws invalid-argument on shape mismatch, non-positive masses or asymmetry above 1e-14 relative.
  void validate() const;
};

enum class Parity { none, even, odd };
const char* to_string(Parity p);

// Mirror permutation on coordinates: reflection[i] is the image of i. Must be an involution.
using Reflection = std::vector<Index>;

// Splits a mirror-symmetric model into even and odd blocks.
// Orbits are visited in the order of `representatives` (every orbit must appear once);
// the even vector of orbit {r, s} is (e_r + e_s)/sqrt2 and the odd one (e_r - e_s)/sqrt2.
// Fixed points of the reflection only contribute to the even block.
struct ParitySplit {
  QuadraticModel even;
  QuadraticModel odd;
  Eigen::MatrixXd even_basis;  // full x even, orthonormal columns
  Eigen::MatrixXd odd_basis;   // full x odd
  std::vector<Index> even_source;  // representative full-model coordinate of each even coordinate
  std::vector<Index> odd_source;
  double leakage = 0.0;  // max |even-odd cross entry| of the transformed potential
};

// tol is relative to max |V|. Throws asymmetric-configuration when masses differ on an orbit
// or the cross block exceeds tol.
ParitySplit split_by_reflection(const QuadraticModel& model, const Reflection& reflection,
                                const std::vector<Index>& representatives, double tol = 1e-10);

// Permutation matrix of a reflection.
Eigen::MatrixXd reflection_matrix(const Reflection& reflection);

}  // namespace ionbath
