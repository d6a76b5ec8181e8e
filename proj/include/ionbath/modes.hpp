#pragma once

#include <optional>
#include <vector>

#include "ionbath/coulomb_chain.hpp"
#include "ionbath/quadratic_model.hpp"

namespace ionbath {

struct ModeDecomposition {
  Eigen::VectorXd frequencies;  // ascending, >= 0
  Eigen::MatrixXd vectors;      // orthogonal; columns are mass-weighted eigenvectors
  Eigen::VectorXd masses;       // masses of the decomposed model
  std::vector<Parity> parity;   // per mode; empty unless a reflection was supplied

  Index size() const { return frequencies.size(); }
};

// Diagonalizes W = M^{-1/2} V M^{-1/2}. Eigenvalues in [-1e-10, 0) (relative to max |W|) are
// clamped to 0; anything more negative throws unstable-model. Each column is sign-fixed so
// that its largest-magnitude entry is positive.
ModeDecomposition normal_modes(const QuadraticModel& model);

// Same, but degenerate clusters are rotated into eigenvectors of the reflection so every mode
// carries a definite parity tag.
ModeDecomposition normal_modes(const QuadraticModel& model, const Reflection& reflection);

// Mass-unweighted displacement amplitudes O_{.j} / sqrt(m).
Eigen::VectorXd mode_profile(const ModeDecomposition& decomp, Index mode);

// Even/odd blocks of a coupled Coulomb model in coordinates (q_{f,+/-}, x_{f,+/-}) ordered by
// folded distance f from the centre. Throws asymmetric-configuration on cross-block leakage.
struct CoulombParity {
  ParitySplit split;
  Index axial_size_even = 0;  // number of axial coordinates in the even block
  Index axial_size_odd = 0;
  Index defect_axial_even = 0;  // index of q_{n,+} in the even block
  Index defect_axial_odd = 0;
  std::vector<int> folded_even;  // folded distance of every even coordinate
  std::vector<int> folded_odd;
  int defect_folded = 0;
};

CoulombParity parity_decompose_coulomb_full(const CoupledModel& model);
std::pair<QuadraticModel, QuadraticModel> parity_decompose_coulomb(const CoupledModel& model);

}  // namespace ionbath
