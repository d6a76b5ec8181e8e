#include "ionbath/modes.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "ionbath/errors.hpp"

namespace ionbath {

namespace {

void fix_signs(Eigen::MatrixXd& O) {
  for (Index j = 0; j < O.cols(); ++j) {
    Index imax = 0;
    O.col(j).cwiseAbs().maxCoeff(&imax);
    if (O(imax, j) < 0.0) O.col(j) *= -1.0;
  }
}

ModeDecomposition diagonalize(const QuadraticModel& model) {
  model.validate();
  ModeDecomposition out;
  out.masses = model.masses;
  if (model.size() == 0) return out;
  const Eigen::MatrixXd W = model.weighted_potential();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::unstable_model, "eigendecomposition failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double scale = std::max(1.0, W.cwiseAbs().maxCoeff());
  out.frequencies.resize(lam.size());
  for (Index j = 0; j < lam.size(); ++j) {
    if (lam(j) < -1e-10 * scale)
      throw Error(ErrorKind::unstable_model,
                  "negative eigenvalue " + std::to_string(lam(j)) + " (structural instability)");
    out.frequencies(j) = std::sqrt(std::max(lam(j), 0.0));
  }
  out.vectors = es.eigenvectors();
  fix_signs(out.vectors);
  return out;
}

}  // namespace

ModeDecomposition normal_modes(const QuadraticModel& model) { return diagonalize(model); }

ModeDecomposition normal_modes(const QuadraticModel& model, const Reflection& reflection) {
  ModeDecomposition out = diagonalize(model);
  const Index n = out.size();
  if (static_cast<Index>(reflection.size()) != n)
    throw Error(ErrorKind::dimension_mismatch, "reflection size differs from model size");
  const Eigen::MatrixXd P = reflection_matrix(reflection);
  // Work with eigenvalues to group clusters.
  const double scale = std::max(1.0, out.frequencies.cwiseAbs2().maxCoeff());
  Index start = 0;
  while (start < n) {
    Index stop = start + 1;
    while (stop < n && std::abs(out.frequencies(stop) * out.frequencies(stop) -
                                out.frequencies(start) * out.frequencies(start)) <
                           1e-9 * scale)
      ++stop;
    if (stop - start > 1) {
      const Index k = stop - start;
      Eigen::MatrixXd block = out.vectors.middleCols(start, k);
      Eigen::MatrixXd R = block.transpose() * P * block;
      R = 0.5 * (R + R.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
      out.vectors.middleCols(start, k) = block * es.eigenvectors();
    }
    start = stop;
  }
  fix_signs(out.vectors);
  out.parity.resize(n);
  for (Index j = 0; j < n; ++j) {
    const double p = out.vectors.col(j).dot(P * out.vectors.col(j));
    out.parity[j] = p > 0.5 ? Parity::even : (p < -0.5 ? Parity::odd : Parity::none);
  }
  return out;
}

Eigen::VectorXd mode_profile(const ModeDecomposition& decomp, Index mode) {
  if (mode < 0 || mode >= decomp.size())
    throw Error(ErrorKind::invalid_index, "mode index out of range");
  return decomp.vectors.col(mode).cwiseQuotient(decomp.masses.cwiseSqrt());
}

CoulombParity parity_decompose_coulomb_full(const CoupledModel& model) {
  const int n = static_cast<int>(model.axial.size());
  const Reflection r = coupled_reflection(n);
  // Representatives: right-hand sites, ordered by folded distance, axial block first.
  std::vector<Index> reps;
  // n/2 is the centre site (n odd) or the first right-hand site (n even).
  for (int j = n / 2; j < n; ++j) reps.push_back(j);
  for (int j = n / 2; j < n; ++j) reps.push_back(n + j);

  CoulombParity out;
  out.split = split_by_reflection(model.full, r, reps);
  const int nf = (n + 1) / 2;  // number of folded distances
  out.axial_size_even = nf;
  out.axial_size_odd = n / 2;
  for (Index src : out.split.even_source) out.folded_even.push_back(folded_index(n, src % n));
  for (Index src : out.split.odd_source) out.folded_odd.push_back(folded_index(n, src % n));
  out.defect_folded = folded_index(n, model.sites.right);
  for (Index i = 0; i < out.axial_size_even; ++i)
    if (out.split.even_source[i] == model.sites.right) out.defect_axial_even = i;
  for (Index i = 0; i < out.axial_size_odd; ++i)
    if (out.split.odd_source[i] == model.sites.right) out.defect_axial_odd = i;
  return out;
}

std::pair<QuadraticModel, QuadraticModel> parity_decompose_coulomb(const CoupledModel& model) {
  auto p = parity_decompose_coulomb_full(model);
  return {p.split.even, p.split.odd};
}

}  // namespace ionbath
