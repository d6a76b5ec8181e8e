#pragma once

#include <utility>
#include <vector>

#include "ionbath/quadratic_model.hpp"

namespace ionbath {

// Bulk chain of N pinned oscillators with nearest-neighbour springs and two defects.
// Coordinates: (X1, X2, x_0, ..., x_{N-1}) with bulk sites in physical order. The attach
// index n is the folded distance of the attach sites from the centre: sites c-n and c+n
// for N odd (c the central site), c-1-n and c+n for N even (c = N/2). X1 couples to the
// right site (+n), X2 to its mirror image. This gives d = 2n-1 interposed sites for N odd
// and d = 2n for N even.
struct NNSpec {
  int n_bulk = 5;
  double bulk_mass = 1.0;
  double defect_mass = 1.0;
  double bulk_frequency = 1.0;    // omega
  double spring = 1.0;            // kappa
  double defect_frequency = 1.0;  // Omega (bare)
  double coupling = 0.0;          // gamma
  int attach_index = 1;

  void validate() const;
  int max_attach() const { return n_bulk % 2 == 1 ? (n_bulk - 1) / 2 : n_bulk / 2 - 1; }
  int interposed() const { return n_bulk % 2 == 1 ? 2 * attach_index - 1 : 2 * attach_index; }
  double shifted_defect_frequency() const;  // sqrt(Omega^2 + gamma/M)
};

// Bulk site indices (left, right) the defects attach to.
std::pair<Index, Index> nn_attach_sites(const NNSpec& spec);

QuadraticModel build_nn_model(const NNSpec& spec);

// Mirror reflection X1 <-> X2, x_j <-> x_{N-1-j}.
Reflection nn_reflection(int n_bulk);

// One parity block over (X_p, x_{0,p}, ..., x_{A,p}); the odd block has no x_0 for N odd.
struct ParityModel {
  Parity parity = Parity::even;
  QuadraticModel model;
  double shifted_defect_frequency = 0.0;
  int attach_index = 0;
  std::vector<int> folded;  // folded distance of each site coordinate (entry 0 = defect, -1)
  Eigen::MatrixXd basis;    // full-model coordinates x block coordinates
};

std::pair<ParityModel, ParityModel> parity_decompose_nn(const NNSpec& spec);

struct LocalizedMode {
  Eigen::VectorXd vector;  // physical amplitudes in block coordinates, v^T M v = 1
  double resonance_frequency = 0.0;
  bool exact_decoupling = false;  // defect coordinate is uncoupled from the chain
};

// Candidate localized mode built from the defect coordinate and the ell-th eigenvector
// (ascending) of the interposed block. It is an exact eigenmode of the block model when the
// shifted defect frequency equals resonance_frequency.
LocalizedMode localized_mode_nn(const ParityModel& pm, int ell = 1);

// Eigenfrequencies of the interposed block (the exact decoupling frequencies).
std::vector<double> nn_resonances(const ParityModel& pm);

// max |V v - lambda M v| with lambda = resonance^2 taken from the block model.
double eigen_residual(const QuadraticModel& model, const Eigen::VectorXd& v, double frequency);

}  // namespace ionbath
