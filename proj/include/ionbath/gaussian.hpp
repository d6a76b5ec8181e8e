#pragma once

#include <complex>
#include <vector>

#include "ionbath/coulomb_chain.hpp"
#include "ionbath/modes.hpp"

namespace ionbath {

// Gaussian state over n modes, quadratures interleaved (q_1, p_1, q_2, p_2, ...), hbar = 1.
// Covariance Sigma_ij = <{xi_i, xi_j}>/2 - <xi_i><xi_j>; vacuum of a unit oscillator has 1/2.
struct CovarianceState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  Index modes() const { return mean.size() / 2; }
};

// Omega = direct sum of [[0, 1], [-1, 0]].
Eigen::MatrixXd symplectic_form(Index modes);

// Ascending symplectic eigenvalues (one per mode). Requires a positive definite covariance.
Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& covariance);

// Throws unphysical-covariance when a symplectic eigenvalue is below 1/2 - tol.
void check_physical(const Eigen::MatrixXd& covariance, double tol = 1e-9);

struct InitialStateSpec {
  double squeezing = 0.0;              // s
  double bath_temperature = 0.0;       // T in units of hbar omega_par / k_B
  double defect_mode_frequency = 0.0;  // omega_perp for the squeezed variances; 0 = mode's own
  bool transverse_ground = true;       // transverse bulk in its ground state (else thermal at T)

  void validate() const;
};

// Variances of one normal mode in mass-weighted mode coordinates.
struct ModeVariance {
  double position = 0.0;
  double momentum = 0.0;
};
ModeVariance thermal_variance(double omega, double temperature);
ModeVariance squeezed_variance(double omega, double s);

// Role of each coordinate for state preparation.
struct StateLayout {
  std::vector<Index> defects;   // defect coordinates whose localized modes are squeezed
  std::vector<bool> reservoir;  // true: thermal at T; false: ground state (if transverse_ground)
};

// Initial state in local coordinates of `model0` (the gamma = 0 model). The |defects| modes
// with the largest weight on the defect coordinates are squeezed, reservoir modes are thermal
// and the remaining modes are in their ground state.
CovarianceState prepare_initial_state(const QuadraticModel& model0, const StateLayout& layout,
                                      const InitialStateSpec& spec);
// Coulomb form: axial coordinates are the reservoir, the defect transverse coordinates x_{+-n}
// are squeezed. Requires gamma = 0.
CovarianceState prepare_initial_state(const CoupledModel& model0, const InitialStateSpec& spec);

struct Propagator {
  Eigen::MatrixXd symplectic;  // local interleaved coordinates
  double time = 0.0;
};

Propagator make_propagator(const ModeDecomposition& decomp, double t);

CovarianceState evolve(const CovarianceState& state, const Propagator& prop);

// 4x4 block of coordinates a and b (order a, then b).
CovarianceState reduce_to_defects(const CovarianceState& state, Index a, Index b);
// Transverse defect coordinates (x_{+n}, x_{-n}) of a coupled model state.
CovarianceState reduce_to_defects(const CovarianceState& state, const CoupledModel& model);

// Logarithmic negativity of a two-mode state (partial transpose flips the second momentum).
double log_negativity(const CovarianceState& two_mode);
double log_negativity(const Eigen::Matrix4d& covariance);

// Smallest symplectic eigenvalue of the partial transpose.
double partial_transpose_min_eigenvalue(const Eigen::Matrix4d& covariance);

// Rescales quadratures to dimensionless ones: q' = q sqrt(m w), p' = p / sqrt(m w) per mode.
CovarianceState to_dimensionless(const CovarianceState& state, const Eigen::VectorXd& mass_frequency);

// chi(alpha, beta) = Tr[rho D(alpha) (x) D(beta)] for a two-mode state in dimensionless
// quadratures with a = (q + i p)/sqrt2.
std::complex<double> characteristic_function(const CovarianceState& two_mode,
                                             std::complex<double> alpha, std::complex<double> beta);

}  // namespace ionbath
