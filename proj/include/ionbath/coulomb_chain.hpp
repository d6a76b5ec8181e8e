#pragma once

#include <utility>

#include "ionbath/quadratic_model.hpp"

namespace ionbath {

enum class SpacingModel { paul_trap, uniform };

// Natural units: light mass m = 1, U_par = 1, Q^2/(4 pi eps0) = charge^2, so the length unit
// l = (charge^2 / U_par)^{1/3} is 1 for the defaults.
struct ChainSpec {
  int n_ions = 2;
  double light_mass = 1.0;
  double heavy_mass = 1.0;
  int defect_distance = 0;  // ions strictly between the two defects; same parity as n_ions
  double axial_strength = 1.0;     // U_par; ignored when reference_frequency > 0
  double transverse_scale = 0.0;   // U0, U_perp(m) = (U0/m - U_par)/2
  double charge = 1.0;
  SpacingModel spacing_model = SpacingModel::paul_trap;
  double uniform_spacing = 1.0;    // a, uniform model only
  double reference_frequency = 0.0;  // omega_ref; > 0 rescales U_par = m (omega_ref ln N / N)^2

  void validate() const;
};

struct DefectSites {
  Index left = 0;   // site -n
  Index right = 0;  // site +n
};

DefectSites defect_sites(const ChainSpec& spec);

// Folded distance of a site from the chain centre: 0 for the central site (N odd) or the
// central pair (N even).
int folded_index(int n_ions, Index site);

// Mirror image site.
inline Index mirror_site(int n_ions, Index site) { return n_ions - 1 - site; }

struct EquilibriumConfiguration {
  Eigen::VectorXd positions;  // ascending
  double residual = 0.0;      // max |force|
  int iterations = 0;
};

double effective_axial_strength(const ChainSpec& spec);
double transverse_strength(const ChainSpec& spec, double mass);  // U_perp(m)

// omega_par(N) = omega_ref ln(N) / N
double axial_trap_frequency(int n_ions, double omega_ref);

// Damped Newton solve of U_par z_j = sum_i sign(z_j - z_i) Q^2 / (z_j - z_i)^2.
EquilibriumConfiguration solve_equilibrium(const ChainSpec& spec, int max_iterations = 200);

// Equilibrium for paul_trap, lattice positions a (j - (N-1)/2) for uniform.
EquilibriumConfiguration equilibrium_positions(const ChainSpec& spec);

// K_jl = 2 Q^2 / |z_j - z_l|^3 (zero diagonal)
Eigen::MatrixXd coulomb_couplings(const Eigen::VectorXd& positions, double charge);

// Masses (light everywhere, heavy at the defect sites).
Eigen::VectorXd chain_masses(const ChainSpec& spec, const DefectSites& sites);
// Axial block alone: V_par diagonal U_par + sum_l K_jl, off-diagonal -K_jk.
QuadraticModel axial_model(const ChainSpec& spec, const EquilibriumConfiguration& eq,
                           const DefectSites& sites);

// Axial V_par and transverse V_perp; heavy masses at the given sites.
// Throws transverse-instability when V_perp is not positive definite.
std::pair<QuadraticModel, QuadraticModel> build_potentials(const ChainSpec& spec,
                                                           const EquilibriumConfiguration& eq,
                                                           const DefectSites& sites);
std::pair<QuadraticModel, QuadraticModel> build_potentials(const ChainSpec& spec,
                                                           const EquilibriumConfiguration& eq);

// Full model over (q_0..q_{N-1}, x_0..x_{N-1}).
struct CoupledModel {
  QuadraticModel axial;
  QuadraticModel transverse;
  double coupling_strength = 0.0;
  DefectSites sites;
  QuadraticModel full;
};

CoupledModel apply_laser_coupling(const QuadraticModel& axial, const QuadraticModel& transverse,
                                  double gamma, const DefectSites& sites);

// Convenience: equilibrium + potentials + coupling.
CoupledModel build_coupled_model(const ChainSpec& spec, double gamma);

// Mirror reflection j <-> N-1-j applied to both blocks of a coupled model.
Reflection coupled_reflection(int n_ions);

}  // namespace ionbath
