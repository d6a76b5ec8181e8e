#include "ionbath/coulomb_chain.hpp"

#include <cmath>
#include <string>

#include "ionbath/errors.hpp"

namespace ionbath {

void ChainSpec::validate() const {
  if (n_ions < 1) throw Error(ErrorKind::invalid_argument, "n_ions must be >= 1");
  if (!(light_mass > 0.0) || !(heavy_mass > 0.0))
    throw Error(ErrorKind::invalid_argument, "masses must be positive");
  if (!(charge > 0.0)) throw Error(ErrorKind::invalid_argument, "charge must be positive");
  if (reference_frequency < 0.0)
    throw Error(ErrorKind::invalid_argument, "reference_frequency must be >= 0");
  if (reference_frequency == 0.0 && !(axial_strength > 0.0))
    throw Error(ErrorKind::invalid_argument, "axial_strength must be positive");
  if (reference_frequency > 0.0 && n_ions < 2)
    throw Error(ErrorKind::invalid_argument, "trap-frequency scaling needs n_ions >= 2");
  if (spacing_model == SpacingModel::uniform && !(uniform_spacing > 0.0))
    throw Error(ErrorKind::invalid_argument, "uniform_spacing must be positive");
  if (defect_distance < 0) throw Error(ErrorKind::invalid_index, "defect_distance must be >= 0");
}

DefectSites defect_sites(const ChainSpec& spec) {
  spec.validate();
  if (spec.n_ions < 2) throw Error(ErrorKind::invalid_index, "a defect pair needs n_ions >= 2");
  if (spec.defect_distance > spec.n_ions - 2)
    throw Error(ErrorKind::invalid_index, "defect_distance must lie in [0, n_ions-2]");
  if ((spec.n_ions - spec.defect_distance) % 2 != 0)
    throw Error(ErrorKind::invalid_index,
                "defect_distance must have the parity of n_ions for a symmetric pair");
  DefectSites s;
  s.left = (spec.n_ions - spec.defect_distance) / 2 - 1;
  s.right = spec.n_ions - 1 - s.left;
  return s;
}

int folded_index(int n_ions, Index site) {
  const int c = n_ions / 2;
  const int j = static_cast<int>(site);
  if (n_ions % 2 == 1) return std::abs(j - c);
  return j >= c ? j - c : c - 1 - j;
}

double axial_trap_frequency(int n_ions, double omega_ref) {
  if (n_ions < 2) throw Error(ErrorKind::invalid_argument, "axial_trap_frequency needs N >= 2");
  return omega_ref * std::log(static_cast<double>(n_ions)) / n_ions;
}

double effective_axial_strength(const ChainSpec& spec) {
  if (spec.reference_frequency > 0.0) {
    const double w = axial_trap_frequency(spec.n_ions, spec.reference_frequency);
    return spec.light_mass * w * w;
  }
  return spec.axial_strength;
}

double transverse_strength(const ChainSpec& spec, double mass) {
  return 0.5 * (spec.transverse_scale / mass - effective_axial_strength(spec));
}

namespace {

// Force balance in units U = 1, Q^2 = 1.
Eigen::VectorXd unit_forces(const Eigen::VectorXd& z) {
  const Index n = z.size();
  Eigen::VectorXd g(n);
  for (Index j = 0; j < n; ++j) {
    double left = 0.0, right = 0.0;
    for (Index i = 0; i < j; ++i) {
      const double d = z(j) - z(i);
      left += 1.0 / (d * d);
    }
    for (Index i = j + 1; i < n; ++i) {
      const double d = z(i) - z(j);
      right += 1.0 / (d * d);
    }
    g(j) = z(j) - (left - right);
  }
  return g;
}

Eigen::MatrixXd unit_jacobian(const Eigen::VectorXd& z) {
  Eigen::MatrixXd K = coulomb_couplings(z, 1.0);
  Eigen::MatrixXd J = -K;
  J.diagonal() = Eigen::VectorXd::Ones(z.size()) + K.rowwise().sum();
  return J;
}

bool ordered(const Eigen::VectorXd& z) {
  for (Index j = 1; j < z.size(); ++j)
    if (!(z(j) > z(j - 1))) return false;
  return true;
}

}  // namespace

Eigen::MatrixXd coulomb_couplings(const Eigen::VectorXd& positions, double charge) {
  const Index n = positions.size();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  const double q2 = charge * charge;
  for (Index j = 0; j < n; ++j)
    for (Index l = j + 1; l < n; ++l) {
      const double d = std::abs(positions(j) - positions(l));
      K(j, l) = K(l, j) = 2.0 * q2 / (d * d * d);
    }
  return K;
}

EquilibriumConfiguration solve_equilibrium(const ChainSpec& spec, int max_iterations) {
  spec.validate();
  if (spec.spacing_model != SpacingModel::paul_trap)
    throw Error(ErrorKind::invalid_argument, "solve_equilibrium needs the paul-trap spacing model");
  const int n = spec.n_ions;
  const double U = effective_axial_strength(spec);
  const double length = std::cbrt(spec.charge * spec.charge / U);

  EquilibriumConfiguration out;
  if (n == 1) {
    out.positions = Eigen::VectorXd::Zero(1);
    return out;
  }
  const double a0 = 2.29 * std::pow(static_cast<double>(n), -0.596);
  Eigen::VectorXd z(n);
  for (int j = 0; j < n; ++j) z(j) = a0 * (j - 0.5 * (n - 1));

  Eigen::VectorXd g = unit_forces(z);
  double res = g.cwiseAbs().maxCoeff();
  int it = 0;
  for (; it < max_iterations && res > 1e-13; ++it) {
    const Eigen::VectorXd step = unit_jacobian(z).llt().solve(g);
    double lambda = 1.0;
    bool accepted = false;
    while (lambda > 1e-10) {
      const Eigen::VectorXd trial = z - lambda * step;
      if (ordered(trial)) {
        const Eigen::VectorXd gt = unit_forces(trial);
        const double rt = gt.cwiseAbs().maxCoeff();
        if (rt < res) {
          z = trial;
          g = gt;
          res = rt;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
  }
  // Remove the antisymmetric roundoff so mirror symmetry holds to machine precision.
  z = 0.5 * (z - z.reverse()).eval();
  g = unit_forces(z);
  res = g.cwiseAbs().maxCoeff();

  out.iterations = it;
  // Force scale: U * length.
  out.residual = res * U * length;
  out.positions = length * z;
  if (!(out.residual < 1e-10))
    throw Error(ErrorKind::no_convergence,
                "equilibrium residual " + std::to_string(out.residual) + " after " +
                    std::to_string(it) + " iterations");
  return out;
}

EquilibriumConfiguration equilibrium_positions(const ChainSpec& spec) {
  if (spec.spacing_model == SpacingModel::paul_trap) return solve_equilibrium(spec);
  spec.validate();
  EquilibriumConfiguration out;
  const int n = spec.n_ions;
  out.positions.resize(n);
  for (int j = 0; j < n; ++j) out.positions(j) = spec.uniform_spacing * (j - 0.5 * (n - 1));
  return out;
}

namespace {

void check_sites(const ChainSpec& spec, const EquilibriumConfiguration& eq, const DefectSites& sites) {
  spec.validate();
  const int n = spec.n_ions;
  if (eq.positions.size() != n)
    throw Error(ErrorKind::dimension_mismatch, "equilibrium does not match n_ions");
  if (sites.left < 0 || sites.right >= n || sites.left >= sites.right)
    throw Error(ErrorKind::invalid_index, "defect sites out of range");
}

}  // namespace

Eigen::VectorXd chain_masses(const ChainSpec& spec, const DefectSites& sites) {
  Eigen::VectorXd masses = Eigen::VectorXd::Constant(spec.n_ions, spec.light_mass);
  masses(sites.left) = spec.heavy_mass;
  masses(sites.right) = spec.heavy_mass;
  return masses;
}

QuadraticModel axial_model(const ChainSpec& spec, const EquilibriumConfiguration& eq,
                           const DefectSites& sites) {
  check_sites(spec, eq, sites);
  const int n = spec.n_ions;
  const Eigen::MatrixXd K = coulomb_couplings(eq.positions, spec.charge);
  QuadraticModel axial;
  axial.masses = chain_masses(spec, sites);
  axial.potential = -K;
  axial.potential.diagonal() =
      Eigen::VectorXd::Constant(n, effective_axial_strength(spec)) + K.rowwise().sum();
  for (int j = 0; j < n; ++j) axial.labels.push_back("q[" + std::to_string(j) + "]");
  return axial;
}

std::pair<QuadraticModel, QuadraticModel> build_potentials(const ChainSpec& spec,
                                                           const EquilibriumConfiguration& eq,
                                                           const DefectSites& sites) {
  check_sites(spec, eq, sites);
  const int n = spec.n_ions;
  const Eigen::MatrixXd K = coulomb_couplings(eq.positions, spec.charge);
  const Eigen::VectorXd ksum = K.rowwise().sum();

  QuadraticModel axial, transverse;
  axial.masses = chain_masses(spec, sites);
  transverse.masses = axial.masses;
  axial.potential = -K;
  axial.potential.diagonal() = Eigen::VectorXd::Constant(n, effective_axial_strength(spec)) + ksum;
  transverse.potential = 0.5 * K;
  for (int j = 0; j < n; ++j) {
    const double ut = transverse_strength(spec, transverse.masses(j));
    if (!(ut > 0.0))
      throw Error(ErrorKind::transverse_instability,
                  "U_perp(m) <= 0 at ion " + std::to_string(j) + "; increase U0");
    transverse.potential(j, j) = ut - 0.5 * ksum(j);
  }
  for (int j = 0; j < n; ++j) {
    axial.labels.push_back("q[" + std::to_string(j) + "]");
    transverse.labels.push_back("x[" + std::to_string(j) + "]");
  }
  if (transverse.potential.llt().info() != Eigen::Success)
    throw Error(ErrorKind::transverse_instability,
                "transverse potential is not positive definite (aspect ratio too small)");
  return {axial, transverse};
}

std::pair<QuadraticModel, QuadraticModel> build_potentials(const ChainSpec& spec,
                                                           const EquilibriumConfiguration& eq) {
  return build_potentials(spec, eq, defect_sites(spec));
}

CoupledModel apply_laser_coupling(const QuadraticModel& axial, const QuadraticModel& transverse,
                                  double gamma, const DefectSites& sites) {
  if (gamma < 0.0) throw Error(ErrorKind::invalid_argument, "gamma must be >= 0");
  const Index n = axial.size();
  if (transverse.size() != n)
    throw Error(ErrorKind::dimension_mismatch, "axial and transverse sizes differ");
  CoupledModel out;
  out.axial = axial;
  out.transverse = transverse;
  out.coupling_strength = gamma;
  out.sites = sites;
  QuadraticModel& f = out.full;
  f.masses.resize(2 * n);
  f.masses << axial.masses, transverse.masses;
  f.potential = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  f.potential.topLeftCorner(n, n) = axial.potential;
  f.potential.bottomRightCorner(n, n) = transverse.potential;
  if (gamma != 0.0) {
    for (Index s : {sites.left, sites.right}) {
      f.potential(s, s) += gamma;
      f.potential(n + s, n + s) += gamma;
      f.potential(s, n + s) -= gamma;
      f.potential(n + s, s) -= gamma;
    }
  }
  f.labels = axial.labels;
  f.labels.insert(f.labels.end(), transverse.labels.begin(), transverse.labels.end());
  return out;
}

CoupledModel build_coupled_model(const ChainSpec& spec, double gamma) {
  const auto eq = equilibrium_positions(spec);
  const auto sites = defect_sites(spec);
  auto [axial, transverse] = build_potentials(spec, eq, sites);
  return apply_laser_coupling(axial, transverse, gamma, sites);
}

Reflection coupled_reflection(int n_ions) {
  Reflection r(2 * n_ions);
  for (int j = 0; j < n_ions; ++j) {
    r[j] = n_ions - 1 - j;
    r[n_ions + j] = n_ions + (n_ions - 1 - j);
  }
  return r;
}

}  // namespace ionbath
