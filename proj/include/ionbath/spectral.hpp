#pragma once

#include <vector>

#include "ionbath/coulomb_chain.hpp"
#include "ionbath/modes.hpp"
#include "ionbath/nn_chain.hpp"

namespace ionbath {

struct SpectralDensity {
  Parity parity = Parity::none;
  Eigen::VectorXd mode_frequencies;  // ascending
  Eigen::VectorXd weights;           // w_j >= 0
  Eigen::VectorXd bandwidths;        // Gaussian width per mode

  // Smoothed envelope sum_j w_j K_h(omega - omega_j).
  double operator()(double omega) const;
  Eigen::VectorXd evaluate(const Eigen::VectorXd& grid) const;
  double total_weight() const { return weights.sum(); }
};

// scale * local mean level spacing of each frequency.
Eigen::VectorXd level_bandwidths(const Eigen::VectorXd& frequencies, double scale);

// Defect coupled through potential cross terms V_{X,i} = -coupling_i to the decomposed model:
// w_j = (pi/2) (sum_i coupling_i O_ij / sqrt(m_i))^2 / omega_j^2.
SpectralDensity spectral_density(const ModeDecomposition& decomp, const Eigen::VectorXd& coupling,
                                 double bandwidth_scale = 2.0);
// Attach-site form: coupling = gamma e_attach.
SpectralDensity spectral_density(const ModeDecomposition& decomp, double gamma, Index attach,
                                 double bandwidth_scale = 2.0);
Eigen::VectorXd spectral_density(const ModeDecomposition& decomp, double gamma, Index attach,
                                 const Eigen::VectorXd& grid, double bandwidth_scale = 2.0);

// Gamma(t) = sum_j (gamma O_nj)^2 / (m_n omega_j^2) cos(omega_j t)
Eigen::VectorXd memory_kernel(const ModeDecomposition& decomp, double gamma, Index attach,
                              const Eigen::VectorXd& times);

// One defect coordinate X coupled through potential cross terms to a reservoir block.
struct DefectBath {
  Parity parity = Parity::none;
  QuadraticModel bath;        // reservoir coordinates, coupling-induced diagonal shifts included
  Eigen::VectorXd coupling;   // V_{X,i} over bath coordinates
  double defect_mass = 1.0;
  std::vector<int> distance;  // folded distance of each bath coordinate from the centre
  int defect_distance = 0;    // folded distance of the defect site
};

// Parity block of the nearest-neighbour model; the bath is the site block.
DefectBath defect_bath(const ParityModel& pm);
// Axial parity branch of the Coulomb chain with the laser-induced shift gamma on q_{+-n}.
DefectBath defect_bath(const ChainSpec& spec, Parity parity, double gamma);

struct LocalizedSolution {
  double frequency = 0.0;      // eigenfrequency of the selected mode
  double defect_weight = 0.0;  // squared mass-weighted amplitude on X
  double leakage = 0.0;        // max |amplitude| beyond defect_distance+1, relative to peak
  double bath_leakage = 0.0;   // same, relative to the largest bath amplitude inside; unlike
                               // leakage it does not scale with the coupling
  double defect_amplitude = 0.0;   // physical amplitude on X
  Eigen::VectorXd amplitudes;      // physical amplitudes on the bath coordinates
};

// Eigenmodes of the (defect + bath) model for a defect with diagonal frequency w_d (V_XX/M),
// solved through the secular equation of the arrowhead matrix in the bath mode basis.
class LocalizedModeSolver {
 public:
  explicit LocalizedModeSolver(const DefectBath& bath);
  // Mode with the largest defect weight.
  LocalizedSolution solve(double defect_frequency) const;
  const ModeDecomposition& bath_modes() const { return modes_; }
  const Eigen::VectorXd& mode_coupling() const { return b_; }
  double band_min() const;
  double band_max() const;
  bool decoupled() const { return decoupled_; }

 private:
  DefectBath bath_;
  ModeDecomposition modes_;
  Eigen::VectorXd b_;  // mass-weighted coupling in the bath mode basis
  bool decoupled_ = false;
};

struct DecouplingOptions {
  double threshold = 0.5;           // candidate minima must lie below threshold * max(J)
  double leakage_tolerance = 5e-2;  // localized-mode acceptance, applied to bath_leakage
  double bandwidth_scale = 2.0;
  int grid_per_mode = 8;
  int scan_points = 121;
};

struct DecouplingZero {
  int ell = 0;
  double frequency = 0.0;  // validated omega^(ell)
  double candidate = 0.0;  // envelope minimum that seeded the search
  double leakage = 0.0;
  double bath_leakage = 0.0;
};

struct DecouplingResult {
  Parity parity = Parity::none;
  std::vector<DecouplingZero> zeros;     // validated, ascending
  std::vector<DecouplingZero> rejected;  // candidates failing validation
  bool exact_decoupling = false;         // defect uncoupled: decoupled at every frequency
};

// First ell_max validated zeros; throws no-zero-found when fewer exist.
DecouplingResult decoupling_frequencies(const DefectBath& bath, int ell_max,
                                        const DecouplingOptions& opts = {});
DecouplingResult decoupling_frequencies(const ChainSpec& spec, Parity parity, double gamma,
                                        int ell_max, const DecouplingOptions& opts = {});
DecouplingResult decoupling_frequencies(const NNSpec& spec, Parity parity, int ell_max,
                                        const DecouplingOptions& opts = {});

// All validated zeros within the band (no ell_max requirement).
DecouplingResult find_decoupling_zeros(const DefectBath& bath, const DecouplingOptions& opts = {});

// Frequency of the defect-localized transverse mode of the chosen parity block, with the
// laser-induced diagonal shift gamma on x_{+-n}.
double localized_transverse_frequency(const ChainSpec& spec, Parity parity, double gamma);

struct TuningResult {
  ChainSpec spec;
  double frequency = 0.0;  // achieved localized frequency
  int evaluations = 0;
};

// Adjusts U0 so the localized transverse frequency equals target to 1e-8 relative.
TuningResult tune_defect_frequency(const ChainSpec& spec, double target, Parity parity,
                                   double gamma);
ChainSpec tune_defect_frequency(const ChainSpec& spec, double target);

}  // namespace ionbath
