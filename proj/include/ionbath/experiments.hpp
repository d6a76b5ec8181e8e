#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ionbath/branch_dynamics.hpp"
#include "ionbath/coulomb_chain.hpp"
#include "ionbath/gaussian.hpp"
#include "ionbath/nn_chain.hpp"
#include "ionbath/spectral.hpp"

namespace ionbath {

enum class ChainKind { coulomb, nearest_neighbour };

struct TuningSpec {
  bool enabled = true;
  Parity parity = Parity::odd;  // branch whose defect coordinate is protected
  int ell = 2;
  double frequency = 0.0;       // explicit target; > 0 skips the zero search
};

struct TimeGrid {
  double t_max = 50.0;
  double dt = 0.05;
  Eigen::VectorXd samples() const;
};

struct TimescaleOptions {
  double dwell = 5.0;         // time the series must stay in the settle band
  double settle_band = 0.10;  // relative half-width around the running median
  double exit_band = 0.25;
};

struct Scenario {
  ChainKind kind = ChainKind::coulomb;
  ChainSpec chain;
  NNSpec nn;
  InitialStateSpec initial;
  double coupling = 0.0;  // gamma
  TuningSpec tuning;
  TimeGrid time;
  bool twin = false;  // also run the uncoupled comparison
  TimescaleOptions timescales;
  DecouplingOptions decoupling;

  void validate() const;
};

struct EntanglementRecord {
  Eigen::VectorXd times;
  Eigen::VectorXd e_n;
  Eigen::VectorXd var_com;  // <X_+^2>
  Eigen::VectorXd var_rel;  // <X_-^2>
  Eigen::VectorXd avg_com;  // (<X^2> + <P^2>/(M w)^2)/2, removes the 2w oscillation
  Eigen::VectorXd avg_rel;
  Eigen::VectorXd e_n_twin;  // empty unless the twin run was requested
  std::optional<double> t_th;
  std::optional<double> t_rev;
  double e_n_avg = std::numeric_limits<double>::quiet_NaN();
  double e_n_min = std::numeric_limits<double>::quiet_NaN();
  double e_n_twin_avg = std::numeric_limits<double>::quiet_NaN();
  bool window_converged = false;
  Parity bath_parity = Parity::even;  // branch used for timescale detection
  double target_frequency = 0.0;
  double pre_quench_frequency = 0.0;   // protected-branch localized mode before the quench
  double post_quench_frequency = 0.0;  // and after
  double trap_parameter = 0.0;         // tuned U0 (Coulomb) or bare Omega (NN)

  const Eigen::VectorXd& bath_variance() const {
    return bath_parity == Parity::even ? avg_com : avg_rel;
  }
};

// Models, tuning and propagation coefficients of a scenario; initial states can be varied
// without recomputing them.
class PreparedScenario {
 public:
  explicit PreparedScenario(const Scenario& sc);
  EntanglementRecord run(const InitialStateSpec& initial) const;
  EntanglementRecord run() const { return run(scenario_.initial); }
  const Scenario& scenario() const { return scenario_; }
  double target_frequency() const { return target_; }
  double trap_parameter() const { return trap_; }
  // Tuned chain (Coulomb) with the adjusted U0.
  const ChainSpec& tuned_chain() const { return tuned_chain_; }
  // Local defect covariance (x_+n, p_+n, x_-n, p_-n) at every sample time.
  std::vector<Eigen::Matrix4d> defect_covariances(const InitialStateSpec& initial) const;
  // M omega of the protected defect mode after the quench (scale for dimensionless quadratures).
  double mass_frequency() const;

 private:
  Scenario scenario_;
  ChainSpec tuned_chain_;
  double target_ = 0.0;
  double trap_ = 0.0;
  std::unique_ptr<BranchPropagation> even_, odd_, even_twin_, odd_twin_;
};

EntanglementRecord run_scenario(const Scenario& sc);

struct Timescales {
  std::optional<double> t_th;
  std::optional<double> t_rev;
};

Timescales detect_timescales(const Eigen::VectorXd& times, const Eigen::VectorXd& series,
                             const TimescaleOptions& opts = {});
Timescales detect_timescales(const EntanglementRecord& record, const TimescaleOptions& opts = {});

struct WindowStats {
  double mean = 0.0;
  double min = 0.0;
  Index samples = 0;
  double half_rate_mean = 0.0;  // mean over every other sample
  bool converged = false;       // |mean - half_rate_mean| < 1% of mean
};

// Samples with t_th < t < t_rev; throws empty-window.
WindowStats window_stats(const Eigen::VectorXd& times, const Eigen::VectorXd& values, double t_th,
                         double t_rev);
WindowStats window_stats(const EntanglementRecord& record, double t_th, double t_rev);

struct EnergyBudget {
  double squeezed = 0.0;  // E_s
  double chain = 0.0;     // E_chain
  double ratio = 0.0;     // E_s / E_chain
};

// omega_perp <= 0 uses the even defect-localized transverse frequency of the spec.
EnergyBudget energy_budget(const ChainSpec& spec, double s, double temperature,
                           double omega_perp = 0.0);

enum class ScanAxis { squeezing, distance, size, temperature, zero_index };
const char* to_string(ScanAxis axis);
ScanAxis parse_scan_axis(const std::string& name);

struct ScanPoint {
  double value = 0.0;
  bool ok = false;
  std::string error;
  double e_n_avg = std::numeric_limits<double>::quiet_NaN();
  double e_n_min = std::numeric_limits<double>::quiet_NaN();
  double e_n_twin_avg = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> t_th;
  std::optional<double> t_rev;
  double target_frequency = 0.0;
};

struct ScanTable {
  ScanAxis axis = ScanAxis::squeezing;
  std::vector<ScanPoint> points;
};

// Scenario with the axis value applied (distance = interposed sites / ions).
Scenario apply_axis(const Scenario& sc, ScanAxis axis, double value);

// Runs every point; failures are recorded per point. Points are independent and run on up to
// `jobs` threads; results keep the order of `values`.
ScanTable scan(const Scenario& tmpl, ScanAxis axis, const std::vector<double>& values, int jobs = 1);

}  // namespace ionbath
