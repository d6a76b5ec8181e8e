#include "commands.hpp"

#include <cmath>

#include "ionbath/errors.hpp"
#include "ionbath/tomography.hpp"

namespace ionbath::cli {

namespace {

std::string row_index(Index i) { return std::to_string(i); }

Table equilibrium_table(const ChainSpec& spec, const EquilibriumConfiguration& eq) {
  Table t;
  t.columns = {"index", "z"};
  const Index n = eq.positions.size();
  for (Index j = 0; j < n; ++j)
    t.rows.push_back({fmt(static_cast<double>(j) - 0.5 * static_cast<double>(n - 1)),
                      fmt(eq.positions(j))});
  t.notes.push_back("z in units of l = (charge^2/U_par)^(1/3); residual " + fmt(eq.residual));
  (void)spec;
  return t;
}

}  // namespace

std::vector<std::string> cmd_equilibrium(const RunContext& ctx) {
  const ChainSpec spec = chain_spec(*ctx.config);
  const EquilibriumConfiguration eq = equilibrium_positions(spec);
  std::vector<std::string> files{write_table(ctx, "positions", equilibrium_table(spec, eq))};

  Table sp;
  sp.columns = {"d", "z_d", "uniform"};
  const int n = spec.n_ions;
  if (n >= 2) {
    const Index c = n / 2;
    const double a = eq.positions(c) - eq.positions(c - 1);
    for (int d = n % 2; d <= n - 2; d += 2) {
      const Index left = (n - d) / 2 - 1, right = n - 1 - left;
      sp.rows.push_back({std::to_string(d), fmt((eq.positions(right) - eq.positions(left)) / a),
                         std::to_string(d + 1)});
    }
    sp.notes.push_back("distance of the symmetric pair with d interposed ions, units of the "
                       "central spacing a = " + fmt(a));
  }
  files.push_back(write_table(ctx, "spacing", sp));
  return files;
}

namespace {

struct SpectrumModel {
  QuadraticModel model;
  Reflection reflection;
  std::vector<Index> defects;   // defect coordinates
  Index branch_split = 0;       // coordinates below: first branch
  std::string first_branch, second_branch;
  Eigen::VectorXd positions;    // per site (Coulomb) or lattice index (NN)
  Index sites = 0;
};

SpectrumModel spectrum_model(const Config& c) {
  SpectrumModel s;
  const double gamma = c.get_double("coupling.gamma");
  if (chain_kind(c) == ChainKind::coulomb) {
    const ChainSpec spec = chain_spec(c);
    const CoupledModel m = build_coupled_model(spec, gamma);
    const Index n = spec.n_ions;
    s.model = m.full;
    s.reflection = coupled_reflection(spec.n_ions);
    s.defects = {m.sites.left, m.sites.right, n + m.sites.left, n + m.sites.right};
    s.branch_split = n;
    s.first_branch = "axial";
    s.second_branch = "transverse";
    s.positions = equilibrium_positions(spec).positions;
    s.sites = n;
  } else {
    const NNSpec spec = nn_spec(c);
    s.model = build_nn_model(spec);
    s.reflection = nn_reflection(spec.n_bulk);
    s.defects = {0, 1};
    s.branch_split = 2;
    s.first_branch = "defect";
    s.second_branch = "bulk";
    s.positions = Eigen::VectorXd::LinSpaced(spec.n_bulk, 0.0, spec.n_bulk - 1.0);
    s.sites = spec.n_bulk;
  }
  return s;
}

}  // namespace

std::vector<std::string> cmd_modes(const RunContext& ctx) {
  const Config& c = *ctx.config;
  const SpectrumModel sm = spectrum_model(c);
  const ModeDecomposition md = normal_modes(sm.model, sm.reflection);
  const double threshold = c.get_double("modes.localized_weight");
  const Index k = md.size();

  // Rank of each mode inside its branch: axial/bulk ascending, transverse descending.
  std::vector<int> branch(k);
  std::vector<double> defect_weight(k);
  for (Index j = 0; j < k; ++j) {
    const double w1 = md.vectors.col(j).head(sm.branch_split).squaredNorm();
    branch[j] = w1 >= 0.5 ? 0 : 1;
    double dw = 0.0;
    for (Index d : sm.defects) dw += md.vectors(d, j) * md.vectors(d, j);
    defect_weight[j] = dw;
  }
  const bool coulomb = chain_kind(c) == ChainKind::coulomb;
  std::vector<Index> rank(k);
  for (int b = 0; b < 2; ++b) {
    std::vector<Index> members;
    for (Index j = 0; j < k; ++j)
      if (branch[j] == b) members.push_back(j);
    if (coulomb && b == 1) std::reverse(members.begin(), members.end());
    for (std::size_t r = 0; r < members.size(); ++r) rank[members[r]] = static_cast<Index>(r);
  }
  const double scale = coulomb ? std::sqrt(chain_spec(c).axial_strength / chain_spec(c).light_mass)
                               : nn_spec(c).bulk_frequency;

  Table t;
  t.columns = {"index", "k", "omega", "parity", "branch", "localized", "defect_weight"};
  std::vector<Index> localized;
  for (Index j = 0; j < k; ++j) {
    const bool loc = defect_weight[j] >= threshold;
    if (loc) localized.push_back(j);
    const double kl = static_cast<double>(rank[j] + 1) / static_cast<double>(sm.sites);
    t.rows.push_back({row_index(j), fmt(kl), fmt(md.frequencies(j) / scale),
                      to_string(md.parity[static_cast<std::size_t>(j)]),
                      branch[j] == 0 ? sm.first_branch : sm.second_branch, loc ? "1" : "0",
                      fmt(defect_weight[j])});
  }
  t.notes.push_back(std::string("omega in units of ") +
                    (coulomb ? "omega_par = sqrt(U_par/m)" : "the bulk on-site frequency") +
                    "; k = rank within the branch / N");
  t.notes.push_back("localized modes: " + std::to_string(localized.size()));
  std::vector<std::string> files{write_table(ctx, "spectrum", t)};

  Table p;
  if (coulomb) {
    p.columns = {"mode", "site", "z", "q_amplitude", "x_amplitude"};
    for (Index j : localized) {
      const Eigen::VectorXd v = mode_profile(md, j);
      for (Index s = 0; s < sm.sites; ++s)
        p.rows.push_back({row_index(j), row_index(s), fmt(sm.positions(s)), fmt(v(s)),
                          fmt(v(sm.sites + s))});
    }
  } else {
    p.columns = {"mode", "coordinate", "amplitude"};
    for (Index j : localized) {
      const Eigen::VectorXd v = mode_profile(md, j);
      for (Index s = 0; s < v.size(); ++s)
        p.rows.push_back({row_index(j), sm.model.labels[static_cast<std::size_t>(s)], fmt(v(s))});
    }
  }
  p.notes.push_back("physical amplitudes of the localized modes (O / sqrt(m))");
  files.push_back(write_table(ctx, "profiles", p));
  return files;
}

std::vector<std::string> cmd_specdensity(const RunContext& ctx) {
  const Config& c = *ctx.config;
  const DecouplingOptions opts = decoupling_options(c);
  std::vector<DefectBath> baths;
  if (chain_kind(c) == ChainKind::coulomb) {
    const ChainSpec spec = chain_spec(c);
    const double gamma = c.get_double("coupling.gamma");
    baths = {defect_bath(spec, Parity::even, gamma), defect_bath(spec, Parity::odd, gamma)};
  } else {
    const auto [even, odd] = parity_decompose_nn(nn_spec(c));
    baths = {defect_bath(even), defect_bath(odd)};
  }
  std::vector<SpectralDensity> sd;
  std::vector<DecouplingResult> zeros;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const DefectBath& b : baths) {
    const LocalizedModeSolver solver(b);
    sd.push_back(spectral_density(solver.bath_modes(), -b.coupling, opts.bandwidth_scale));
    zeros.push_back(find_decoupling_zeros(b, opts));
    if (solver.bath_modes().size() > 0) {
      lo = std::min(lo, solver.band_min());
      hi = std::max(hi, solver.band_max());
    }
  }
  double w0 = c.get_double("spectral.omega_min"), w1 = c.get_double("spectral.omega_max");
  if (!(w1 > 0.0)) {
    w0 = std::isfinite(lo) ? lo : 0.0;
    w1 = hi;
  }
  const int points = c.get_int("spectral.points");
  if (points < 2 || !(w1 > w0))
    throw Error(ErrorKind::invalid_argument, "spectral grid needs points >= 2 and omega_max > omega_min");

  Table t;
  t.columns = {"omega", "J_even", "J_odd"};
  for (int i = 0; i < points; ++i) {
    const double w = w0 + (w1 - w0) * i / (points - 1);
    t.rows.push_back({fmt(w), fmt(sd[0](w)), fmt(sd[1](w))});
  }
  for (std::size_t p = 0; p < 2; ++p) {
    std::string line = std::string(p == 0 ? "even" : "odd") + " zeros:";
    for (const auto& z : zeros[p].zeros) line += " " + fmt(z.frequency);
    if (zeros[p].exact_decoupling) line += " (defect uncoupled)";
    t.notes.push_back(line);
  }
  std::vector<std::string> files{write_table(ctx, "specdensity", t)};

  Table zt;
  zt.columns = {"parity", "ell", "frequency", "candidate", "leakage", "bath_leakage", "status"};
  for (std::size_t p = 0; p < 2; ++p) {
    const char* par = p == 0 ? "even" : "odd";
    for (const auto& z : zeros[p].zeros)
      zt.rows.push_back({par, std::to_string(z.ell), fmt(z.frequency), fmt(z.candidate),
                         fmt(z.leakage), fmt(z.bath_leakage), "accepted"});
    for (const auto& z : zeros[p].rejected)
      zt.rows.push_back({par, "0", fmt(z.frequency), fmt(z.candidate), fmt(z.leakage),
                         fmt(z.bath_leakage), "rejected"});
  }
  zt.notes.push_back("bath leakage tolerance " + fmt(opts.leakage_tolerance));
  files.push_back(write_table(ctx, "zeros", zt));
  return files;
}

namespace {

nlohmann::json record_summary(const EntanglementRecord& r) {
  nlohmann::json j;
  j["t_th"] = num(r.t_th);
  j["t_rev"] = num(r.t_rev);
  j["e_n_avg"] = num(r.e_n_avg);
  j["e_n_min"] = num(r.e_n_min);
  j["e_n_twin_avg"] = num(r.e_n_twin_avg);
  j["window_converged"] = r.window_converged;
  j["bath_parity"] = to_string(r.bath_parity);
  j["target_frequency"] = num(r.target_frequency);
  j["pre_quench_frequency"] = num(r.pre_quench_frequency);
  j["post_quench_frequency"] = num(r.post_quench_frequency);
  j["trap_parameter"] = num(r.trap_parameter);
  return j;
}

}  // namespace

std::vector<std::string> cmd_evolve(const RunContext& ctx) {
  const Scenario sc = scenario(*ctx.config);
  const EntanglementRecord r = run_scenario(sc);
  Table t;
  t.columns = {"t", "E_N", "var_com", "var_rel", "avg_com", "avg_rel"};
  const bool twin = r.e_n_twin.size() > 0;
  if (twin) t.columns.push_back("E_N_twin");
  for (Index i = 0; i < r.times.size(); ++i) {
    std::vector<std::string> row{fmt(r.times(i)),   fmt(r.e_n(i)),     fmt(r.var_com(i)),
                                 fmt(r.var_rel(i)), fmt(r.avg_com(i)), fmt(r.avg_rel(i))};
    if (twin) row.push_back(fmt(r.e_n_twin(i)));
    t.rows.push_back(std::move(row));
  }
  t.notes.push_back("target_frequency " + fmt(r.target_frequency) + ", trap_parameter " +
                    fmt(r.trap_parameter) + ", pre/post quench frequency " +
                    fmt(r.pre_quench_frequency) + " " + fmt(r.post_quench_frequency));
  t.notes.push_back("t_th " + fmt(r.t_th) + ", t_rev " + fmt(r.t_rev) + ", E_N avg " +
                    fmt(r.e_n_avg) + ", E_N min " + fmt(r.e_n_min));
  return {write_table(ctx, "evolve", t), write_json(ctx, "evolve_summary", record_summary(r))};
}

ScanOutcome cmd_scan(const RunContext& ctx) {
  const Config& c = *ctx.config;
  const ScanAxis axis = parse_scan_axis(c.get("scan.axis"));
  const std::vector<double> values = c.get_list("scan.values");
  if (values.empty()) throw Error(ErrorKind::invalid_argument, "scan.values is empty");
  const Scenario sc = scenario(c);
  const ScanTable table = scan(sc, axis, values, ctx.jobs);

  Table t;
  t.columns = {"value",  "ok",    "e_n_avg",          "e_n_min", "e_n_twin_avg",
               "enhancement", "t_th", "t_rev", "target_frequency"};
  ScanOutcome out;
  nlohmann::json failures = nlohmann::json::array();
  for (const ScanPoint& p : table.points) {
    t.rows.push_back({fmt(p.value), p.ok ? "1" : "0", fmt(p.e_n_avg), fmt(p.e_n_min),
                      fmt(p.e_n_twin_avg), fmt(p.e_n_avg / p.e_n_twin_avg), fmt(p.t_th),
                      fmt(p.t_rev), fmt(p.target_frequency)});
    if (!p.ok) {
      ++out.failures;
      failures.push_back({{"value", num(p.value)}, {"error", p.error}});
    }
  }
  t.notes.push_back(std::string("axis ") + to_string(axis));
  nlohmann::json summary = table_json(t);
  summary["axis"] = to_string(axis);
  if (ctx.format == Format::csv) out.files.push_back(write_csv(ctx, "scan", t));
  out.files.push_back(write_json(ctx, "scan_summary", summary));
  if (out.failures > 0)
    out.files.push_back(write_json(ctx, "scan_failures", {{"failures", failures}}));
  return out;
}

std::vector<std::string> cmd_measure(const RunContext& ctx) {
  const Config& c = *ctx.config;
  Scenario sc = scenario(c);
  const double t_meas = c.get_double("measure.time");
  if (!(t_meas >= 0.0) || t_meas > sc.time.t_max)
    throw Error(ErrorKind::invalid_argument, "measure.time must lie in [0, time.t_max]");
  const long shots = c.get_long("measure.shots");
  const double radius = c.get_double("measure.radius");
  if (shots < 0) throw Error(ErrorKind::invalid_argument, "measure.shots must be >= 0");

  // Only the snapshot is needed: shorten the grid to end at the measurement time.
  sc.time.t_max = std::max(t_meas, sc.time.dt);
  sc.twin = false;
  const PreparedScenario prep(sc);
  const auto covs = prep.defect_covariances(sc.initial);
  const Eigen::VectorXd times = sc.time.samples();
  Index best = 0;
  for (Index i = 0; i < times.size(); ++i)
    if (std::abs(times(i) - t_meas) < std::abs(times(best) - t_meas)) best = i;

  CovarianceState local;
  local.mean = Eigen::VectorXd::Zero(4);
  local.covariance = covs[static_cast<std::size_t>(best)];
  const CovarianceState state =
      to_dimensionless(local, Eigen::VectorXd::Constant(2, prep.mass_frequency()));
  const auto samples =
      simulate_measurement(state, star_grid(radius), shots, ctx.seed);
  const Reconstruction rec = reconstruct_covariance(samples);

  auto matrix = [](const Eigen::MatrixXd& m) {
    nlohmann::json a = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Index j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
      a.push_back(row);
    }
    return a;
  };
  nlohmann::json j;
  j["time"] = num(times(best));
  j["shots"] = shots;
  j["mass_frequency"] = num(prep.mass_frequency());
  j["covariance"] = matrix(state.covariance);
  j["reconstructed_covariance"] = matrix(rec.state.covariance);
  j["reconstructed_mean"] = matrix(rec.state.mean.transpose());
  j["e_n"] = num(log_negativity(state));
  j["e_n_reconstructed"] = num(log_negativity(rec.state));
  j["fit_residual"] = num(rec.residual);
  j["repaired"] = rec.repaired;
  j["added_noise"] = num(rec.added_noise);
  nlohmann::json s = nlohmann::json::array();
  for (const auto& x : samples)
    s.push_back({num(x.alpha.real()), num(x.alpha.imag()), num(x.beta.real()),
                 num(x.beta.imag()), num(x.t_value.real()), num(x.t_value.imag())});
  j["sample_columns"] = {"alpha_re", "alpha_im", "beta_re", "beta_im", "T_re", "T_im"};
  j["samples"] = s;
  return {write_json(ctx, "measure", j)};
}

}  // namespace ionbath::cli
