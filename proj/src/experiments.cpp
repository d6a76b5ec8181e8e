#include "ionbath/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <queue>
#include <thread>

#include "ionbath/errors.hpp"

namespace ionbath {

Eigen::VectorXd TimeGrid::samples() const {
  const Index n = static_cast<Index>(std::floor(t_max / dt + 1e-9)) + 1;
  Eigen::VectorXd t(n);
  for (Index i = 0; i < n; ++i) t(i) = dt * static_cast<double>(i);
  return t;
}

void Scenario::validate() const {
  if (!(time.t_max > 0.0)) throw Error(ErrorKind::invalid_argument, "t_max must be positive");
  if (!(time.dt > 0.0) || time.dt > time.t_max)
    throw Error(ErrorKind::invalid_argument, "dt must lie in (0, t_max]");
  if (tuning.ell < 1) throw Error(ErrorKind::invalid_argument, "zero index ell must be >= 1");
  if (tuning.parity == Parity::none)
    throw Error(ErrorKind::invalid_argument, "tuning parity must be even or odd");
  if (!(tuning.frequency >= 0.0))
    throw Error(ErrorKind::invalid_argument, "tuning frequency must be non-negative");
  if (!(coupling >= 0.0)) throw Error(ErrorKind::invalid_argument, "coupling must be non-negative");
  if (!(timescales.dwell > 0.0) || !(timescales.settle_band > 0.0) ||
      !(timescales.exit_band > 0.0))
    throw Error(ErrorKind::invalid_argument, "timescale options must be positive");
  initial.validate();
  if (kind == ChainKind::coulomb)
    chain.validate();
  else
    nn.validate();
}

namespace {

std::vector<bool> leading_reservoir(Index size, Index reservoir) {
  std::vector<bool> r(size, false);
  for (Index i = 0; i < reservoir; ++i) r[i] = true;
  return r;
}

Index transverse_defect_index(const CoulombParity& p, Parity parity) {
  return parity == Parity::even ? p.axial_size_even + p.defect_axial_even
                                : p.axial_size_odd + p.defect_axial_odd;
}

BranchSetup coulomb_branch(const CoulombParity& pre, const CoulombParity& post, Parity parity) {
  BranchSetup b;
  const bool even = parity == Parity::even;
  b.pre = even ? pre.split.even : pre.split.odd;
  b.post = even ? post.split.even : post.split.odd;
  b.defect = transverse_defect_index(pre, parity);
  b.reservoir = leading_reservoir(b.pre.size(), even ? pre.axial_size_even : pre.axial_size_odd);
  return b;
}

BranchSetup nn_branch(const ParityModel& pre, const ParityModel& post) {
  BranchSetup b;
  b.pre = pre.model;
  b.post = post.model;
  b.defect = 0;
  b.reservoir.assign(pre.model.size(), true);
  b.reservoir[0] = false;
  return b;
}

}  // namespace

PreparedScenario::PreparedScenario(const Scenario& sc) : scenario_(sc) {
  sc.validate();
  const Eigen::VectorXd times = sc.time.samples();
  const double gamma = sc.coupling;
  const TuningSpec& tu = sc.tuning;

  if (sc.kind == ChainKind::coulomb) {
    tuned_chain_ = sc.chain;
    if (tu.enabled) {
      target_ = tu.frequency > 0.0
                    ? tu.frequency
                    : decoupling_frequencies(sc.chain, tu.parity, gamma, tu.ell, sc.decoupling)
                          .zeros[tu.ell - 1]
                          .frequency;
      tuned_chain_ = tune_defect_frequency(sc.chain, target_, tu.parity, gamma).spec;
    }
    trap_ = tuned_chain_.transverse_scale;
    const CoupledModel m0 = build_coupled_model(tuned_chain_, 0.0);
    const CoupledModel m1 = build_coupled_model(tuned_chain_, gamma);
    const CoulombParity p0 = parity_decompose_coulomb_full(m0);
    const CoulombParity p1 = parity_decompose_coulomb_full(m1);
    even_ = std::make_unique<BranchPropagation>(coulomb_branch(p0, p1, Parity::even), times);
    odd_ = std::make_unique<BranchPropagation>(coulomb_branch(p0, p1, Parity::odd), times);
    if (sc.twin) {
      even_twin_ = std::make_unique<BranchPropagation>(coulomb_branch(p0, p0, Parity::even), times);
      odd_twin_ = std::make_unique<BranchPropagation>(coulomb_branch(p0, p0, Parity::odd), times);
    }
    return;
  }

  NNSpec spec = sc.nn;
  spec.coupling = gamma;
  if (tu.enabled) {
    target_ = tu.frequency > 0.0
                  ? tu.frequency
                  : decoupling_frequencies(spec, tu.parity, tu.ell, sc.decoupling)
                        .zeros[tu.ell - 1]
                        .frequency;
    const double omega2 = target_ * target_ - gamma / spec.defect_mass;
    if (!(omega2 > 0.0))
      throw Error(ErrorKind::untunable,
                  "target frequency below the coupling-induced shift sqrt(gamma/M)");
    spec.defect_frequency = std::sqrt(omega2);
  }
  trap_ = spec.defect_frequency;
  NNSpec bare = spec;
  bare.coupling = 0.0;
  const auto post = parity_decompose_nn(spec);
  const auto pre = parity_decompose_nn(bare);
  even_ = std::make_unique<BranchPropagation>(nn_branch(pre.first, post.first), times);
  odd_ = std::make_unique<BranchPropagation>(nn_branch(pre.second, post.second), times);
  if (sc.twin) {
    even_twin_ = std::make_unique<BranchPropagation>(nn_branch(pre.first, pre.first), times);
    odd_twin_ = std::make_unique<BranchPropagation>(nn_branch(pre.second, pre.second), times);
  }
}

namespace {

Eigen::VectorXd negativity_series(const BranchPropagation& even, const BranchPropagation& odd,
                                  const InitialStateSpec& initial,
                                  std::vector<Eigen::Matrix2d>* even_out = nullptr,
                                  std::vector<Eigen::Matrix2d>* odd_out = nullptr) {
  Eigen::VectorXd dq, dp;
  even.initial_variances(initial, dq, dp);
  const auto be = even.defect_blocks(dq, dp);
  odd.initial_variances(initial, dq, dp);
  const auto bo = odd.defect_blocks(dq, dp);
  Eigen::VectorXd e(static_cast<Index>(be.size()));
  for (std::size_t i = 0; i < be.size(); ++i) {
    const double nu = partial_transpose_min_eigenvalue(combine_parity_blocks(be[i], bo[i]));
    if (!(nu > 0.0))
      throw Error(ErrorKind::unphysical_covariance, "degenerate defect covariance during evolution");
    e(static_cast<Index>(i)) = std::max(0.0, -std::log(2.0 * nu));
  }
  if (even_out) *even_out = be;
  if (odd_out) *odd_out = bo;
  return e;
}

double window_mean(const Eigen::VectorXd& times, const Eigen::VectorXd& v, double t0, double t1) {
  double s = 0.0;
  Index n = 0;
  for (Index i = 0; i < times.size(); ++i)
    if (times(i) > t0 && times(i) < t1) {
      s += v(i);
      ++n;
    }
  return n > 0 ? s / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

EntanglementRecord PreparedScenario::run(const InitialStateSpec& initial) const {
  initial.validate();
  EntanglementRecord rec;
  rec.times = even_->times();
  std::vector<Eigen::Matrix2d> be, bo;
  rec.e_n = negativity_series(*even_, *odd_, initial, &be, &bo);

  const Index nt = rec.times.size();
  rec.var_com.resize(nt);
  rec.var_rel.resize(nt);
  rec.avg_com.resize(nt);
  rec.avg_rel.resize(nt);
  const double mwe = even_->defect_mass() * even_->post_frequency();
  const double mwo = odd_->defect_mass() * odd_->post_frequency();
  for (Index i = 0; i < nt; ++i) {
    const auto& e = be[static_cast<std::size_t>(i)];
    const auto& o = bo[static_cast<std::size_t>(i)];
    rec.var_com(i) = e(0, 0);
    rec.var_rel(i) = o(0, 0);
    rec.avg_com(i) = 0.5 * (e(0, 0) + e(1, 1) / (mwe * mwe));
    rec.avg_rel(i) = 0.5 * (o(0, 0) + o(1, 1) / (mwo * mwo));
  }
  if (even_twin_) rec.e_n_twin = negativity_series(*even_twin_, *odd_twin_, initial);

  const bool tuned = scenario_.tuning.enabled;
  rec.bath_parity =
      tuned && scenario_.tuning.parity == Parity::even ? Parity::odd : Parity::even;
  const BranchPropagation& prot = rec.bath_parity == Parity::even ? *odd_ : *even_;
  rec.pre_quench_frequency = prot.pre_frequency();
  rec.post_quench_frequency = prot.post_frequency();
  rec.target_frequency = target_;
  rec.trap_parameter = trap_;

  const Timescales ts = detect_timescales(rec.times, rec.bath_variance(), scenario_.timescales);
  rec.t_th = ts.t_th;
  rec.t_rev = ts.t_rev;
  if (rec.t_th) {
    const double t1 = rec.t_rev ? *rec.t_rev : std::numeric_limits<double>::infinity();
    try {
      const WindowStats w = window_stats(rec.times, rec.e_n, *rec.t_th, t1);
      rec.e_n_avg = w.mean;
      rec.e_n_min = w.min;
      rec.window_converged = w.converged;
      if (rec.e_n_twin.size() > 0)
        rec.e_n_twin_avg = window_mean(rec.times, rec.e_n_twin, *rec.t_th, t1);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::empty_window) throw;
    }
  }
  return rec;
}

std::vector<Eigen::Matrix4d> PreparedScenario::defect_covariances(
    const InitialStateSpec& initial) const {
  Eigen::VectorXd dq, dp;
  even_->initial_variances(initial, dq, dp);
  const auto be = even_->defect_blocks(dq, dp);
  odd_->initial_variances(initial, dq, dp);
  const auto bo = odd_->defect_blocks(dq, dp);
  std::vector<Eigen::Matrix4d> out(be.size());
  for (std::size_t i = 0; i < be.size(); ++i) out[i] = combine_parity_blocks(be[i], bo[i]);
  return out;
}

double PreparedScenario::mass_frequency() const {
  const bool even_protected = scenario_.tuning.enabled && scenario_.tuning.parity == Parity::even;
  const BranchPropagation& b = even_protected ? *even_ : *odd_;
  return b.defect_mass() * b.post_frequency();
}

EntanglementRecord run_scenario(const Scenario& sc) { return PreparedScenario(sc).run(); }

namespace {

double median_of(std::vector<double> v) {
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h), v.end());
  double m = v[h];
  if (v.size() % 2 == 0) {
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h));
    m = 0.5 * (m + lo);
  }
  return m;
}

// Median of a growing sample.
class RunningMedian {
 public:
  void push(double x) {
    if (lo_.empty() || x <= lo_.top())
      lo_.push(x);
    else
      hi_.push(x);
    if (lo_.size() > hi_.size() + 1) {
      hi_.push(lo_.top());
      lo_.pop();
    } else if (hi_.size() > lo_.size()) {
      lo_.push(hi_.top());
      hi_.pop();
    }
  }
  double median() const {
    if (lo_.size() > hi_.size()) return lo_.top();
    return 0.5 * (lo_.top() + hi_.top());
  }

 private:
  std::priority_queue<double> lo_;
  std::priority_queue<double, std::vector<double>, std::greater<double>> hi_;
};

}  // namespace

Timescales detect_timescales(const Eigen::VectorXd& times, const Eigen::VectorXd& y,
                             const TimescaleOptions& opts) {
  if (times.size() != y.size())
    throw Error(ErrorKind::dimension_mismatch, "times and series differ in length");
  Timescales out;
  const Index n = times.size();
  if (n == 0) return out;
  const double tol = 1e-9 * std::max(1.0, std::abs(times(n - 1)));
  Index start = -1;
  for (Index i = 0; i < n && start < 0; ++i) {
    if (times(i) + opts.dwell > times(n - 1) + tol) break;
    Index j = i;
    std::vector<double> win;
    while (j < n && times(j) <= times(i) + opts.dwell + tol) win.push_back(y(j++));
    const double m = median_of(win);
    const double band = opts.settle_band * std::abs(m);
    bool inside = true;
    for (double v : win)
      if (std::abs(v - m) > band) {
        inside = false;
        break;
      }
    if (inside) start = i;
  }
  if (start < 0) return out;
  out.t_th = times(start);
  RunningMedian rm;
  for (Index i = start; i < n; ++i) {
    rm.push(y(i));
    const double m = rm.median();
    if (std::abs(y(i) - m) > opts.exit_band * std::abs(m)) {
      out.t_rev = times(i);
      break;
    }
  }
  return out;
}

Timescales detect_timescales(const EntanglementRecord& record, const TimescaleOptions& opts) {
  return detect_timescales(record.times, record.bath_variance(), opts);
}

WindowStats window_stats(const Eigen::VectorXd& times, const Eigen::VectorXd& values, double t_th,
                         double t_rev) {
  if (times.size() != values.size())
    throw Error(ErrorKind::dimension_mismatch, "times and values differ in length");
  if (!(t_th < t_rev)) throw Error(ErrorKind::empty_window, "t_th must precede t_rev");
  WindowStats w;
  w.min = std::numeric_limits<double>::infinity();
  double sum = 0.0, half = 0.0;
  Index nh = 0;
  for (Index i = 0; i < times.size(); ++i) {
    if (!(times(i) > t_th && times(i) < t_rev)) continue;
    sum += values(i);
    w.min = std::min(w.min, values(i));
    if (w.samples % 2 == 0) {
      half += values(i);
      ++nh;
    }
    ++w.samples;
  }
  if (w.samples == 0) throw Error(ErrorKind::empty_window, "no samples between t_th and t_rev");
  w.mean = sum / static_cast<double>(w.samples);
  w.half_rate_mean = half / static_cast<double>(nh);
  w.converged = std::abs(w.mean - w.half_rate_mean) <= 0.01 * std::abs(w.mean) ||
                (w.mean == 0.0 && w.half_rate_mean == 0.0);
  return w;
}

WindowStats window_stats(const EntanglementRecord& record, double t_th, double t_rev) {
  return window_stats(record.times, record.e_n, t_th, t_rev);
}

EnergyBudget energy_budget(const ChainSpec& spec, double s, double temperature,
                           double omega_perp) {
  spec.validate();
  if (!(temperature >= 0.0))
    throw Error(ErrorKind::invalid_argument, "temperature must be non-negative");
  if (!(omega_perp > 0.0)) omega_perp = localized_transverse_frequency(spec, Parity::even, 0.0);
  EnergyBudget b;
  const double sh = std::sinh(s);
  b.squeezed = 2.0 * (sh * sh + 0.5) * omega_perp;
  const auto eq = equilibrium_positions(spec);
  const auto modes = normal_modes(axial_model(spec, eq, defect_sites(spec)));
  for (Index j = 0; j < modes.size(); ++j) {
    const double w = modes.frequencies(j);
    const double occ = temperature > 0.0 ? 1.0 / std::expm1(w / temperature) : 0.0;
    b.chain += (occ + 0.5) * w;
  }
  b.ratio = b.squeezed / b.chain;
  return b;
}

const char* to_string(ScanAxis axis) {
  switch (axis) {
    case ScanAxis::squeezing: return "squeezing";
    case ScanAxis::distance: return "distance";
    case ScanAxis::size: return "size";
    case ScanAxis::temperature: return "temperature";
    case ScanAxis::zero_index: return "zero-index";
  }
  return "?";
}

ScanAxis parse_scan_axis(const std::string& name) {
  for (ScanAxis a : {ScanAxis::squeezing, ScanAxis::distance, ScanAxis::size,
                     ScanAxis::temperature, ScanAxis::zero_index})
    if (name == to_string(a)) return a;
  throw Error(ErrorKind::invalid_argument, "unknown scan axis '" + name + "'");
}

namespace {

int as_integer(double v, const char* what) {
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9) throw Error(ErrorKind::invalid_argument, std::string(what) + " must be an integer");
  return static_cast<int>(r);
}

}  // namespace

Scenario apply_axis(const Scenario& sc, ScanAxis axis, double value) {
  Scenario out = sc;
  switch (axis) {
    case ScanAxis::squeezing: out.initial.squeezing = value; break;
    case ScanAxis::temperature: out.initial.bath_temperature = value; break;
    case ScanAxis::zero_index: out.tuning.ell = as_integer(value, "zero index"); break;
    case ScanAxis::size:
      if (out.kind == ChainKind::coulomb)
        out.chain.n_ions = as_integer(value, "chain size");
      else
        out.nn.n_bulk = as_integer(value, "chain size");
      break;
    case ScanAxis::distance: {
      const int d = as_integer(value, "distance");
      if (out.kind == ChainKind::coulomb) {
        out.chain.defect_distance = d;
      } else {
        const bool odd = out.nn.n_bulk % 2 == 1;
        if (d < 1 || (odd ? d % 2 == 0 : d % 2 == 1))
          throw Error(ErrorKind::invalid_argument,
                      "distance " + std::to_string(d) + " is incompatible with the chain parity");
        out.nn.attach_index = odd ? (d + 1) / 2 : d / 2;
      }
      break;
    }
  }
  return out;
}

namespace {

void fill_point(ScanPoint& p, const EntanglementRecord& r) {
  p.ok = true;
  p.e_n_avg = r.e_n_avg;
  p.e_n_min = r.e_n_min;
  p.e_n_twin_avg = r.e_n_twin_avg;
  p.t_th = r.t_th;
  p.t_rev = r.t_rev;
  p.target_frequency = r.target_frequency;
}

template <class F>
void parallel_for(std::size_t n, int jobs, F&& body) {
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

ScanTable scan(const Scenario& tmpl, ScanAxis axis, const std::vector<double>& values, int jobs) {
  if (values.empty()) throw Error(ErrorKind::invalid_argument, "scan axis has no values");
  ScanTable table;
  table.axis = axis;
  table.points.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) table.points[i].value = values[i];

  // Initial-state axes share one prepared scenario.
  if (axis == ScanAxis::squeezing || axis == ScanAxis::temperature) {
    std::unique_ptr<PreparedScenario> prep;
    try {
      prep = std::make_unique<PreparedScenario>(tmpl);
    } catch (const std::exception& e) {
      for (auto& p : table.points) p.error = e.what();
      return table;
    }
    parallel_for(values.size(), jobs, [&](std::size_t i) {
      try {
        const Scenario sc = apply_axis(tmpl, axis, values[i]);
        sc.initial.validate();
        fill_point(table.points[i], prep->run(sc.initial));
      } catch (const std::exception& e) {
        table.points[i].error = e.what();
      }
    });
    return table;
  }
  parallel_for(values.size(), jobs, [&](std::size_t i) {
    try {
      fill_point(table.points[i], run_scenario(apply_axis(tmpl, axis, values[i])));
    } catch (const std::exception& e) {
      table.points[i].error = e.what();
    }
  });
  return table;
}

}  // namespace ionbath
