#include "ionbath/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <Eigen/Eigenvalues>

#include "ionbath/errors.hpp"

namespace ionbath {

namespace {

constexpr double kPi = 3.14159265358979323846;

double gaussian(double x, double h) {
  return std::exp(-0.5 * x * x / (h * h)) / (std::sqrt(2.0 * kPi) * h);
}

}  // namespace

double SpectralDensity::operator()(double omega) const {
  double acc = 0.0;
  for (Index j = 0; j < weights.size(); ++j) {
    if (weights(j) == 0.0) continue;
    const double x = omega - mode_frequencies(j);
    if (std::abs(x) > 10.0 * bandwidths(j)) continue;
    acc += weights(j) * gaussian(x, bandwidths(j));
  }
  return acc;
}

Eigen::VectorXd SpectralDensity::evaluate(const Eigen::VectorXd& grid) const {
  Eigen::VectorXd out(grid.size());
  for (Index i = 0; i < grid.size(); ++i) out(i) = (*this)(grid(i));
  return out;
}

Eigen::VectorXd level_bandwidths(const Eigen::VectorXd& w, double scale) {
  const Index k = w.size();
  Eigen::VectorXd h(k);
  if (k == 0) return h;
  if (k == 1) {
    h(0) = scale * std::max(0.1 * w(0), 1e-3);
    return h;
  }
  const double mean = (w(k - 1) - w(0)) / (k - 1);
  for (Index j = 0; j < k; ++j) {
    double sp;
    if (j == 0) sp = w(1) - w(0);
    else if (j == k - 1) sp = w(k - 1) - w(k - 2);
    else sp = 0.5 * (w(j + 1) - w(j - 1));
    if (!(sp > 1e-12 * std::max(1.0, std::abs(w(j))))) sp = mean > 0.0 ? mean : 1e-3;
    h(j) = scale * sp;
  }
  return h;
}

SpectralDensity spectral_density(const ModeDecomposition& decomp, const Eigen::VectorXd& coupling,
                                 double bandwidth_scale) {
  if (coupling.size() != decomp.size())
    throw Error(ErrorKind::dimension_mismatch, "coupling vector does not match the decomposition");
  SpectralDensity sd;
  sd.mode_frequencies = decomp.frequencies;
  const Eigen::VectorXd cw = coupling.cwiseQuotient(decomp.masses.cwiseSqrt());
  const Eigen::VectorXd g = decomp.vectors.transpose() * cw;
  sd.weights.resize(decomp.size());
  for (Index j = 0; j < decomp.size(); ++j) {
    const double w = decomp.frequencies(j);
    sd.weights(j) = w > 0.0 ? 0.5 * kPi * g(j) * g(j) / (w * w) : 0.0;
  }
  sd.bandwidths = level_bandwidths(decomp.frequencies, bandwidth_scale);
  return sd;
}

SpectralDensity spectral_density(const ModeDecomposition& decomp, double gamma, Index attach,
                                 double bandwidth_scale) {
  if (attach < 0 || attach >= decomp.size())
    throw Error(ErrorKind::invalid_index, "attach site out of range");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(decomp.size());
  c(attach) = gamma;
  return spectral_density(decomp, c, bandwidth_scale);
}

Eigen::VectorXd spectral_density(const ModeDecomposition& decomp, double gamma, Index attach,
                                 const Eigen::VectorXd& grid, double bandwidth_scale) {
  return spectral_density(decomp, gamma, attach, bandwidth_scale).evaluate(grid);
}

Eigen::VectorXd memory_kernel(const ModeDecomposition& decomp, double gamma, Index attach,
                              const Eigen::VectorXd& times) {
  if (attach < 0 || attach >= decomp.size())
    throw Error(ErrorKind::invalid_index, "attach site out of range");
  const double m = decomp.masses(attach);
  Eigen::VectorXd amp(decomp.size());
  for (Index j = 0; j < decomp.size(); ++j) {
    const double w = decomp.frequencies(j);
    const double gj = gamma * decomp.vectors(attach, j);
    amp(j) = w > 0.0 ? gj * gj / (m * w * w) : 0.0;
  }
  Eigen::VectorXd out(times.size());
  for (Index i = 0; i < times.size(); ++i)
    out(i) = (amp.array() * (decomp.frequencies.array() * times(i)).cos()).sum();
  return out;
}

// ---------------------------------------------------------------------------

DefectBath defect_bath(const ParityModel& pm) {
  const QuadraticModel& m = pm.model;
  const Index k = m.size() - 1;
  DefectBath b;
  b.parity = pm.parity;
  b.bath.masses = m.masses.tail(k);
  b.bath.potential = m.potential.bottomRightCorner(k, k);
  b.bath.labels.assign(m.labels.begin() + 1, m.labels.end());
  b.coupling = m.potential.row(0).tail(k).transpose();
  b.defect_mass = m.masses(0);
  b.distance.assign(pm.folded.begin() + 1, pm.folded.end());
  b.defect_distance = pm.attach_index;
  return b;
}

DefectBath defect_bath(const ChainSpec& spec, Parity parity, double gamma) {
  if (parity == Parity::none) throw Error(ErrorKind::invalid_argument, "parity must be even or odd");
  const auto eq = equilibrium_positions(spec);
  const auto sites = defect_sites(spec);
  QuadraticModel axial = axial_model(spec, eq, sites);
  axial.potential(sites.left, sites.left) += gamma;
  axial.potential(sites.right, sites.right) += gamma;
  const int n = spec.n_ions;
  Reflection r(n);
  std::vector<Index> reps;
  for (int j = 0; j < n; ++j) r[j] = n - 1 - j;
  for (int j = n / 2; j < n; ++j) reps.push_back(j);
  const ParitySplit split = split_by_reflection(axial, r, reps);

  DefectBath b;
  b.parity = parity;
  b.bath = parity == Parity::even ? split.even : split.odd;
  const auto& src = parity == Parity::even ? split.even_source : split.odd_source;
  b.coupling = Eigen::VectorXd::Zero(b.bath.size());
  for (Index i = 0; i < static_cast<Index>(src.size()); ++i) {
    b.distance.push_back(folded_index(n, src[i]));
    if (src[i] == sites.right) b.coupling(i) = -gamma;
  }
  b.defect_mass = spec.heavy_mass;
  b.defect_distance = folded_index(n, sites.right);
  return b;
}

// ---------------------------------------------------------------------------

LocalizedModeSolver::LocalizedModeSolver(const DefectBath& bath) : bath_(bath) {
  if (bath.coupling.size() != bath.bath.size() ||
      static_cast<Index>(bath.distance.size()) != bath.bath.size())
    throw Error(ErrorKind::dimension_mismatch, "defect bath vectors do not match the bath size");
  modes_ = normal_modes(bath.bath);
  const Eigen::VectorXd w =
      bath.coupling.cwiseQuotient(bath.bath.masses.cwiseSqrt()) / std::sqrt(bath.defect_mass);
  b_ = modes_.vectors.transpose() * w;
  decoupled_ = bath.coupling.cwiseAbs().maxCoeff() == 0.0;
}

double LocalizedModeSolver::band_min() const { return modes_.frequencies(0); }
double LocalizedModeSolver::band_max() const {
  return modes_.frequencies(modes_.size() - 1);
}

LocalizedSolution LocalizedModeSolver::solve(double defect_frequency) const {
  const Index k = modes_.size();
  const double a = defect_frequency * defect_frequency;
  LocalizedSolution out;
  if (decoupled_ || k == 0) {
    out.frequency = defect_frequency;
    out.defect_weight = 1.0;
    out.defect_amplitude = 1.0 / std::sqrt(bath_.defect_mass);
    out.amplitudes = Eigen::VectorXd::Zero(k);
    return out;
  }
  const Eigen::VectorXd d = modes_.frequencies.cwiseAbs2();
  const Eigen::ArrayXd b2 = b_.array().square();
  const double bnorm = std::sqrt(b2.sum());

  auto secular = [&](double lam) {
    double s = a - lam;
    for (Index j = 0; j < k; ++j) s -= b2(j) / (d(j) - lam);
    return s;
  };
  auto weight = [&](double lam) {
    double s = 1.0;
    for (Index j = 0; j < k; ++j) {
      const double den = lam - d(j);
      if (den == 0.0) {
        if (b2(j) == 0.0) continue;
        return 0.0;
      }
      s += b2(j) / (den * den);
    }
    return 1.0 / s;
  };

  const Index k0 = std::lower_bound(d.data(), d.data() + k, a) - d.data();
  double best_lam = a, best_w = -1.0;
  for (Index i = std::max<Index>(0, k0 - 3); i <= std::min<Index>(k, k0 + 3); ++i) {
    // interval (d_{i-1}, d_i)
    double lo = i == 0 ? std::min(a, d(0)) - bnorm - 1.0 : d(i - 1);
    double hi = i == k ? std::max(a, d(k - 1)) + bnorm + 1.0 : d(i);
    if (!(hi > lo)) continue;
    const double eps = 1e-14 * std::max({1.0, std::abs(lo), std::abs(hi)});
    double l = i == 0 ? lo : lo + eps;
    double h = i == k ? hi : hi - eps;
    if (!(h > l)) continue;
    const double fl = secular(l), fh = secular(h);
    double root;
    if (fl <= 0.0) root = l;
    else if (fh >= 0.0) root = h;
    else {
      boost::uintmax_t iters = 200;
      auto r = boost::math::tools::toms748_solve(secular, l, h, fl, fh,
                                                 boost::math::tools::eps_tolerance<double>(52), iters);
      root = 0.5 * (r.first + r.second);
    }
    const double w = weight(root);
    if (w > best_w) {
      best_w = w;
      best_lam = root;
    }
  }

  Eigen::VectorXd v(k);
  for (Index j = 0; j < k; ++j) {
    const double den = best_lam - d(j);
    v(j) = den == 0.0 ? 0.0 : b_(j) / den;
  }
  const double norm = std::sqrt(1.0 + v.squaredNorm());
  out.frequency = std::sqrt(std::max(best_lam, 0.0));
  out.defect_weight = best_w;
  out.defect_amplitude = 1.0 / norm / std::sqrt(bath_.defect_mass);
  out.amplitudes = (modes_.vectors * v / norm).cwiseQuotient(bath_.bath.masses.cwiseSqrt());
  double peak = std::abs(out.defect_amplitude), far = 0.0, near = 0.0;
  for (Index i = 0; i < k; ++i) {
    const double x = std::abs(out.amplitudes(i));
    peak = std::max(peak, x);
    if (bath_.distance[i] > bath_.defect_distance + 1)
      far = std::max(far, x);
    else
      near = std::max(near, x);
  }
  out.leakage = far / peak;
  out.bath_leakage = near > 0.0 ? far / near : out.leakage;
  return out;
}

// ---------------------------------------------------------------------------

DecouplingResult find_decoupling_zeros(const DefectBath& bath, const DecouplingOptions& opts) {
  DecouplingResult res;
  res.parity = bath.parity;
  const LocalizedModeSolver solver(bath);
  if (solver.decoupled()) {
    res.exact_decoupling = true;
    return res;
  }
  const ModeDecomposition& modes = solver.bath_modes();
  const Index k = modes.size();
  if (k < 2) return res;
  Eigen::VectorXd cpl = -bath.coupling;
  const SpectralDensity sd = spectral_density(modes, cpl, opts.bandwidth_scale);

  const double lo = solver.band_min(), hi = solver.band_max();
  const Index g = std::max<Index>(64, opts.grid_per_mode * k);
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(g, lo, hi);
  const Eigen::VectorXd env = sd.evaluate(grid);
  const double jmax = env.maxCoeff();

  std::vector<double> candidates;
  for (Index i = 1; i + 1 < g; ++i)
    if (env(i) < env(i - 1) && env(i) <= env(i + 1) && env(i) < opts.threshold * jmax)
      candidates.push_back(grid(i));

  // Minima of the leakage itself catch zeros the smoothed envelope cannot resolve (short
  // chains, closely spaced zeros).
  {
    Eigen::VectorXd leak(g);
    for (Index i = 0; i < g; ++i) leak(i) = solver.solve(grid(i)).bath_leakage;
    for (Index i = 1; i + 1 < g; ++i)
      if (leak(i) < leak(i - 1) && leak(i) <= leak(i + 1) &&
          leak(i) < 10.0 * opts.leakage_tolerance)
        candidates.push_back(grid(i));
  }
  std::sort(candidates.begin(), candidates.end());

  for (double x : candidates) {
    // local bandwidth from the nearest mode
    const Index j = std::min<Index>(
        k - 1, std::lower_bound(modes.frequencies.data(), modes.frequencies.data() + k, x) -
                   modes.frequencies.data());
    const double h = sd.bandwidths(j);
    const double a = std::max(lo, x - 2.0 * h), b = std::min(hi, x + 2.0 * h);
    const int n = std::max(3, opts.scan_points);
    double best = a, best_leak = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double w = a + (b - a) * i / (n - 1);
      const double l = solver.solve(w).leakage;
      if (l < best_leak) {
        best_leak = l;
        best = w;
      }
    }
    const double step = (b - a) / (n - 1);
    const auto polished = boost::math::tools::brent_find_minima(
        [&](double w) { return solver.solve(w).leakage; }, std::max(lo, best - step),
        std::min(hi, best + step), 50);
    double w_opt = best;
    if (polished.second < best_leak) {
      w_opt = polished.first;
      best_leak = polished.second;
    }
    // Far amplitudes change sign through an exact zero: refine on the largest one.
    {
      const double wa = std::max(lo, w_opt - step), wb = std::min(hi, w_opt + step);
      const LocalizedSolution sa = solver.solve(wa);
      Index c = -1;
      double cmax = 0.0;
      for (Index i = 0; i < sa.amplitudes.size(); ++i)
        if (bath.distance[i] > bath.defect_distance + 1 && std::abs(sa.amplitudes(i)) > cmax) {
          cmax = std::abs(sa.amplitudes(i));
          c = i;
        }
      if (c >= 0) {
        auto far = [&](double w) { return solver.solve(w).amplitudes(c); };
        const double fa = sa.amplitudes(c), fb = far(wb);
        if (fa * fb < 0.0) {
          boost::uintmax_t iters = 100;
          const auto r = boost::math::tools::toms748_solve(
              far, wa, wb, fa, fb, boost::math::tools::eps_tolerance<double>(50), iters);
          const double w_root = 0.5 * (r.first + r.second);
          const double l_root = solver.solve(w_root).leakage;
          if (l_root < best_leak) {
            w_opt = w_root;
            best_leak = l_root;
          }
        }
      }
    }
    const LocalizedSolution sol = solver.solve(w_opt);
    DecouplingZero z;
    z.frequency = sol.frequency;
    z.candidate = x;
    z.leakage = sol.leakage;
    z.bath_leakage = sol.bath_leakage;
    (sol.bath_leakage < opts.leakage_tolerance ? res.zeros : res.rejected).push_back(z);
  }
  // Two hits belong to the same dip when no bath mode lies between them or they sit closer
  // than the envelope can resolve; keep the better one.
  auto same_dip = [&](double a, double b) {
    const double* f = modes.frequencies.data();
    const double* between = std::upper_bound(f, f + k, a);
    if (between == f + k || *between >= b) return true;
    const Index j = std::min<Index>(k - 1, between - f);
    return b - a < 0.75 * sd.bandwidths(j);
  };
  auto merge = [&](std::vector<DecouplingZero>& v) {
    std::sort(v.begin(), v.end(),
              [](const DecouplingZero& p, const DecouplingZero& q) { return p.frequency < q.frequency; });
    std::vector<DecouplingZero> out;
    for (const auto& z : v) {
      if (!out.empty()) {
        if (same_dip(out.back().frequency, z.frequency)) {
          if (z.bath_leakage < out.back().bath_leakage) out.back() = z;
          continue;
        }
      }
      out.push_back(z);
    }
    v = std::move(out);
  };
  merge(res.zeros);
  merge(res.rejected);
  for (std::size_t i = 0; i < res.zeros.size(); ++i) res.zeros[i].ell = static_cast<int>(i + 1);
  return res;
}

DecouplingResult decoupling_frequencies(const DefectBath& bath, int ell_max,
                                        const DecouplingOptions& opts) {
  if (ell_max < 1) throw Error(ErrorKind::invalid_argument, "ell_max must be >= 1");
  DecouplingResult res = find_decoupling_zeros(bath, opts);
  if (res.exact_decoupling) return res;
  if (static_cast<int>(res.zeros.size()) < ell_max)
    throw Error(ErrorKind::no_zero_found,
                std::to_string(res.zeros.size()) + " validated " + to_string(bath.parity) +
                    " zeros in the band, " + std::to_string(ell_max) + " requested");
  res.zeros.resize(ell_max);
  return res;
}

DecouplingResult decoupling_frequencies(const ChainSpec& spec, Parity parity, double gamma,
                                        int ell_max, const DecouplingOptions& opts) {
  return decoupling_frequencies(defect_bath(spec, parity, gamma), ell_max, opts);
}

DecouplingResult decoupling_frequencies(const NNSpec& spec, Parity parity, int ell_max,
                                        const DecouplingOptions& opts) {
  const auto [even, odd] = parity_decompose_nn(spec);
  return decoupling_frequencies(defect_bath(parity == Parity::odd ? odd : even), ell_max, opts);
}

// ---------------------------------------------------------------------------

namespace {

// Transverse parity block as a function of U0: V(U0) = base + diag(U0 / (2 m)).
struct TransverseFamily {
  Eigen::MatrixXd base;          // branch block without the U0 term
  Eigen::VectorXd masses;        // branch masses
  Index defect = 0;              // defect coordinate in the branch
  Eigen::MatrixXd full_base;     // full transverse block without U0 term
  Eigen::VectorXd full_masses;
  double u_par = 1.0;

  TransverseFamily(const ChainSpec& spec, Parity parity, double gamma) {
    const auto eq = equilibrium_positions(spec);
    const auto sites = defect_sites(spec);
    const int n = spec.n_ions;
    const Eigen::MatrixXd K = coulomb_couplings(eq.positions, spec.charge);
    u_par = effective_axial_strength(spec);
    full_masses = chain_masses(spec, sites);
    full_base = 0.5 * K;
    full_base.diagonal() = Eigen::VectorXd::Constant(n, -0.5 * u_par) - 0.5 * K.rowwise().sum();
    full_base(sites.left, sites.left) += gamma;
    full_base(sites.right, sites.right) += gamma;
    QuadraticModel m;
    m.masses = full_masses;
    m.potential = full_base;
    Reflection r(n);
    std::vector<Index> reps;
    for (int j = 0; j < n; ++j) r[j] = n - 1 - j;
    for (int j = n / 2; j < n; ++j) reps.push_back(j);
    const ParitySplit split = split_by_reflection(m, r, reps);
    const QuadraticModel& b = parity == Parity::even ? split.even : split.odd;
    base = b.potential;
    masses = b.masses;
    const auto& src = parity == Parity::even ? split.even_source : split.odd_source;
    for (Index i = 0; i < static_cast<Index>(src.size()); ++i)
      if (src[i] == sites.right) defect = i;
  }

  bool stable(double u0) const {
    for (Index j = 0; j < full_masses.size(); ++j)
      if (!(u0 / full_masses(j) - u_par > 0.0)) return false;
    Eigen::MatrixXd V = full_base;
    V.diagonal() += 0.5 * u0 * full_masses.cwiseInverse();
    return V.llt().info() == Eigen::Success;
  }

  double localized(double u0) const {
    QuadraticModel m;
    m.masses = masses;
    m.potential = base;
    m.potential.diagonal() += 0.5 * u0 * masses.cwiseInverse();
    const ModeDecomposition md = normal_modes(m);
    Index j = 0;
    md.vectors.row(defect).cwiseAbs().maxCoeff(&j);
    return md.frequencies(j);
  }
};

}  // namespace

double localized_transverse_frequency(const ChainSpec& spec, Parity parity, double gamma) {
  if (parity == Parity::none) throw Error(ErrorKind::invalid_argument, "parity must be even or odd");
  const TransverseFamily fam(spec, parity, gamma);
  if (!fam.stable(spec.transverse_scale))
    throw Error(ErrorKind::transverse_instability, "transverse model unstable at this U0");
  return fam.localized(spec.transverse_scale);
}

TuningResult tune_defect_frequency(const ChainSpec& spec, double target, Parity parity,
                                   double gamma) {
  if (!(target > 0.0)) throw Error(ErrorKind::invalid_argument, "target frequency must be positive");
  if (parity == Parity::none) throw Error(ErrorKind::invalid_argument, "parity must be even or odd");
  const TransverseFamily fam(spec, parity, gamma);
  TuningResult out;
  auto f = [&](double u0) {
    ++out.evaluations;
    return fam.localized(u0) - target;
  };
  const double M = spec.heavy_mass;
  const double kd = -fam.base(fam.defect, fam.defect);  // U_par/2 + sum K/2 - gamma
  double guess = M * (2.0 * (M * target * target + kd) );
  guess = std::max(guess, 2.0 * spec.light_mass * fam.u_par);

  // Smallest stable U0 by bisection.
  double unstable = 0.0, stable = guess;
  for (int i = 0; i < 200 && !fam.stable(stable); ++i) stable *= 2.0;
  if (!fam.stable(stable)) throw Error(ErrorKind::untunable, "no stable U0 found");
  for (int i = 0; i < 200 && stable - unstable > 1e-12 * stable; ++i) {
    const double mid = 0.5 * (stable + unstable);
    (fam.stable(mid) ? stable : unstable) = mid;
  }
  double lo = stable * (1.0 + 1e-9);
  double flo = f(lo);
  if (flo > 0.0)
    throw Error(ErrorKind::untunable, "target below the lowest reachable localized frequency");
  // Move lo up towards the guess when possible to shrink the bracket.
  if (guess > lo) {
    const double fg = f(guess);
    if (fg <= 0.0) {
      lo = guess;
      flo = fg;
    }
  }
  double hi = std::max(lo * 2.0, guess);
  double fhi = f(hi);
  for (int i = 0; i < 200 && fhi < 0.0; ++i) {
    lo = hi;
    flo = fhi;
    hi *= 2.0;
    fhi = f(hi);
  }
  if (fhi < 0.0) throw Error(ErrorKind::untunable, "target above the reachable range");
  double u0 = lo;
  if (flo != 0.0) {
    boost::uintmax_t iters = 300;
    auto r = boost::math::tools::toms748_solve(
        f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(48), iters);
    u0 = 0.5 * (r.first + r.second);
  }
  out.spec = spec;
  out.spec.transverse_scale = u0;
  out.frequency = fam.localized(u0);
  if (std::abs(out.frequency - target) > 1e-8 * target)
    throw Error(ErrorKind::untunable, "root-find did not reach the target frequency");
  return out;
}

ChainSpec tune_defect_frequency(const ChainSpec& spec, double target) {
  return tune_defect_frequency(spec, target, Parity::even, 0.0).spec;
}

}  // namespace ionbath
