#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ionbath/coulomb_chain.hpp"
#include "ionbath/errors.hpp"
#include "ionbath/modes.hpp"
#include "ionbath/nn_chain.hpp"
#include "ionbath/spectral.hpp"

using namespace ionbath;
using testing_support::max_sorted_difference;

namespace {

constexpr double kPi = 3.14159265358979323846;

QuadraticModel two_masses(double m1, double m2, double k1, double k2, double kc) {
  QuadraticModel m;
  m.masses = Eigen::Vector2d(m1, m2);
  m.potential.resize(2, 2);
  m.potential << k1 + kc, -kc, -kc, k2 + kc;
  return m;
}

ChainSpec paul(int n, int d, double u0 = 833.0, double omega_ref = 0.0) {
  ChainSpec s;
  s.reference_frequency = omega_ref;
  s.n_ions = n;
  s.defect_distance = d;
  s.heavy_mass = 2.87;
  s.transverse_scale = u0;
  return s;
}

NNSpec nn(int n_bulk, int attach, double gamma) {
  NNSpec s;
  s.n_bulk = n_bulk;
  s.defect_mass = 2.0;
  s.spring = 10.0;
  s.coupling = gamma;
  s.attach_index = attach;
  return s;
}

std::vector<double> freqs(const ModeDecomposition& md) {
  return {md.frequencies.data(), md.frequencies.data() + md.size()};
}

}  // namespace

TEST_CASE("single oscillator") {
  QuadraticModel m;
  m.masses = Eigen::VectorXd::Constant(1, 2.0);
  m.potential = Eigen::MatrixXd::Constant(1, 1, 8.0);
  const ModeDecomposition md = normal_modes(m);
  CHECK(md.frequencies(0) == doctest::Approx(2.0));
  CHECK(md.vectors(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("two coupled masses against the closed form") {
  const double m1 = 1.0, m2 = 3.0, k1 = 2.0, k2 = 5.0, kc = 0.7;
  const ModeDecomposition md = normal_modes(two_masses(m1, m2, k1, k2, kc));
  const double a = (k1 + kc) / m1, b = (k2 + kc) / m2, c = kc / std::sqrt(m1 * m2);
  const double disc = std::sqrt(0.25 * (a - b) * (a - b) + c * c);
  CHECK(md.frequencies(0) == doctest::Approx(std::sqrt(0.5 * (a + b) - disc)).epsilon(1e-12));
  CHECK(md.frequencies(1) == doctest::Approx(std::sqrt(0.5 * (a + b) + disc)).epsilon(1e-12));
}

TEST_CASE("mode vectors are orthonormal eigenvectors") {
  const CoupledModel cm = build_coupled_model(paul(30, 8), 4.0);
  const ModeDecomposition md = normal_modes(cm.full);
  const Index n = md.size();
  CHECK((md.vectors.transpose() * md.vectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <
        1e-10);
  const Eigen::MatrixXd W = cm.full.weighted_potential();
  double res = 0.0;
  for (Index j = 0; j < n; ++j)
    res = std::max(res, (W * md.vectors.col(j) -
                         md.frequencies(j) * md.frequencies(j) * md.vectors.col(j))
                            .cwiseAbs()
                            .maxCoeff());
  CHECK(res < 1e-10 * W.cwiseAbs().maxCoeff());
  for (Index j = 0; j + 1 < n; ++j) CHECK(md.frequencies(j) <= md.frequencies(j + 1));
}

TEST_CASE("unstable model is rejected") {
  QuadraticModel m = two_masses(1.0, 1.0, -1.0, 1.0, 0.0);
  CHECK_THROWS_AS(normal_modes(m), Error);
}

TEST_CASE("Coulomb parity blocks reproduce the full spectrum") {
  for (auto [n, d] : {std::pair{16, 14}, std::pair{17, 5}, std::pair{4, 0}, std::pair{5, 1}}) {
    const CoupledModel cm = build_coupled_model(paul(n, d), 3.0);
    const auto [even, odd] = parity_decompose_coulomb(cm);
    auto fe = freqs(normal_modes(even));
    const auto fo = freqs(normal_modes(odd));
    fe.insert(fe.end(), fo.begin(), fo.end());
    CHECK(max_sorted_difference(fe, freqs(normal_modes(cm.full))) < 1e-9);
  }
}

TEST_CASE("uniform axial spectrum alternates between parities") {
  ChainSpec s = paul(4, 0);
  s.spacing_model = SpacingModel::uniform;
  const CoupledModel cm = build_coupled_model(s, 0.0);
  const ModeDecomposition md = normal_modes(cm.axial, [] {
    Reflection r(4);
    for (Index j = 0; j < 4; ++j) r[j] = 3 - j;
    return r;
  }());
  REQUIRE(md.parity.size() == 4);
  for (std::size_t j = 0; j + 1 < 4; ++j) CHECK(md.parity[j] != md.parity[j + 1]);
  CHECK(md.parity[0] == Parity::even);
}

TEST_CASE("lowest axial mode has uniform sign") {
  ChainSpec s = paul(40, 0, 833.0, 1.0);
  s.heavy_mass = 1.0;
  const CoupledModel cm = build_coupled_model(s, 0.0);
  const ModeDecomposition md = normal_modes(cm.axial);
  const Eigen::VectorXd v = md.vectors.col(0);
  CHECK((v.array() > 0.0).all());
  CHECK(md.frequencies(0) == doctest::Approx(axial_trap_frequency(40, 1.0)).epsilon(1e-8));  // centre of mass
}

TEST_CASE("localized transverse mode is confined to the defects") {
  const ChainSpec s = paul(400, 8, 833.0, 1.0);
  const CoupledModel cm = build_coupled_model(s, 0.0);
  const ModeDecomposition md = normal_modes(cm.transverse);
  for (Index j : {0, 1}) {
    const Eigen::VectorXd v = mode_profile(md, j);
    const double peak = v.cwiseAbs().maxCoeff();
    double outside = 0.0;
    for (Index i = 0; i < v.size(); ++i) {
      const bool near = std::abs(i - cm.sites.left) <= 1 || std::abs(i - cm.sites.right) <= 1;
      if (!near) outside = std::max(outside, std::abs(v(i)));
    }
    CHECK(outside < 0.01 * peak);
    const double norm = (v.array().square() * md.masses.array()).sum();
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("spectral density weights") {
  const NNSpec s = nn(9, 2, 0.0);
  const auto [even, odd] = parity_decompose_nn(s);
  const DefectBath b0 = defect_bath(even);
  const ModeDecomposition md0 = normal_modes(b0.bath);
  CHECK(spectral_density(md0, b0.coupling).total_weight() == 0.0);

  // Total weight equals (pi/2) g^T W^{-1} g with g the mass-weighted coupling.
  const NNSpec sg = nn(9, 2, 0.8);
  const DefectBath b = defect_bath(parity_decompose_nn(sg).first);
  const ModeDecomposition md = normal_modes(b.bath);
  const SpectralDensity sd = spectral_density(md, b.coupling);
  const Eigen::VectorXd g = b.coupling.cwiseQuotient(b.bath.masses.cwiseSqrt());
  const double expect = 0.5 * kPi * g.dot(b.bath.weighted_potential().ldlt().solve(g));
  CHECK(sd.total_weight() == doctest::Approx(expect).epsilon(1e-10));
  CHECK((sd.weights.array() >= 0.0).all());

  // Flipping the sign of a mode vector leaves the weights unchanged.
  ModeDecomposition flipped = md;
  flipped.vectors.col(2) *= -1.0;
  CHECK((spectral_density(flipped, b.coupling).weights - sd.weights).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("memory kernel") {
  const NNSpec s = nn(12, 3, 0.0);
  const QuadraticModel bulk = [&] {
    const QuadraticModel full = build_nn_model(s);
    QuadraticModel m;
    m.masses = full.masses.tail(12);
    m.potential = full.potential.bottomRightCorner(12, 12);
    return m;
  }();
  const ModeDecomposition md = normal_modes(bulk);
  const Index attach = nn_attach_sites(s).second;
  const Eigen::VectorXd t0 = Eigen::VectorXd::Zero(1);
  CHECK(memory_kernel(md, 0.0, attach, Eigen::VectorXd::LinSpaced(20, 0.0, 5.0)).cwiseAbs().maxCoeff() ==
        0.0);
  const double gamma = 0.6;
  const double g0 = memory_kernel(md, gamma, attach, t0)(0);
  const Eigen::MatrixXd winv = bulk.weighted_potential().inverse();
  CHECK(g0 == doctest::Approx(gamma * gamma * winv(attach, attach) / bulk.masses(attach)).epsilon(1e-10));

  // Windowed cosine transform of the kernel recovers (2/pi) w_j for isolated modes.
  const SpectralDensity sd = spectral_density(md, gamma, attach);
  const double T = 3000.0;
  const int steps = 300000;
  const Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(steps + 1, 0.0, T);
  const Eigen::VectorXd kern = memory_kernel(md, gamma, attach, times);
  for (Index j = 0; j < md.size(); ++j) {
    if (sd.weights(j) < 1e-3 * sd.weights.maxCoeff()) continue;
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= steps; ++i) {
      const double w = 0.5 * (1.0 + std::cos(kPi * times(i) / T));  // half Hann
      num += kern(i) * std::cos(md.frequencies(j) * times(i)) * w;
      den += w;
    }
    CHECK(2.0 * num / den == doctest::Approx(2.0 * sd.weights(j) / kPi).epsilon(0.01));
  }
}

TEST_CASE("nearest-neighbour decoupling zeros") {
  // Even N, n = 1: the even-parity zero sits at sqrt(w^2 + kappa/m).
  const NNSpec s = nn(10, 1, 0.3);
  const DecouplingResult r = decoupling_frequencies(s, Parity::even, 1);
  REQUIRE(!r.zeros.empty());
  CHECK(r.zeros[0].frequency == doctest::Approx(std::sqrt(1.0 + 10.0)).epsilon(1e-10));
  CHECK(r.zeros[0].leakage < 1e-8);
}

TEST_CASE("Coulomb decoupling zeros alternate in parity") {
  const ChainSpec s = paul(800, 14);
  const double gamma = 1.9e3;
  DecouplingResult e = find_decoupling_zeros(defect_bath(s, Parity::even, gamma));
  DecouplingResult o = find_decoupling_zeros(defect_bath(s, Parity::odd, gamma));
  std::vector<std::pair<double, Parity>> all;
  for (const auto& z : e.zeros) all.emplace_back(z.frequency, Parity::even);
  for (const auto& z : o.zeros) all.emplace_back(z.frequency, Parity::odd);
  std::sort(all.begin(), all.end());
  REQUIRE(all.size() >= 10);
  for (std::size_t i = 0; i + 1 < all.size(); ++i) CHECK(all[i].second != all[i + 1].second);
  // Each zero sits in a dip of its own envelope.
  for (Parity p : {Parity::even, Parity::odd}) {
    const DefectBath b = defect_bath(s, p, gamma);
    const ModeDecomposition md = normal_modes(b.bath);
    const SpectralDensity sd = spectral_density(md, -b.coupling);
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(4000, md.frequencies(0), md.frequencies(md.size() - 1));
    const double jmax = sd.evaluate(grid).maxCoeff();
    for (const auto& z : (p == Parity::even ? e : o).zeros) CHECK(sd(z.frequency) < 0.5 * jmax);
  }
}

TEST_CASE("tuning the trap to a target localized frequency") {
  const ChainSpec s = paul(50, 4, 2000.0);
  const double target = 26.0;
  const TuningResult r = tune_defect_frequency(s, target, Parity::odd, 13.6);
  CHECK(r.frequency == doctest::Approx(target).epsilon(1e-8));
  CHECK(localized_transverse_frequency(r.spec, Parity::odd, 13.6) == doctest::Approx(target).epsilon(1e-8));
  // Already at the target: the trap is unchanged.
  const TuningResult again = tune_defect_frequency(r.spec, r.frequency, Parity::odd, 13.6);
  CHECK(again.spec.transverse_scale == doctest::Approx(r.spec.transverse_scale).epsilon(1e-8));
  // The localized frequency grows with U0.
  double prev = 0.0;
  for (double u0 : {r.spec.transverse_scale, 1.5 * r.spec.transverse_scale, 3.0 * r.spec.transverse_scale}) {
    ChainSpec t = s;
    t.transverse_scale = u0;
    const double w = localized_transverse_frequency(t, Parity::odd, 13.6);
    CHECK(w > prev);
    prev = w;
  }
}
