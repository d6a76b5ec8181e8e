#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ionbath/errors.hpp"
#include "ionbath/modes.hpp"
#include "ionbath/nn_chain.hpp"
#include "ionbath/spectral.hpp"

using namespace ionbath;
using testing_support::max_sorted_difference;
using testing_support::sorted;

namespace {

NNSpec generic(int n_bulk, int attach) {
  NNSpec s;
  s.n_bulk = n_bulk;
  s.bulk_mass = 1.0;
  s.defect_mass = 1.7;
  s.bulk_frequency = 0.8;
  s.spring = 1.3;
  s.defect_frequency = 1.1;
  s.coupling = 0.45;
  s.attach_index = attach;
  return s;
}

// Potential energy written out term by term: defects, pinned bulk, springs, defect coupling.
double nn_energy(const NNSpec& s, const Eigen::VectorXd& y) {
  const int N = s.n_bulk;
  const auto [left, right] = nn_attach_sites(s);
  double e = 0.5 * s.defect_mass * s.defect_frequency * s.defect_frequency *
             (y(0) * y(0) + y(1) * y(1));
  for (int j = 0; j < N; ++j)
    e += 0.5 * s.bulk_mass * s.bulk_frequency * s.bulk_frequency * y(2 + j) * y(2 + j);
  for (int j = 0; j + 1 < N; ++j) e += 0.5 * s.spring * std::pow(y(3 + j) - y(2 + j), 2);
  e += 0.5 * s.coupling * std::pow(y(0) - y(2 + right), 2);
  e += 0.5 * s.coupling * std::pow(y(1) - y(2 + left), 2);
  return e;
}

std::vector<double> squared_frequencies(const ModeDecomposition& md) {
  std::vector<double> v;
  for (Index j = 0; j < md.size(); ++j) v.push_back(md.frequencies(j) * md.frequencies(j));
  return v;
}

}  // namespace

TEST_CASE("single bulk oscillator without coupling is block diagonal") {
  NNSpec s;
  s.n_bulk = 1;
  s.coupling = 0.0;
  s.attach_index = 0;
  s.defect_frequency = 1.4;
  s.bulk_frequency = 0.7;
  s.defect_mass = 2.0;
  const QuadraticModel m = build_nn_model(s);
  CHECK(m.size() == 3);
  CHECK(m.potential(0, 1) == 0.0);
  CHECK(m.potential(0, 2) == 0.0);
  CHECK(m.potential(1, 2) == 0.0);
  const auto f = sorted(normal_modes(m).frequencies);
  CHECK(f[0] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(f[1] == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(f[2] == doctest::Approx(1.4).epsilon(1e-12));
}

TEST_CASE("defect row of the three-site chain") {
  NNSpec s = generic(3, 1);
  const QuadraticModel m = build_nn_model(s);
  // X1 couples to the right attach site, which is bulk site 2 (coordinate 4).
  CHECK(m.potential(0, 0) == doctest::Approx(s.defect_mass * 1.21 + s.coupling));
  CHECK(m.potential(0, 4) == doctest::Approx(-s.coupling));
  for (Index j : {1, 2, 3}) CHECK(m.potential(0, j) == 0.0);
  CHECK(m.masses(0) == s.defect_mass);
  CHECK(m.masses(2) == s.bulk_mass);
}

TEST_CASE("assembled potential equals the Hessian of the energy") {
  for (int attach : {0, 1, 2}) {
    const NNSpec s = generic(5, attach);
    const QuadraticModel m = build_nn_model(s);
    const Eigen::MatrixXd H = testing_support::numeric_hessian(
        [&](const Eigen::VectorXd& y) { return nn_energy(s, y); }, Eigen::VectorXd::Zero(7), 0.5);
    CHECK((H - m.potential).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(max_sorted_difference(testing_support::weighted_eigenvalues(m.masses, H),
                                squared_frequencies(normal_modes(m))) < 1e-9);
  }
}

TEST_CASE("attach index outside the chain is rejected") {
  NNSpec s = generic(5, 3);
  CHECK_THROWS_AS(build_nn_model(s), Error);
  try {
    build_nn_model(s);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_index);
  }
}

TEST_CASE("parity blocks reproduce the full spectrum") {
  for (int n_bulk : {5, 6, 9, 12}) {
    for (int attach = 0; attach <= generic(n_bulk, 0).max_attach(); ++attach) {
      const NNSpec s = generic(n_bulk, attach);
      const QuadraticModel full = build_nn_model(s);
      const auto [even, odd] = parity_decompose_nn(s);
      CHECK(even.model.size() + odd.model.size() == full.size());
      auto fe = squared_frequencies(normal_modes(even.model));
      const auto fo = squared_frequencies(normal_modes(odd.model));
      fe.insert(fe.end(), fo.begin(), fo.end());
      CHECK(max_sorted_difference(fe, squared_frequencies(normal_modes(full))) < 1e-10);
      CHECK(even.model.potential.trace() + odd.model.potential.trace() ==
            doctest::Approx(full.potential.trace()).epsilon(1e-12));
      CHECK(even.shifted_defect_frequency * even.shifted_defect_frequency ==
            doctest::Approx(s.defect_frequency * s.defect_frequency + s.coupling / s.defect_mass));
    }
  }
}

TEST_CASE("parity block dimensions for five sites") {
  const auto [even, odd] = parity_decompose_nn(generic(5, 1));
  CHECK(even.model.size() == 4);
  CHECK(odd.model.size() == 3);
}

TEST_CASE("mirror reflection leaves the potential invariant") {
  const NNSpec s = generic(8, 2);
  const QuadraticModel m = build_nn_model(s);
  const Eigen::MatrixXd P = reflection_matrix(nn_reflection(s.n_bulk));
  CHECK((P * m.potential * P.transpose() - m.potential).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("relative defect motion decouples when both defects share a site") {
  for (double gamma : {0.0, 0.3, 2.0, 17.0}) {
    NNSpec s = generic(7, 0);
    s.coupling = gamma;
    const auto [even, odd] = parity_decompose_nn(s);
    const QuadraticModel& m = odd.model;
    for (Index j = 1; j < m.size(); ++j) CHECK(m.potential(0, j) == 0.0);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m.size());
    v(0) = 1.0;
    CHECK(eigen_residual(m, v, s.shifted_defect_frequency()) < 1e-12);
    const DecouplingResult r = decoupling_frequencies(s, Parity::odd, 1);
    CHECK(r.exact_decoupling);
  }
}

TEST_CASE("nearest-neighbour localized mode at the resonance") {
  // Even N, n = 1: two interposed sites, resonance sqrt(w^2 + kappa/m).
  NNSpec s = generic(10, 1);
  const double res = std::sqrt(s.bulk_frequency * s.bulk_frequency + s.spring / s.bulk_mass);
  s.defect_frequency = std::sqrt(res * res - s.coupling / s.defect_mass);
  const auto [even, odd] = parity_decompose_nn(s);
  const LocalizedMode lm = localized_mode_nn(even, 1);
  CHECK(lm.resonance_frequency == doctest::Approx(res).epsilon(1e-13));
  CHECK(eigen_residual(even.model, lm.vector, res) < 1e-10);
  const double norm = lm.vector.dot(even.model.masses.cwiseProduct(lm.vector));
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));

  // The attach-site row forces kappa v_interposed = -gamma v_X.
  Index site = -1;
  for (Index i = 1; i < even.model.size(); ++i)
    if (std::abs(lm.vector(i)) > 1e-12) site = i;
  REQUIRE(site > 0);
  CHECK(even.folded[static_cast<std::size_t>(site)] == 0);
  CHECK(lm.vector(site) / lm.vector(0) == doctest::Approx(-s.coupling / s.spring).epsilon(1e-10));

  NNSpec detuned = s;
  detuned.defect_frequency *= 1.1;
  const auto [even_d, odd_d] = parity_decompose_nn(detuned);
  CHECK(eigen_residual(even_d.model, localized_mode_nn(even_d, 1).vector,
                       detuned.shifted_defect_frequency()) > 1e-3);
}

TEST_CASE("localized mode for n = 2 has no weight on or beyond the attach sites") {
  for (int n_bulk : {11, 12}) {
    NNSpec s = generic(n_bulk, 2);
    for (Parity p : {Parity::even, Parity::odd}) {
      auto blocks = parity_decompose_nn(s);
      const ParityModel& pm0 = p == Parity::even ? blocks.first : blocks.second;
      const auto res = nn_resonances(pm0);
      REQUIRE(!res.empty());
      s.defect_frequency = std::sqrt(res[0] * res[0] - s.coupling / s.defect_mass);
      blocks = parity_decompose_nn(s);
      const ParityModel& pm = p == Parity::even ? blocks.first : blocks.second;
      const LocalizedMode lm = localized_mode_nn(pm, 1);
      for (Index i = 1; i < pm.model.size(); ++i)
        if (pm.folded[static_cast<std::size_t>(i)] >= pm.attach_index) CHECK(lm.vector(i) == 0.0);
      // Oracle: the eigenvector of the full block at this frequency.
      const ModeDecomposition md = normal_modes(pm.model);
      Index best = 0;
      for (Index j = 0; j < md.size(); ++j)
        if (std::abs(md.frequencies(j) - res[0]) < std::abs(md.frequencies(best) - res[0])) best = j;
      CHECK(md.frequencies(best) == doctest::Approx(res[0]).epsilon(1e-10));
      const Eigen::VectorXd w = lm.vector.cwiseProduct(pm.model.masses.cwiseSqrt());
      CHECK(std::abs(w.dot(md.vectors.col(best))) == doctest::Approx(1.0).epsilon(1e-9));
      s = generic(n_bulk, 2);
    }
  }
}

TEST_CASE("bulk frequencies respect the dispersion bounds") {
  NNSpec s = generic(41, 5);
  s.coupling = 0.0;
  const auto [even, odd] = parity_decompose_nn(s);
  const double lo = s.bulk_frequency, hi = std::sqrt(lo * lo + 4.0 * s.spring / s.bulk_mass);
  for (const ParityModel* pm : {&even, &odd}) {
    const ModeDecomposition md = normal_modes(pm->model);
    for (Index j = 0; j < md.size(); ++j) {
      if (std::abs(md.vectors(0, j)) > 0.5) continue;  // defect mode
      CHECK(md.frequencies(j) >= lo - 1e-12);
      CHECK(md.frequencies(j) <= hi + 1e-12);
    }
  }
}
