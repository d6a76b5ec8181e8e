#include "ionbath/tomography.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/random/binomial_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>

#include "ionbath/errors.hpp"

namespace ionbath {

void CouplingProfile::validate() const {
  if (!g) throw Error(ErrorKind::invalid_argument, "coupling profile has no g(t)");
  if (!(duration > 0.0)) throw Error(ErrorKind::invalid_argument, "duration must be positive");
  if (!(frequency >= 0.0)) throw Error(ErrorKind::invalid_argument, "frequency must be >= 0");
}

std::complex<double> accumulate_phase(const CouplingProfile& p) {
  p.validate();
  std::vector<double> nodes{0.0, p.duration};
  for (double b : p.breakpoints)
    if (b > 0.0 && b < p.duration) nodes.push_back(b);
  // Split into half periods so every panel sees a smooth, at most half-oscillating integrand.
  if (p.frequency > 0.0) {
    const double half = std::numbers::pi / p.frequency;
    for (double t = half; t < p.duration; t += half) nodes.push_back(t);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  using boost::math::quadrature::gauss_kronrod;
  double re = 0.0, im = 0.0;
  const double w = p.frequency;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double a = nodes[k], b = nodes[k + 1];
    re += gauss_kronrod<double, 31>::integrate(
        [&](double t) { return p.g(t) * std::cos(w * t); }, a, b, 15, 1e-13);
    im += gauss_kronrod<double, 31>::integrate(
        [&](double t) { return p.g(t) * std::sin(w * t); }, a, b, 15, 1e-13);
  }
  // 2i (re + i im)
  return {-2.0 * im, 2.0 * re};
}

CouplingProfile two_segment_profile(std::complex<double> target, double frequency,
                                    double duration) {
  if (!(duration > 0.0) || !(frequency >= 0.0))
    throw Error(ErrorKind::invalid_argument, "profile needs duration > 0 and frequency >= 0");
  const double h = 0.5 * duration;
  auto segment = [&](double a, double b) -> std::complex<double> {
    if (frequency == 0.0) return {b - a, 0.0};
    const std::complex<double> i(0.0, 1.0);
    return (std::exp(i * frequency * b) - std::exp(i * frequency * a)) / (i * frequency);
  };
  const std::complex<double> i2(0.0, 2.0);
  const std::complex<double> c1 = i2 * segment(0.0, h), c2 = i2 * segment(h, duration);
  Eigen::Matrix2d A;
  A << c1.real(), c2.real(), c1.imag(), c2.imag();
  const double det = A.determinant();
  if (std::abs(det) < 1e-12 * A.cwiseAbs().maxCoeff() * A.cwiseAbs().maxCoeff())
    throw Error(ErrorKind::ill_conditioned_grid,
                "segment integrals are parallel; choose another duration");
  const Eigen::Vector2d g = A.inverse() * Eigen::Vector2d(target.real(), target.imag());
  CouplingProfile p;
  const double g1 = g(0), g2 = g(1);
  p.g = [g1, g2, h](double t) { return t < h ? g1 : g2; };
  p.frequency = frequency;
  p.duration = duration;
  p.breakpoints = {h};
  return p;
}

std::pair<std::complex<double>, std::complex<double>> displacement_from_quadrature(
    const Eigen::Vector4d& u) {
  const double r2 = std::sqrt(2.0);
  return {{-u(1) / r2, u(0) / r2}, {-u(3) / r2, u(2) / r2}};
}

std::vector<std::pair<std::complex<double>, std::complex<double>>> star_grid(double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::invalid_argument, "grid radius must be positive");
  std::vector<std::pair<std::complex<double>, std::complex<double>>> grid;
  grid.push_back({0.0, 0.0});
  for (double r : {radius, 0.5 * radius}) {
    for (int i = 0; i < 4; ++i)
      for (double sgn : {1.0, -1.0}) {
        Eigen::Vector4d u = Eigen::Vector4d::Zero();
        u(i) = sgn * r;
        grid.push_back(displacement_from_quadrature(u));
      }
    const double c = r / std::sqrt(2.0);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        for (double si : {1.0, -1.0})
          for (double sj : {1.0, -1.0}) {
            Eigen::Vector4d u = Eigen::Vector4d::Zero();
            u(i) = si * c;
            u(j) = sj * c;
            grid.push_back(displacement_from_quadrature(u));
          }
  }
  return grid;
}

std::vector<TomographySample> simulate_measurement(
    const CovarianceState& state,
    const std::vector<std::pair<std::complex<double>, std::complex<double>>>& grid, long shots,
    std::uint64_t seed) {
  if (state.covariance.rows() != 4 || state.mean.size() != 4)
    throw Error(ErrorKind::dimension_mismatch, "measurement needs a two-mode state");
  if (shots < 0) throw Error(ErrorKind::invalid_argument, "shots must be >= 0");
  check_physical(state.covariance);

  boost::random::mt19937_64 rng(seed);
  auto estimate = [&](double mean) {
    const double p = std::clamp(0.5 * (1.0 + mean), 0.0, 1.0);
    boost::random::binomial_distribution<long> dist(shots, p);
    return 2.0 * static_cast<double>(dist(rng)) / static_cast<double>(shots) - 1.0;
  };

  using Key = std::array<double, 4>;
  std::map<Key, std::complex<double>> seen;
  std::vector<TomographySample> out;
  out.reserve(grid.size());
  for (const auto& [a, b] : grid) {
    std::complex<double> chi = characteristic_function(state, a, b);
    if (shots > 0) {
      const Key mirror{-a.real() + 0.0, -a.imag() + 0.0, -b.real() + 0.0, -b.imag() + 0.0};
      if (auto it = seen.find(mirror); it != seen.end()) {
        chi = std::conj(it->second);
      } else if (a == 0.0 && b == 0.0) {
        chi = 1.0;
      } else {
        chi = {estimate(chi.real()), estimate(chi.imag())};
      }
      seen[Key{a.real() + 0.0, a.imag() + 0.0, b.real() + 0.0, b.imag() + 0.0}] = chi;
    }
    out.push_back({a, b, 0.25 * chi, shots});
  }
  return out;
}

namespace {

double min_symplectic(const Eigen::Matrix4d& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(s);
  if (es.eigenvalues().minCoeff() <= 0.0) return 0.0;
  return symplectic_eigenvalues(s).minCoeff();
}

}  // namespace

Reconstruction reconstruct_covariance(const std::vector<TomographySample>& samples) {
  const double r2 = std::sqrt(2.0);
  std::vector<Eigen::Vector4d> us;
  std::vector<double> mag, arg;
  for (const auto& s : samples) {
    const Eigen::Vector4d u(r2 * s.alpha.imag(), -r2 * s.alpha.real(), r2 * s.beta.imag(),
                            -r2 * s.beta.real());
    const std::complex<double> chi = s.chi();
    if (u.squaredNorm() == 0.0 || std::abs(chi) <= 0.0) continue;
    us.push_back(u);
    mag.push_back(std::abs(chi));
    arg.push_back(std::arg(chi));
  }
  const Index n = static_cast<Index>(us.size());
  Eigen::MatrixXd Aq(n, 10), Am(n, 4);
  Eigen::VectorXd bq(n), bm(n);
  for (Index k = 0; k < n; ++k) {
    const auto& u = us[static_cast<std::size_t>(k)];
    const double w = mag[static_cast<std::size_t>(k)];
    Index c = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) Aq(k, c++) = w * (i == j ? 0.5 : 1.0) * u(i) * u(j);
    bq(k) = -w * std::log(mag[static_cast<std::size_t>(k)]);
    Am.row(k) = w * u.transpose();
    bm(k) = w * arg[static_cast<std::size_t>(k)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qq(Aq), qm(Am);
  qq.setThreshold(1e-10);
  qm.setThreshold(1e-10);
  if (n < 10 || qq.rank() < 10 || qm.rank() < 4)
    throw Error(ErrorKind::ill_conditioned_grid,
                "sample grid does not determine all covariance entries");
  const Eigen::VectorXd x = qq.solve(bq);
  const Eigen::VectorXd r = qm.solve(bm);

  Reconstruction rec;
  Eigen::Matrix4d sigma;
  Index c = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) sigma(i, j) = sigma(j, i) = x(c++);
  rec.residual = std::sqrt((Aq * x - bq).squaredNorm() / static_cast<double>(n));

  if (min_symplectic(sigma) < 0.5) {
    // Smallest isotropic noise restoring the uncertainty bound (bisection on delta).
    double lo = 0.0, hi = 0.5;
    while (min_symplectic(sigma + hi * Eigen::Matrix4d::Identity()) < 0.5) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (min_symplectic(sigma + mid * Eigen::Matrix4d::Identity()) < 0.5 ? lo : hi) = mid;
    }
    sigma += hi * Eigen::Matrix4d::Identity();
    rec.repaired = true;
    rec.added_noise = hi;
  }
  rec.state.covariance = sigma;
  rec.state.mean = r;
  return rec;
}

}  // namespace ionbath
