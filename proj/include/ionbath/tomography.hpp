#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "ionbath/gaussian.hpp"

namespace ionbath {

// Spin-motion coupling g(t) of one defect with transverse mode frequency Omega on [0, duration].
struct CouplingProfile {
  std::function<double(double)> g;
  double frequency = 1.0;  // Omega
  double duration = 1.0;
  std::vector<double> breakpoints;  // discontinuities of g inside (0, duration)

  void validate() const;
};

// 2i int_0^duration g(t) e^{i Omega t} dt by adaptive Gauss-Kronrod quadrature.
std::complex<double> accumulate_phase(const CouplingProfile& profile);

// Piecewise-constant profile with two equal segments reaching the requested displacement.
// Throws ill-conditioned-grid when the two segment integrals are parallel.
CouplingProfile two_segment_profile(std::complex<double> target, double frequency,
                                    double duration);

struct TomographySample {
  std::complex<double> alpha;
  std::complex<double> beta;
  std::complex<double> t_value;  // estimate of <T> = chi / 4
  long shots = 0;                // 0 = exact

  std::complex<double> chi() const { return 4.0 * t_value; }
};

// Displacement pair (alpha, beta) for the quadrature vector u (see characteristic_function).
std::pair<std::complex<double>, std::complex<double>> displacement_from_quadrature(
    const Eigen::Vector4d& u);

// Origin plus points at radius and radius/2 along the four quadrature axes and along both
// diagonals of all six quadrature planes (radius in quadrature units).
std::vector<std::pair<std::complex<double>, std::complex<double>>> star_grid(double radius = 1.5);

// Exact characteristic function (shots = 0) or shot-noise estimates: real and imaginary parts
// of chi are means of `shots` outcomes +-1. Mirror points reuse the conjugate estimate so that
// chi(-alpha, -beta) = conj chi(alpha, beta) holds for every sample set.
std::vector<TomographySample> simulate_measurement(
    const CovarianceState& state,
    const std::vector<std::pair<std::complex<double>, std::complex<double>>>& grid, long shots = 0,
    std::uint64_t seed = 1);

struct Reconstruction {
  CovarianceState state;
  double residual = 0.0;  // rms residual of the -ln|chi| fit
  bool repaired = false;  // isotropic noise was added to restore physicality
  double added_noise = 0.0;
};

// Fits -ln|chi| = u^T Sigma u / 2 and arg chi = u . mean by weighted least squares (weights
// |chi|). A fitted covariance violating the uncertainty bound is replaced by Sigma + delta I
// with the smallest delta that makes it physical.
Reconstruction reconstruct_covariance(const std::vector<TomographySample>& samples);

}  // namespace ionbath
