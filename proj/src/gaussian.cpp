#include "ionbath/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "ionbath/errors.hpp"

namespace ionbath {

Eigen::MatrixXd symplectic_form(Index modes) {
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  for (Index k = 0; k < modes; ++k) {
    W(2 * k, 2 * k + 1) = 1.0;
    W(2 * k + 1, 2 * k) = -1.0;
  }
  return W;
}

Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& covariance) {
  const Index dim = covariance.rows();
  if (dim % 2 != 0 || covariance.cols() != dim)
    throw Error(ErrorKind::dimension_mismatch, "covariance must be square with even size");
  const Eigen::MatrixXd S = 0.5 * (covariance + covariance.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw Error(ErrorKind::unphysical_covariance, "covariance is not positive definite");
  const Eigen::MatrixXd R = es.operatorSqrt();
  // i R Omega R is Hermitian with eigenvalues +-nu_k.
  const Eigen::MatrixXcd K =
      std::complex<double>(0.0, 1.0) * (R * symplectic_form(dim / 2) * R).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ek(K, Eigen::EigenvaluesOnly);
  return ek.eigenvalues().tail(dim / 2);
}

void check_physical(const Eigen::MatrixXd& covariance, double tol) {
  const double nu = symplectic_eigenvalues(covariance).minCoeff();
  if (nu < 0.5 - tol)
    throw Error(ErrorKind::unphysical_covariance,
                "smallest symplectic eigenvalue " + std::to_string(nu) + " < 1/2");
}

void InitialStateSpec::validate() const {
  if (!(bath_temperature >= 0.0))
    throw Error(ErrorKind::invalid_argument, "bath temperature must be >= 0");
  if (defect_mode_frequency < 0.0)
    throw Error(ErrorKind::invalid_argument, "defect mode frequency must be >= 0");
}

ModeVariance thermal_variance(double omega, double temperature) {
  if (!(omega > 0.0))
    throw Error(ErrorKind::unstable_model, "zero-frequency mode has no normalizable state");
  const double c = temperature > 0.0 ? 1.0 / std::tanh(omega / (2.0 * temperature)) : 1.0;
  return {c / (2.0 * omega), c * omega / 2.0};
}

ModeVariance squeezed_variance(double omega, double s) {
  if (!(omega > 0.0))
    throw Error(ErrorKind::unstable_model, "cannot squeeze a zero-frequency mode");
  return {std::exp(-2.0 * s) / (2.0 * omega), std::exp(2.0 * s) * omega / 2.0};
}

namespace {

CovarianceState local_state(const ModeDecomposition& md, const Eigen::VectorXd& dq,
                            const Eigen::VectorXd& dp) {
  const Index n = md.size();
  const Eigen::VectorXd sm = md.masses.cwiseSqrt();
  const Eigen::MatrixXd A = sm.cwiseInverse().asDiagonal() * md.vectors;
  const Eigen::MatrixXd B = sm.asDiagonal() * md.vectors;
  const Eigen::MatrixXd Q = A * dq.asDiagonal() * A.transpose();
  const Eigen::MatrixXd P = B * dp.asDiagonal() * B.transpose();
  CovarianceState st;
  st.mean = Eigen::VectorXd::Zero(2 * n);
  st.covariance = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      st.covariance(2 * i, 2 * j) = Q(i, j);
      st.covariance(2 * i + 1, 2 * j + 1) = P(i, j);
    }
  return st;
}

}  // namespace

CovarianceState prepare_initial_state(const QuadraticModel& model0, const StateLayout& layout,
                                      const InitialStateSpec& spec) {
  spec.validate();
  const Index n = model0.size();
  if (static_cast<Index>(layout.reservoir.size()) != n)
    throw Error(ErrorKind::dimension_mismatch, "layout does not match the model");
  const ModeDecomposition md = normal_modes(model0);

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd dweight = Eigen::VectorXd::Zero(n);
  for (Index a : layout.defects) {
    if (a < 0 || a >= n) throw Error(ErrorKind::invalid_index, "defect coordinate out of range");
    dweight += md.vectors.row(a).transpose().cwiseAbs2();
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return dweight(x) > dweight(y); });
  std::vector<bool> squeezed(n, false);
  for (std::size_t k = 0; k < layout.defects.size() && k < order.size(); ++k) squeezed[order[k]] = true;

  Eigen::VectorXd dq(n), dp(n);
  for (Index j = 0; j < n; ++j) {
    const double w = md.frequencies(j);
    ModeVariance v;
    if (squeezed[j]) {
      v = squeezed_variance(spec.defect_mode_frequency > 0.0 ? spec.defect_mode_frequency : w,
                            spec.squeezing);
    } else {
      double rw = 0.0;
      for (Index i = 0; i < n; ++i)
        if (layout.reservoir[i]) rw += md.vectors(i, j) * md.vectors(i, j);
      const bool thermal = rw >= 0.5 || !spec.transverse_ground;
      v = thermal_variance(w, thermal ? spec.bath_temperature : 0.0);
    }
    dq(j) = v.position;
    dp(j) = v.momentum;
  }
  return local_state(md, dq, dp);
}

CovarianceState prepare_initial_state(const CoupledModel& model0, const InitialStateSpec& spec) {
  if (model0.coupling_strength != 0.0)
    throw Error(ErrorKind::invalid_argument, "initial state needs the gamma = 0 model");
  const Index n = model0.axial.size();
  StateLayout layout;
  layout.defects = {n + model0.sites.right, n + model0.sites.left};
  layout.reservoir.assign(2 * n, false);
  for (Index i = 0; i < n; ++i) layout.reservoir[i] = true;
  return prepare_initial_state(model0.full, layout, spec);
}

Propagator make_propagator(const ModeDecomposition& md, double t) {
  const Index n = md.size();
  const Eigen::VectorXd sm = md.masses.cwiseSqrt();
  const Eigen::MatrixXd A = sm.cwiseInverse().asDiagonal() * md.vectors;
  const Eigen::MatrixXd B = sm.asDiagonal() * md.vectors;
  Eigen::VectorXd c(n), s_over(n), ws(n);
  for (Index j = 0; j < n; ++j) {
    const double w = md.frequencies(j);
    c(j) = std::cos(w * t);
    if (w > 0.0) {
      s_over(j) = std::sin(w * t) / w;
      ws(j) = w * std::sin(w * t);
    } else {
      s_over(j) = t;
      ws(j) = 0.0;
    }
  }
  const Eigen::MatrixXd Sqq = A * c.asDiagonal() * B.transpose();
  const Eigen::MatrixXd Sqp = A * s_over.asDiagonal() * A.transpose();
  const Eigen::MatrixXd Spq = -(B * ws.asDiagonal() * B.transpose());
  const Eigen::MatrixXd Spp = B * c.asDiagonal() * A.transpose();
  Propagator p;
  p.time = t;
  p.symplectic.resize(2 * n, 2 * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      p.symplectic(2 * i, 2 * j) = Sqq(i, j);
      p.symplectic(2 * i, 2 * j + 1) = Sqp(i, j);
      p.symplectic(2 * i + 1, 2 * j) = Spq(i, j);
      p.symplectic(2 * i + 1, 2 * j + 1) = Spp(i, j);
    }
  return p;
}

CovarianceState evolve(const CovarianceState& state, const Propagator& prop) {
  const Index d = state.covariance.rows();
  if (prop.symplectic.rows() != d || state.mean.size() != d)
    throw Error(ErrorKind::dimension_mismatch, "propagator and state dimensions differ");
  CovarianceState out;
  out.mean = prop.symplectic * state.mean;
  out.covariance = prop.symplectic * state.covariance * prop.symplectic.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

CovarianceState reduce_to_defects(const CovarianceState& state, Index a, Index b) {
  const Index n = state.modes();
  if (a < 0 || b < 0 || a >= n || b >= n || a == b)
    throw Error(ErrorKind::invalid_index, "reduction coordinates out of range");
  const Index idx[4] = {2 * a, 2 * a + 1, 2 * b, 2 * b + 1};
  CovarianceState out;
  out.mean.resize(4);
  out.covariance.resize(4, 4);
  for (int i = 0; i < 4; ++i) {
    out.mean(i) = state.mean(idx[i]);
    for (int j = 0; j < 4; ++j) out.covariance(i, j) = state.covariance(idx[i], idx[j]);
  }
  return out;
}

CovarianceState reduce_to_defects(const CovarianceState& state, const CoupledModel& model) {
  const Index n = model.axial.size();
  return reduce_to_defects(state, n + model.sites.right, n + model.sites.left);
}

double partial_transpose_min_eigenvalue(const Eigen::Matrix4d& s) {
  const Eigen::Vector4d flip(1.0, 1.0, 1.0, -1.0);
  return symplectic_eigenvalues(Eigen::MatrixXd(flip.asDiagonal() * s * flip.asDiagonal()))(0);
}

double log_negativity(const Eigen::Matrix4d& covariance) {
  check_physical(covariance);
  const double nu = partial_transpose_min_eigenvalue(covariance);
  if (!(nu > 0.0)) throw Error(ErrorKind::unphysical_covariance, "degenerate partial transpose");
  return std::max(0.0, -std::log(2.0 * nu));
}

double log_negativity(const CovarianceState& two_mode) {
  if (two_mode.covariance.rows() != 4 || two_mode.covariance.cols() != 4)
    throw Error(ErrorKind::dimension_mismatch, "log_negativity needs a two-mode state");
  return log_negativity(Eigen::Matrix4d(two_mode.covariance));
}

CovarianceState to_dimensionless(const CovarianceState& state, const Eigen::VectorXd& mw) {
  const Index n = state.modes();
  if (mw.size() != n) throw Error(ErrorKind::dimension_mismatch, "one scale per mode expected");
  Eigen::VectorXd s(2 * n);
  for (Index k = 0; k < n; ++k) {
    s(2 * k) = std::sqrt(mw(k));
    s(2 * k + 1) = 1.0 / std::sqrt(mw(k));
  }
  CovarianceState out;
  out.mean = s.cwiseProduct(state.mean);
  out.covariance = s.asDiagonal() * state.covariance * s.asDiagonal();
  return out;
}

std::complex<double> characteristic_function(const CovarianceState& st, std::complex<double> alpha,
                                             std::complex<double> beta) {
  if (st.covariance.rows() != 4 || st.mean.size() != 4)
    throw Error(ErrorKind::dimension_mismatch, "characteristic_function needs a two-mode state");
  const double r2 = std::sqrt(2.0);
  Eigen::Vector4d u(r2 * alpha.imag(), -r2 * alpha.real(), r2 * beta.imag(), -r2 * beta.real());
  const double quad = u.dot(st.covariance * u);
  const double phase = u.dot(st.mean);
  return std::exp(std::complex<double>(-0.5 * quad, phase));
}

}  // namespace ionbath
