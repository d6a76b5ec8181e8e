#include "ionbath/quadratic_model.hpp"

#include <cmath>

#include "ionbath/errors.hpp"

namespace ionbath {

Eigen::MatrixXd QuadraticModel::weighted_potential() const {
  const Eigen::VectorXd s = masses.cwiseSqrt().cwiseInverse();
  return s.asDiagonal() * potential * s.asDiagonal();
}

void QuadraticModel::validate() const {
  const Index n = masses.size();
  if (potential.rows() != n || potential.cols() != n)
    throw Error(ErrorKind::invalid_argument, "potential matrix does not match mass vector");
  if (!labels.empty() && static_cast<Index>(labels.size()) != n)
    throw Error(ErrorKind::invalid_argument, "label count does not match mass vector");
  for (Index i = 0; i < n; ++i)
    if (!(masses(i) > 0.0)) throw Error(ErrorKind::invalid_argument, "masses must be positive");
  const double scale = std::max(1.0, potential.cwiseAbs().maxCoeff());
  if ((potential - potential.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale)
    throw Error(ErrorKind::invalid_argument, "potential matrix is not symmetric");
}

const char* to_string(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    default: return "none";
  }
}

Eigen::MatrixXd reflection_matrix(const Reflection& reflection) {
  const Index n = static_cast<Index>(reflection.size());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) P(reflection[i], i) = 1.0;
  return P;
}

ParitySplit split_by_reflection(const QuadraticModel& model, const Reflection& reflection,
                                const std::vector<Index>& representatives, double tol) {
  model.validate();
  const Index n = model.size();
  if (static_cast<Index>(reflection.size()) != n)
    throw Error(ErrorKind::dimension_mismatch, "reflection size differs from model size");
  std::vector<int> seen(n, 0);
  for (Index i = 0; i < n; ++i) {
    const Index r = reflection[i];
    if (r < 0 || r >= n || reflection[r] != i)
      throw Error(ErrorKind::invalid_argument, "reflection is not an involution");
  }

  ParitySplit out;
  std::vector<Eigen::VectorXd> ev, od;
  std::vector<std::string> elab, olab;
  std::vector<double> emass, omass;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  auto label = [&](Index i) {
    return model.labels.empty() ? std::to_string(i) : model.labels[i];
  };
  for (Index r : representatives) {
    if (r < 0 || r >= n) throw Error(ErrorKind::invalid_index, "representative out of range");
    const Index s = reflection[r];
    if (seen[r] || seen[s]) throw Error(ErrorKind::invalid_argument, "orbit listed twice");
    seen[r] = seen[s] = 1;
    if (r == s) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
      v(r) = 1.0;
      ev.push_back(v);
      elab.push_back(label(r));
      emass.push_back(model.masses(r));
      out.even_source.push_back(r);
      continue;
    }
    const double mr = model.masses(r), ms = model.masses(s);
    if (std::abs(mr - ms) > 1e-12 * std::max(mr, ms))
      throw Error(ErrorKind::asymmetric_configuration,
                  "masses of mirror coordinates " + label(r) + " and " + label(s) + " differ");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v(r) = inv_sqrt2;
    v(s) = inv_sqrt2;
    ev.push_back(v);
    v(s) = -inv_sqrt2;
    od.push_back(v);
    elab.push_back(label(r) + "+");
    olab.push_back(label(r) + "-");
    emass.push_back(mr);
    omass.push_back(mr);
    out.even_source.push_back(r);
    out.odd_source.push_back(r);
  }
  for (Index i = 0; i < n; ++i)
    if (!seen[i]) throw Error(ErrorKind::invalid_argument, "representatives do not cover all orbits");

  auto assemble = [n](const std::vector<Eigen::VectorXd>& cols) {
    Eigen::MatrixXd B(n, static_cast<Index>(cols.size()));
    for (Index j = 0; j < B.cols(); ++j) B.col(j) = cols[j];
    return B;
  };
  out.even_basis = assemble(ev);
  out.odd_basis = assemble(od);

  const Eigen::MatrixXd& V = model.potential;
  out.even.potential = out.even_basis.transpose() * V * out.even_basis;
  out.odd.potential = out.odd_basis.transpose() * V * out.odd_basis;
  out.even.potential = 0.5 * (out.even.potential + out.even.potential.transpose()).eval();
  out.odd.potential = 0.5 * (out.odd.potential + out.odd.potential.transpose()).eval();
  out.even.masses = Eigen::Map<Eigen::VectorXd>(emass.data(), static_cast<Index>(emass.size()));
  out.odd.masses = Eigen::Map<Eigen::VectorXd>(omass.data(), static_cast<Index>(omass.size()));
  out.even.labels = elab;
  out.odd.labels = olab;

  if (out.odd_basis.cols() > 0 && out.even_basis.cols() > 0)
    out.leakage = (out.even_basis.transpose() * V * out.odd_basis).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, V.cwiseAbs().maxCoeff());
  if (out.leakage > tol * scale)
    throw Error(ErrorKind::asymmetric_configuration,
                "even-odd cross block " + std::to_string(out.leakage) + " exceeds tolerance");
  return out;
}

}  // namespace ionbath
