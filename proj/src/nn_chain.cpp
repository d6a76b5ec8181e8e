#include "ionbath/nn_chain.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "ionbath/errors.hpp"

namespace ionbath {

void NNSpec::validate() const {
  if (n_bulk < 1) throw Error(ErrorKind::invalid_argument, "n_bulk must be >= 1");
  if (!(bulk_mass > 0.0) || !(defect_mass > 0.0))
    throw Error(ErrorKind::invalid_argument, "masses must be positive");
  if (bulk_frequency < 0.0 || spring < 0.0 || defect_frequency < 0.0 || coupling < 0.0)
    throw Error(ErrorKind::invalid_argument, "frequencies, spring and coupling must be >= 0");
  if (attach_index < 0 || attach_index > max_attach())
    throw Error(ErrorKind::invalid_index, "attach_index " + std::to_string(attach_index) +
                                              " outside [0, " + std::to_string(max_attach()) + "]");
}

double NNSpec::shifted_defect_frequency() const {
  return std::sqrt(defect_frequency * defect_frequency + coupling / defect_mass);
}

std::pair<Index, Index> nn_attach_sites(const NNSpec& spec) {
  spec.validate();
  const int c = spec.n_bulk / 2;
  const int n = spec.attach_index;
  if (spec.n_bulk % 2 == 1) return {c - n, c + n};
  return {c - 1 - n, c + n};
}

QuadraticModel build_nn_model(const NNSpec& spec) {
  spec.validate();
  const int N = spec.n_bulk;
  const Index dim = N + 2;
  QuadraticModel m;
  m.masses = Eigen::VectorXd::Constant(dim, spec.bulk_mass);
  m.masses(0) = m.masses(1) = spec.defect_mass;
  m.potential = Eigen::MatrixXd::Zero(dim, dim);
  auto& V = m.potential;
  const double M = spec.defect_mass;
  V(0, 0) = V(1, 1) = M * spec.defect_frequency * spec.defect_frequency;
  const double onsite = spec.bulk_mass * spec.bulk_frequency * spec.bulk_frequency;
  for (int j = 0; j < N; ++j) V(2 + j, 2 + j) = onsite;
  for (int j = 0; j + 1 < N; ++j) {
    V(2 + j, 2 + j) += spec.spring;
    V(3 + j, 3 + j) += spec.spring;
    V(2 + j, 3 + j) -= spec.spring;
    V(3 + j, 2 + j) -= spec.spring;
  }
  const auto [left, right] = nn_attach_sites(spec);
  const double g = spec.coupling;
  const Index site_of[2] = {2 + right, 2 + left};  // X1 -> +n, X2 -> -n
  for (int k = 0; k < 2; ++k) {
    const Index s = site_of[k];
    V(k, k) += g;
    V(s, s) += g;
    V(k, s) -= g;
    V(s, k) -= g;
  }
  m.labels = {"X1", "X2"};
  for (int j = 0; j < N; ++j) m.labels.push_back("x[" + std::to_string(j) + "]");
  return m;
}

Reflection nn_reflection(int n_bulk) {
  Reflection r(n_bulk + 2);
  r[0] = 1;
  r[1] = 0;
  for (int j = 0; j < n_bulk; ++j) r[2 + j] = 2 + (n_bulk - 1 - j);
  return r;
}

std::pair<ParityModel, ParityModel> parity_decompose_nn(const NNSpec& spec) {
  const QuadraticModel full = build_nn_model(spec);
  const int N = spec.n_bulk;
  std::vector<Index> reps = {0};
  for (int j = N / 2; j < N; ++j) reps.push_back(2 + j);
  const ParitySplit split = split_by_reflection(full, nn_reflection(N), reps);

  auto make = [&](Parity p) {
    ParityModel pm;
    pm.parity = p;
    pm.model = p == Parity::even ? split.even : split.odd;
    pm.basis = p == Parity::even ? split.even_basis : split.odd_basis;
    pm.shifted_defect_frequency = spec.shifted_defect_frequency();
    pm.attach_index = spec.attach_index;
    const auto& src = p == Parity::even ? split.even_source : split.odd_source;
    const char sign = p == Parity::even ? '+' : '-';
    pm.model.labels.clear();
    for (Index s : src) {
      if (s == 0) {
        pm.folded.push_back(-1);
        pm.model.labels.push_back(std::string("X") + sign);
        continue;
      }
      const int site = static_cast<int>(s) - 2;
      const int f = site - N / 2;
      pm.folded.push_back(f);
      pm.model.labels.push_back("x[" + std::to_string(f) + sign + "]");
    }
    return pm;
  };
  return {make(Parity::even), make(Parity::odd)};
}

namespace {

struct BlockIndices {
  std::vector<Index> interposed;
  Index attach = -1;
};

BlockIndices block_indices(const ParityModel& pm) {
  BlockIndices b;
  for (Index i = 1; i < static_cast<Index>(pm.folded.size()); ++i) {
    if (pm.folded[i] < pm.attach_index) b.interposed.push_back(i);
    if (pm.folded[i] == pm.attach_index) b.attach = i;
  }
  return b;
}

Eigen::MatrixXd sub_block(const Eigen::MatrixXd& W, const std::vector<Index>& idx) {
  const Index k = static_cast<Index>(idx.size());
  Eigen::MatrixXd B(k, k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) B(a, b) = W(idx[a], idx[b]);
  return B;
}

}  // namespace

std::vector<double> nn_resonances(const ParityModel& pm) {
  const BlockIndices b = block_indices(pm);
  std::vector<double> out;
  if (b.interposed.empty()) return out;
  const Eigen::MatrixXd B = sub_block(pm.model.weighted_potential(), b.interposed);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  for (Index i = 0; i < es.eigenvalues().size(); ++i)
    out.push_back(std::sqrt(std::max(es.eigenvalues()(i), 0.0)));
  return out;
}

LocalizedMode localized_mode_nn(const ParityModel& pm, int ell) {
  const Eigen::MatrixXd W = pm.model.weighted_potential();
  const Index dim = W.rows();
  LocalizedMode out;
  // Defect coupled to nothing: it is itself the eigenmode.
  if (W.row(0).tail(dim - 1).cwiseAbs().maxCoeff() == 0.0) {
    out.vector = Eigen::VectorXd::Zero(dim);
    out.vector(0) = 1.0 / std::sqrt(pm.model.masses(0));
    out.resonance_frequency = std::sqrt(W(0, 0));
    out.exact_decoupling = true;
    return out;
  }
  const BlockIndices b = block_indices(pm);
  if (b.interposed.empty())
    throw Error(ErrorKind::no_localized_mode,
                std::string(to_string(pm.parity)) + " block has no interposed sites");
  if (ell < 1 || ell > static_cast<int>(b.interposed.size()))
    throw Error(ErrorKind::invalid_index, "localized mode index out of range");

  const Eigen::MatrixXd B = sub_block(W, b.interposed);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  const Eigen::VectorXd u = es.eigenvectors().col(ell - 1);
  double force = 0.0;  // attach-site force from the interposed component
  for (Index a = 0; a < u.size(); ++a) force += W(b.attach, b.interposed[a]) * u(a);
  const double wx = W(b.attach, 0);

  Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);  // mass-weighted
  for (Index a = 0; a < u.size(); ++a) y(b.interposed[a]) = u(a);
  y(0) = -force / wx;
  y.normalize();
  out.vector = y.cwiseQuotient(pm.model.masses.cwiseSqrt());
  out.resonance_frequency = std::sqrt(std::max(es.eigenvalues()(ell - 1), 0.0));
  return out;
}

double eigen_residual(const QuadraticModel& model, const Eigen::VectorXd& v, double frequency) {
  const Eigen::VectorXd r =
      model.potential * v - frequency * frequency * model.masses.cwiseProduct(v);
  return r.cwiseAbs().maxCoeff();
}

}  // namespace ionbath
