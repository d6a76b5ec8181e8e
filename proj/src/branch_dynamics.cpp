#include "ionbath/branch_dynamics.hpp"

#include <cmath>

#include "ionbath/errors.hpp"

namespace ionbath {

namespace {
constexpr Index kChunk = 256;
}

BranchPropagation::BranchPropagation(const BranchSetup& setup, Eigen::VectorXd times,
                                     std::size_t cache_bytes)
    : times_(std::move(times)), reservoir_(setup.reservoir), defect_(setup.defect) {
  const Index k = setup.pre.size();
  if (setup.post.size() != k || static_cast<Index>(setup.reservoir.size()) != k)
    throw Error(ErrorKind::dimension_mismatch, "branch models differ in size");
  if (defect_ < 0 || defect_ >= k) throw Error(ErrorKind::invalid_index, "defect out of range");
  if ((setup.pre.masses - setup.post.masses).cwiseAbs().maxCoeff() != 0.0)
    throw Error(ErrorKind::invalid_argument, "the quench must not change the masses");
  pre_ = normal_modes(setup.pre);
  post_ = normal_modes(setup.post);
  for (Index j = 0; j < k; ++j)
    if (!(post_.frequencies(j) > 0.0))
      throw Error(ErrorKind::unstable_model, "post-quench model has a zero mode");
  coupling_ = post_.vectors.transpose() * pre_.vectors;
  mass_ = setup.pre.masses(defect_);
  g_ = post_.vectors.row(defect_).transpose() / std::sqrt(mass_);
  h_ = post_.vectors.row(defect_).transpose() * std::sqrt(mass_);
  pre_.vectors.row(defect_).cwiseAbs().maxCoeff(&loc_pre_);
  post_.vectors.row(defect_).cwiseAbs().maxCoeff(&loc_post_);

  const std::size_t need = 4 * sizeof(double) * static_cast<std::size_t>(k) *
                           static_cast<std::size_t>(times_.size());
  if (need <= cache_bytes) {
    projections(0, times_.size(), ux_, up_, vx_, vp_);
    cached_ = true;
  }
}

void BranchPropagation::projections(Index begin, Index count, Eigen::MatrixXd& ux,
                                    Eigen::MatrixXd& up, Eigen::MatrixXd& vx,
                                    Eigen::MatrixXd& vp) const {
  const Index k = post_.size();
  Eigen::MatrixXd ax(k, count), ap(k, count), bx(k, count), bp(k, count);
  for (Index c = 0; c < count; ++c) {
    const double t = times_(begin + c);
    for (Index j = 0; j < k; ++j) {
      const double w = post_.frequencies(j);
      const double cs = std::cos(w * t), sn = std::sin(w * t);
      ax(j, c) = g_(j) * cs;
      ap(j, c) = g_(j) * sn / w;
      bx(j, c) = -h_(j) * w * sn;
      bp(j, c) = h_(j) * cs;
    }
  }
  const Eigen::MatrixXd Ct = coupling_.transpose();
  ux.noalias() = Ct * ax;
  up.noalias() = Ct * ap;
  vx.noalias() = Ct * bx;
  vp.noalias() = Ct * bp;
}

void BranchPropagation::initial_variances(const InitialStateSpec& spec, Eigen::VectorXd& dq,
                                          Eigen::VectorXd& dp) const {
  spec.validate();
  const Index k = pre_.size();
  dq.resize(k);
  dp.resize(k);
  for (Index j = 0; j < k; ++j) {
    const double w = pre_.frequencies(j);
    ModeVariance v;
    if (j == loc_pre_) {
      v = squeezed_variance(spec.defect_mode_frequency > 0.0 ? spec.defect_mode_frequency : w,
                            spec.squeezing);
    } else {
      double rw = 0.0;
      for (Index i = 0; i < k; ++i)
        if (reservoir_[i]) rw += pre_.vectors(i, j) * pre_.vectors(i, j);
      const bool thermal = rw >= 0.5 || !spec.transverse_ground;
      v = thermal_variance(w, thermal ? spec.bath_temperature : 0.0);
    }
    dq(j) = v.position;
    dp(j) = v.momentum;
  }
}

std::vector<Eigen::Matrix2d> BranchPropagation::defect_blocks(const Eigen::VectorXd& dq,
                                                              const Eigen::VectorXd& dp) const {
  const Index nt = times_.size();
  std::vector<Eigen::Matrix2d> out(nt);
  auto reduce = [&](Index begin, const Eigen::MatrixXd& ux, const Eigen::MatrixXd& up,
                    const Eigen::MatrixXd& vx, const Eigen::MatrixXd& vp) {
    const Eigen::VectorXd xx =
        ux.cwiseAbs2().transpose() * dq + up.cwiseAbs2().transpose() * dp;
    const Eigen::VectorXd pp =
        vx.cwiseAbs2().transpose() * dq + vp.cwiseAbs2().transpose() * dp;
    const Eigen::VectorXd xp =
        ux.cwiseProduct(vx).transpose() * dq + up.cwiseProduct(vp).transpose() * dp;
    for (Index c = 0; c < ux.cols(); ++c) {
      Eigen::Matrix2d m;
      m << xx(c), xp(c), xp(c), pp(c);
      out[begin + c] = m;
    }
  };
  if (cached_) {
    reduce(0, ux_, up_, vx_, vp_);
    return out;
  }
  Eigen::MatrixXd ux, up, vx, vp;
  for (Index b = 0; b < nt; b += kChunk) {
    const Index cnt = std::min(kChunk, nt - b);
    projections(b, cnt, ux, up, vx, vp);
    reduce(b, ux, up, vx, vp);
  }
  return out;
}

Eigen::Matrix4d combine_parity_blocks(const Eigen::Matrix2d& even, const Eigen::Matrix2d& odd) {
  const Eigen::Matrix2d A = 0.5 * (even + odd);
  const Eigen::Matrix2d C = 0.5 * (even - odd);
  Eigen::Matrix4d s;
  s << A, C, C, A;
  return s;
}

}  // namespace ionbath
