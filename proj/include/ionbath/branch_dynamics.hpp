#pragma once

#include <vector>

#include "ionbath/gaussian.hpp"
#include "ionbath/modes.hpp"

namespace ionbath {

// One parity block before and after the quench, with a single defect coordinate.
struct BranchSetup {
  QuadraticModel pre;           // coupling off
  QuadraticModel post;          // coupling on
  Index defect = 0;             // defect coordinate (same index in both)
  std::vector<bool> reservoir;  // coordinates whose modes are thermal
};

// Exact evolution of the defect (X, P) covariance of one parity block. The initial state is
// diagonal in the pre-quench modes, so <X(t)^2> = sum_k Dq_k u_k(t)^2 + Dp_k v_k(t)^2 with u, v
// the pre-quench mode projections of the post-quench propagator row.
class BranchPropagation {
 public:
  BranchPropagation(const BranchSetup& setup, Eigen::VectorXd times,
                    std::size_t cache_bytes = std::size_t(256) << 20);

  // Variances of the pre-quench modes for the given initial state.
  void initial_variances(const InitialStateSpec& spec, Eigen::VectorXd& dq,
                         Eigen::VectorXd& dp) const;

  // Covariance [[<XX>, <XP>], [<XP>, <PP>]] at every time.
  std::vector<Eigen::Matrix2d> defect_blocks(const Eigen::VectorXd& dq,
                                             const Eigen::VectorXd& dp) const;

  const Eigen::VectorXd& times() const { return times_; }
  double defect_mass() const { return mass_; }
  Index localized_mode() const { return loc_pre_; }
  double pre_frequency() const { return pre_.frequencies(loc_pre_); }
  double post_frequency() const { return post_.frequencies(loc_post_); }
  const ModeDecomposition& pre_modes() const { return pre_; }
  const ModeDecomposition& post_modes() const { return post_; }

 private:
  void projections(Index begin, Index count, Eigen::MatrixXd& ux, Eigen::MatrixXd& up,
                   Eigen::MatrixXd& vx, Eigen::MatrixXd& vp) const;

  Eigen::VectorXd times_;
  ModeDecomposition pre_, post_;
  std::vector<bool> reservoir_;
  Eigen::MatrixXd coupling_;  // C = O_post^T O_pre
  Eigen::VectorXd g_, h_;     // post-mode rows of X and P
  double mass_ = 1.0;
  Index defect_ = 0;
  Index loc_pre_ = 0, loc_post_ = 0;
  bool cached_ = false;
  Eigen::MatrixXd ux_, up_, vx_, vp_;
};

// Local 4x4 covariance of (x_+n, p_+n, x_-n, p_-n) from the even and odd defect blocks.
Eigen::Matrix4d combine_parity_blocks(const Eigen::Matrix2d& even, const Eigen::Matrix2d& odd);

}  // namespace ionbath
