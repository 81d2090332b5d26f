#pragma once

#include <ostream>
#include <vector>

#include "jfs/jacobi.hpp"

namespace jfs {

/// Reduction of a family along a subfamily Psi: V(t) = {J(t) : J in Psi},
/// H(t) its orthogonal complement, the reduced Riccati operator
/// Shat y = (d/dt J^h)^h for J(t) = y in H, and A u = (J')^h for J in Psi
/// with J(t) = u in V.
///
/// Keeps a pointer to the trajectory, which must outlive the result.
class ReducedSystem {
 public:
  const JacobiTrajectory& trajectory() const { return *traj_; }
  const Matrixd& psi() const { return psi_; }
  Index dim_v() const { return psi_.cols(); }
  Index dim_h() const { return traj_->dim() - psi_.cols(); }

  /// V(t) has dimension dim Psi, Y(t) is invertible and the difference
  /// stencil around the node stays inside such nodes.
  bool is_regular(Index i) const { return regular_[static_cast<std::size_t>(i)] != 0; }
  const std::vector<char>& node_mask() const { return regular_; }
  Index regular_count() const;

  // Per-node data; only meaningful at regular nodes.
  const Matrixd& PV(Index i) const { return pv_[static_cast<std::size_t>(i)]; }
  const Matrixd& PH(Index i) const { return ph_[static_cast<std::size_t>(i)]; }
  /// Orthonormal basis of H(t), m x dim_h.
  const Matrixd& H(Index i) const { return h_[static_cast<std::size_t>(i)]; }
  /// Shat as an operator on the whole normal space, zero on V.
  const Matrixd& Shat(Index i) const { return shat_[static_cast<std::size_t>(i)]; }
  /// A as an operator on the whole normal space: V -> H, zero on H.
  const Matrixd& A(Index i) const { return a_[static_cast<std::size_t>(i)]; }

  /// Shat in the basis H(i).
  Matrixd shat_on_h(Index i) const;
  /// PH R PH + 3 A A^* in the basis H(i).
  Matrixd rhat_on_h(Index i) const;

 private:
  friend ReducedSystem reduce(const JacobiTrajectory& traj, const Matrixd& psi,
                              const Tolerances& tol);

  const JacobiTrajectory* traj_ = nullptr;
  Matrixd psi_;
  std::vector<char> regular_;
  std::vector<Matrixd> pv_, ph_, h_, shat_, a_;
};

/// Throws if the columns of psi are linearly dependent or have the wrong
/// length. psi may have zero columns.
ReducedSystem reduce(const JacobiTrajectory& traj, const Matrixd& psi,
                     const Tolerances& tol = {});

struct HceSummary {
  double max = 0.0;
  double worst_time = 0.0;
  Index nodes_checked = 0;
  std::vector<double> per_node;  // NaN where not evaluated
};

/// max |PH (dShat/dt) PH + Shat^2 + PH R PH + 3 A A^*| over nodes whose
/// stencil is regular and has |S|, |Shat| <= tol.resolved_riccati.
/// Throws if no node qualifies.
HceSummary hce_residual(const ReducedSystem& rs, const Tolerances& tol = {});

struct ReducedBoundaryReport {
  double alpha = 0.0;
  double max_eig_shat = 0.0;
  double max_eig_s = 0.0;
  bool pass = true;  // max eig Shat <= max eig S + tol.eig
};

/// Throws if alpha is not a regular node of rs.
ReducedBoundaryReport reduced_boundary_check(const ReducedSystem& rs, double alpha,
                                             const Tolerances& tol = {});

/// CSV: t, regular flag, eigenvalues of Shat, |A|, HCE residual.
void write_reduced_csv(std::ostream& os, const ReducedSystem& rs, const HceSummary& hce);

}  // namespace jfs
