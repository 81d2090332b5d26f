#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "jfs/curvature.hpp"
#include "jfs/rk4.hpp"
#include "jfs/symlin.hpp"
#include "jfs/tolerances.hpp"

namespace jfs {

/// An (n-1)-dimensional family of normal Jacobi fields, given by initial
/// values (columns of Y0) and derivatives (columns of Yd0) at alpha.
struct FamilySpec {
  CurvatureField field = constant_sectional(2, 0.0);
  double alpha = 0.0;
  double end = 0.0;
  Matrixd Y0;
  Matrixd Yd0;
  std::string label;

  /// Throws unless alpha < end, shapes match the field, and the stacked
  /// initial data has full column rank.
  void validate() const;
};

using JacobiStated = JacobiState<double>;

/// RK4 solution of the matrix Jacobi equation on a uniform grid.
class JacobiTrajectory {
 public:
  const FamilySpec& spec() const { return spec_; }
  const CurvatureField& field() const { return spec_.field; }
  double step() const { return step_; }
  Index size() const { return static_cast<Index>(times_.size()); }
  Index dim() const { return spec_.Y0.rows(); }
  double time(Index i) const { return times_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& times() const { return times_; }
  const Matrixd& Y(Index i) const { return Y_[static_cast<std::size_t>(i)]; }
  const Matrixd& Yd(Index i) const { return Yd_[static_cast<std::size_t>(i)]; }

  /// Node whose time equals t (to 1e-6 of a step); throws otherwise.
  Index node_index(double t) const;
  Index nearest_node(double t) const;

  /// (Y, Y') at an arbitrary time in the window, one RK4 sub-step from the
  /// node at or below t.
  JacobiStated state_at(double t) const;

  /// Largest singular value of Y over the grid.
  double sigma_max() const { return sigma_max_; }
  double sigma_min(Index i) const { return sigma_min_[static_cast<std::size_t>(i)]; }
  double det(Index i) const { return det_[static_cast<std::size_t>(i)]; }

  /// sigma_min(Y(t_i)) > tol * sigma_max().
  bool is_regular(Index i, double tol) const;

 private:
  friend JacobiTrajectory integrate(FamilySpec spec, double step);

  FamilySpec spec_;
  double step_ = 0.0;
  std::vector<double> times_;
  std::vector<Matrixd> Y_;
  std::vector<Matrixd> Yd_;
  std::vector<double> sigma_min_;
  std::vector<double> det_;
  double sigma_max_ = 0.0;
};

/// Classical RK4 on (Y, Y')' = (Y', -R(t) Y). The window is split into
/// ceil((end - alpha) / step) equal steps, so the effective step is <= step.
JacobiTrajectory integrate(FamilySpec spec, double step = kDefaultStep);

/// W = Y^T Y' - Y'^T Y at node i. Zero iff the Riccati operator is
/// self-adjoint on the family; conserved along the flow.
GeneralOperatord wronskian(const JacobiTrajectory& traj, Index i);

/// max_i max|W(t_i) - W(alpha)|.
double wronskian_drift(const JacobiTrajectory& traj);

/// S = Y' Y^{-1} at node i. Throws SingularTimeError when Y(t_i) is singular
/// relative to tol_sing.
GeneralOperatord riccati(const JacobiTrajectory& traj, Index i,
                         double tol_sing = Tolerances{}.singular);

/// S at an arbitrary time in the window (uses state_at).
GeneralOperatord riccati_at(const JacobiTrajectory& traj, double t,
                            double tol_sing = Tolerances{}.singular);

/// Riccati operator in the family basis together with the Gram metric of the
/// basis fields: S J_j = sum_i op(i, j) J_i and metric = Y^T Y.
struct FamilyBasisRiccati {
  GeneralOperatord op;
  SymOperatord metric;
};
FamilyBasisRiccati riccati_in_family_basis(const JacobiTrajectory& traj,
                                           Index i);

/// An instant where Y(t) loses rank, with the coefficient vectors of the
/// fields that vanish there (columns of `kernel`).
struct SingularInstant {
  double time = 0.0;
  double sigma = 0.0;  // sigma_min(Y(time))
  Matrixd kernel;
};

/// All instants in the window where sigma_min(Y) <= tol_rel * sigma_max.
/// Nodes are tested directly; between nodes, a sign change of det(Y) is
/// refined by bisection and a local minimum of sigma_min by golden-section
/// search on RK4 sub-steps. Kernel vectors are right singular vectors with
/// sigma <= tol_rel * sigma_max.
std::vector<SingularInstant> singular_instants(const JacobiTrajectory& traj,
                                               double tol_rel);

/// First singular instant at or after `from`.
std::optional<double> first_singular_time(
    const JacobiTrajectory& traj, double from,
    double tol_sing = Tolerances{}.singular);

struct FieldValue {
  Vectord value;
  Vectord derivative;
};

/// J(t_i) and J'(t_i) for J = sum_k coeffs(k) J_k.
FieldValue evaluate_field(const JacobiTrajectory& traj, const Vectord& coeffs,
                          Index i);

struct ResidualSummary {
  double max = 0.0;
  double worst_time = 0.0;
  Index nodes_checked = 0;
};

/// max |dS/dt + S^2 + R| (spectral norm) with a fourth-order central
/// difference for dS/dt, over interior nodes whose stencil is regular and
/// has |S| <= tol.resolved_riccati.
ResidualSummary riccati_residual(const JacobiTrajectory& traj,
                                 const Tolerances& tol = {});

/// CSV: a comment line with label and step, a header, then one row per node
/// with t, vec(Y), vec(Y') (column-major).
void write_trajectory_csv(std::ostream& os, const JacobiTrajectory& traj);

}  // namespace jfs
