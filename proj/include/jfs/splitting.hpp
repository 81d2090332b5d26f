#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jfs/jacobi.hpp"

namespace jfs {

enum class Theorem { A, B, C, E };
enum class Verdict { Verified, HypothesisViolated, Falsified };

std::string to_string(Theorem theorem);
std::string to_string(Verdict verdict);
Theorem theorem_from_string(const std::string& name);
Verdict verdict_from_string(const std::string& name);

/// A vanishing instant and the coefficient vectors of the fields that vanish.
struct ZeroTime {
  double time = 0.0;
  Matrixd fields;
};

struct VanishingSpan {
  Matrixd basis;  // orthonormal columns in coefficient space
  std::vector<ZeroTime> zeros;
  double begin = 0.0;
  double end = 0.0;
  bool open_ends = false;
};

/// Span of ker Y(t) over singular instants t in [a, b]. With open_ends,
/// instants within 1e-9 of a or b are ignored.
VanishingSpan vanishing_span(const JacobiTrajectory& traj, double a, double b,
                             bool open_ends, double tol_zero = Tolerances{}.zero);

struct SpanResult {
  Matrixd basis;          // orthonormal columns in coefficient space
  double residual = 0.0;  // max_t |M(t) basis| / scale
  double scale = 0.0;
};

/// Fields with J' == 0: near-null space of sum_t Y'(t)^T Y'(t) h, pruned until
/// max_t |Y'(t) c| <= tol * scale for every kept direction.
SpanResult parallel_span(const JacobiTrajectory& traj, double tol = Tolerances{}.span);

/// Fields J = sin(t) E with E parallel, i.e. sin(t) J' - cos(t) J == 0.
SpanResult sine_span(const JacobiTrajectory& traj, double tol = Tolerances{}.span);

struct Gate {
  bool evaluated = true;
  bool pass = true;
  double value = 0.0;
  std::string note;
};

struct SplittingParams {
  std::optional<int> k;
  std::optional<double> alpha;
};

struct SplittingReport {
  Theorem theorem = Theorem::A;
  SplittingParams params;
  double window_begin = 0.0;  // interval searched for vanishing fields
  double window_end = 0.0;
  bool window_open = false;
  Index dim_Z = 0;
  Index dim_P = 0;
  Matrixd Z_basis;
  Matrixd P_basis;
  std::vector<ZeroTime> zero_times;
  double residual_orth = 0.0;
  double residual_span = 0.0;
  double independence = 0.0;  // sigma_min of [Z P]
  std::optional<Gate> self_adjoint;
  std::optional<Gate> curvature;
  std::optional<Gate> boundary;
  std::optional<Gate> dim_condition;
  std::optional<Gate> window;
  Verdict verdict = Verdict::Verified;

  bool hypotheses_hold() const;
};

/// max |W(alpha)| against tol.self_adjoint * (1 + |Y0| |Y0'|).
Gate self_adjoint_gate(const JacobiTrajectory& traj, const Tolerances& tol = {});

/// max eig S(alpha) <= cot(alpha) + tol.eig, with alpha = 0 always passing.
/// A singular Y(alpha) restricts S to the image of Y(alpha).
Gate boundary_gate(const JacobiTrajectory& traj, double alpha,
                   const Tolerances& tol = {});

/// min over nodes of the Ric_k floor, compared against `bound`.
Gate curvature_gate(const JacobiTrajectory& traj, int k, double bound,
                    const Tolerances& tol = {});

/// Runs the hypothesis gates of the chosen splitting theorem, computes the
/// vanishing and parallel (A, C) or sine-type (B, E) spans and checks that
/// they give an orthogonal decomposition of the family.
SplittingReport check_splitting(const JacobiTrajectory& traj, Theorem theorem,
                                const SplittingParams& params,
                                const Tolerances& tol = {});

}  // namespace jfs
