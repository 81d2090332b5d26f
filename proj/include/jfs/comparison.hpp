#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "jfs/jacobi.hpp"
#include "jfs/splitting.hpp"

namespace jfs {

/// Trace reduction of the Riccati operator at the regular nodes of a
/// trajectory: s = tr S / (n-1), r = (tr R + |S - s id|^2) / (n-1).
struct ScalarTrace {
  int n = 0;
  double step = 0.0;
  std::vector<Index> nodes;  // trajectory node indices, increasing
  std::vector<double> t;
  std::vector<double> s;
  std::vector<double> r;
  std::vector<double> op_norm;  // |S| at the node
  // Run id: consecutive nodes share it unless a singular instant lies
  // between them (Y can lose rank strictly between grid nodes).
  std::vector<int> segment;

  std::size_t size() const { return nodes.size(); }
  /// Position of trajectory node i in the trace, if it is regular.
  std::optional<std::size_t> find(Index node) const;
};

/// Throws if no node is regular.
ScalarTrace scalar_traces(const JacobiTrajectory& traj, const Tolerances& tol = {});

/// max |s' + s^2 + r| with a fourth-order central difference, over runs of
/// consecutive regular nodes with |S| <= tol.resolved_riccati.
ResidualSummary scalar_trace_residual(const ScalarTrace& trace, const Tolerances& tol = {});

/// f(t) = cot(t - delta), the solution of f' + f^2 + 1 = 0 with f(t0) = s0.
struct ModelSolution {
  enum class Side { None, Left, Right };

  double t0 = 0.0;
  double s0 = 0.0;
  double delta = 0.0;  // t0 - arccot(s0), arccot in (0, pi)
  std::optional<double> asymptote;  // the pole of f inside (0, pi)
  Side side = Side::None;

  double operator()(double t) const;
  double derivative(double t) const;
};

std::string to_string(ModelSolution::Side side);

/// Requires t0 in (0, pi).
ModelSolution model_solution(double t0, double s0);

struct ComparisonReport {
  double t0 = 0.0;
  ModelSolution model;
  bool hypothesis_ok = true;  // r >= 1 on the regular window
  double r_min = 0.0;
  std::string note;
  double window_begin = 0.0;
  double window_end = 0.0;
  bool left_ok = true;   // s >= f - tol before t0
  bool right_ok = true;  // s <= f + tol after t0
  double max_violation = 0.0;  // max of (f - s) on the left and (s - f) on the right
  double worst_time = 0.0;
  Index nodes_left = 0;
  Index nodes_right = 0;

  Verdict verdict() const;
};

/// One-sided comparison of s against the model anchored at (t0, s(t0)) on the
/// segment containing t0. t0 must be a regular node.
ComparisonReport comparison_check(const ScalarTrace& trace, double t0,
                                  const Tolerances& tol = {});

struct RigidityReport {
  double alpha = 0.0;
  Verdict verdict = Verdict::Verified;
  std::string reason;  // first failing gate
  Gate self_adjoint;
  Gate curvature;   // min over nodes of tr R - (n-1)
  Gate window;      // trajectory reaches pi
  Gate regularity;  // no singular instant in (alpha, pi)
  Gate boundary;
  double max_s_deviation = 0.0;  // max |S(t) - cot(t) id|
  double max_r_deviation = 0.0;  // max |R(t) - id|
  double worst_time = 0.0;
  Index nodes_checked = 0;
};

/// Gates: self-adjointness, tr R >= n-1, window reaching pi, no vanishing
/// instant in (alpha, pi), max eig S(alpha) <= cot(alpha). If all hold,
/// asserts S = cot(t) id and R = id at every regular node in (alpha, pi).
RigidityReport rigidity_check(const JacobiTrajectory& traj, double alpha,
                              const Tolerances& tol = {});

/// CSV: t, s, r and, when given, the model f anchored at the report's t0.
void write_scalar_trace_csv(std::ostream& os, const ScalarTrace& trace,
                            const std::optional<ModelSolution>& model = std::nullopt);

}  // namespace jfs
