#pragma once

namespace jfs {

inline constexpr double kDefaultStep = 1e-3;

/// Numerical thresholds shared by the checks. Relative thresholds are taken
/// against the largest singular value of Y over the whole grid.
struct Tolerances {
  double singular = 1e-8;       // sigma_min(Y) <= singular * sigma_max -> singular node
  double zero = 1e-7;           // kernel threshold for vanishing fields
  double eig = 1e-6;            // absolute slack on cot(alpha) in boundary gates
  double self_adjoint = 1e-8;   // |W| <= self_adjoint * (1 + |Y||Y'|)
  double span = 1e-6;           // RMS residual for parallel / sine-type fields
  double orth = 1e-6;           // pointwise orthogonality, relative
  double orth_abs = 1e-9;       // pointwise orthogonality, absolute floor
  double curvature = 1e-12;     // slack on curvature floors
  double rigidity = 1e-4;       // |S - cot id| and |R - id| in the rigidity check
  double comparison = 1e-6;     // one-sided comparison s >= f / s <= f
  // Difference-quotient checks only use nodes whose whole stencil has
  // |S| <= resolved_riccati; closer to a pole the truncation error of any
  // grid stencil exceeds the residual tolerances.
  double resolved_riccati = 10.0;
};

}  // namespace jfs
