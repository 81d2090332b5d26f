#pragma once

#include "jfs/symlin.hpp"

namespace jfs {

/// (Y, Y') for a family of Jacobi fields, columns are fields.
template <typename Scalar>
struct JacobiState {
  Matrix<Scalar> Y;
  Matrix<Scalar> Yd;
};

/// One classical RK4 step of (Y, Y')' = (Y', -R(t) Y). `curvature(t)` must
/// return the matrix of R(t) in the parallel frame.
template <typename Scalar, typename CurvatureFn>
JacobiState<Scalar> rk4_step(const CurvatureFn& curvature, Scalar t, Scalar h,
                             const JacobiState<Scalar>& s) {
  const Matrix<Scalar> r0 = curvature(t);
  const Matrix<Scalar> rm = curvature(t + h / Scalar(2));
  const Matrix<Scalar> r1 = curvature(t + h);

  const Matrix<Scalar> k1y = s.Yd;
  const Matrix<Scalar> k1d = -r0 * s.Y;
  const Matrix<Scalar> k2y = s.Yd + (h / Scalar(2)) * k1d;
  const Matrix<Scalar> k2d = -rm * (s.Y + (h / Scalar(2)) * k1y);
  const Matrix<Scalar> k3y = s.Yd + (h / Scalar(2)) * k2d;
  const Matrix<Scalar> k3d = -rm * (s.Y + (h / Scalar(2)) * k2y);
  const Matrix<Scalar> k4y = s.Yd + h * k3d;
  const Matrix<Scalar> k4d = -r1 * (s.Y + h * k3y);

  JacobiState<Scalar> next;
  next.Y = s.Y + (h / Scalar(6)) * (k1y + Scalar(2) * k2y + Scalar(2) * k3y + k4y);
  next.Yd = s.Yd + (h / Scalar(6)) * (k1d + Scalar(2) * k2d + Scalar(2) * k3d + k4d);
  return next;
}

}  // namespace jfs
