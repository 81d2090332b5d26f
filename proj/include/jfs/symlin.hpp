#pragma once

// Small dense self-adjoint operators: spectra, symmetry defect, Ky Fan sums
// and orthogonal projectors. Dimensions here are tiny (the normal space of a
// geodesic), so everything is exact-shape dense Eigen.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Jacobi>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "jfs/error.hpp"

namespace jfs {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrixd = Matrix<double>;
using Vectord = Vector<double>;

/// Self-adjoint operator on R^dim. Input is symmetrized on construction; the
/// defect of the input is kept for diagnostics.
template <typename Scalar>
class SymOperator {
 public:
  SymOperator() = default;

  explicit SymOperator(const Eigen::Ref<const Matrix<Scalar>>& a) {
    if (a.rows() != a.cols()) {
      throw Error("SymOperator: matrix is " + std::to_string(a.rows()) + "x" +
                  std::to_string(a.cols()) + ", expected square");
    }
    m_ = (a + a.transpose()) / Scalar(2);
    input_defect_ = a.rows() == 0 ? Scalar(0)
                                  : (a - a.transpose()).cwiseAbs().maxCoeff();
  }

  static SymOperator Identity(Index dim) {
    return SymOperator(Matrix<Scalar>::Identity(dim, dim));
  }
  static SymOperator Zero(Index dim) {
    return SymOperator(Matrix<Scalar>::Zero(dim, dim));
  }
  static SymOperator Diagonal(const Eigen::Ref<const Vector<Scalar>>& d) {
    return SymOperator(Matrix<Scalar>(d.asDiagonal()));
  }

  Index dim() const { return m_.rows(); }
  const Matrix<Scalar>& matrix() const { return m_; }
  Scalar input_defect() const { return input_defect_; }
  Scalar trace() const { return m_.trace(); }

  Scalar operator()(Index i, Index j) const { return m_(i, j); }

 private:
  Matrix<Scalar> m_;
  Scalar input_defect_{0};
};

/// Square operator with no symmetry assumed.
template <typename Scalar>
class GeneralOperator {
 public:
  GeneralOperator() = default;
  explicit GeneralOperator(Matrix<Scalar> a) : m_(std::move(a)) {
    if (m_.rows() != m_.cols()) {
      throw Error("GeneralOperator: matrix must be square");
    }
  }

  Index dim() const { return m_.rows(); }
  const Matrix<Scalar>& matrix() const { return m_; }
  SymOperator<Scalar> symmetric_part() const { return SymOperator<Scalar>(m_); }

 private:
  Matrix<Scalar> m_;
};

using SymOperatord = SymOperator<double>;
using GeneralOperatord = GeneralOperator<double>;

template <typename Scalar>
struct Spectrum {
  Vector<Scalar> values;   // ascending
  Matrix<Scalar> vectors;  // orthonormal columns, vectors.col(i) <-> values(i)
};

/// Cyclic Jacobi eigensolver.
template <typename Scalar>
Spectrum<Scalar> spectrum(const SymOperator<Scalar>& op) {
  using std::abs;
  using std::sqrt;
  constexpr int kMaxSweeps = 64;
  const Index n = op.dim();
  Matrix<Scalar> a = op.matrix();
  Matrix<Scalar> v = Matrix<Scalar>::Identity(n, n);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar scale = a.norm();

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    Scalar off(0);
    for (Index q = 1; q < n; ++q)
      for (Index p = 0; p < q; ++p) off += a(p, q) * a(p, q);
    if (sqrt(off) <= eps * scale) break;

    for (Index q = 1; q < n; ++q) {
      for (Index p = 0; p < q; ++p) {
        if (abs(a(p, q)) <= std::numeric_limits<Scalar>::min()) continue;
        Eigen::JacobiRotation<Scalar> rot;
        rot.makeJacobi(a, p, q);
        a.applyOnTheLeft(p, q, rot.adjoint());
        a.applyOnTheRight(p, q, rot);
        v.applyOnTheRight(p, q, rot);
        a(p, q) = Scalar(0);
        a(q, p) = Scalar(0);
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i) < a(j, j); });

  Spectrum<Scalar> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    out.values(i) = a(order[i], order[i]);
    out.vectors.col(i) = v.col(order[i]);
  }
  return out;
}

template <typename Scalar>
Scalar max_eigenvalue(const SymOperator<Scalar>& op) {
  return spectrum(op).values(op.dim() - 1);
}

template <typename Scalar>
Scalar min_eigenvalue(const SymOperator<Scalar>& op) {
  return spectrum(op).values(0);
}

/// max over basis pairs |<op u, v>_g - <u, op v>_g| with <x, y>_g = x^T G y.
template <typename Scalar>
Scalar symmetry_defect(const GeneralOperator<Scalar>& op,
                       const SymOperator<Scalar>& metric) {
  if (metric.dim() != op.dim()) throw Error("invalid metric: dimension mismatch");
  Eigen::LLT<Matrix<Scalar>> llt(metric.matrix());
  if (op.dim() > 0 && (llt.info() != Eigen::Success ||
                       min_eigenvalue(metric) <= Scalar(0))) {
    throw Error("invalid metric");
  }
  if (op.dim() == 0) return Scalar(0);
  const Matrix<Scalar>& a = op.matrix();
  const Matrix<Scalar>& g = metric.matrix();
  return (a.transpose() * g - g * a).cwiseAbs().maxCoeff();
}

template <typename Scalar>
Scalar symmetry_defect(const GeneralOperator<Scalar>& op) {
  return symmetry_defect(op, SymOperator<Scalar>::Identity(op.dim()));
}

/// Minimum of sum <A w_i, w_i> over orthonormal k-frames, i.e. the sum of the
/// k smallest eigenvalues.
template <typename Scalar>
Scalar ky_fan_min(const SymOperator<Scalar>& op, Index k) {
  if (k < 1 || k > op.dim()) {
    throw Error("ky_fan_min: k=" + std::to_string(k) + " out of range [1, " +
                std::to_string(op.dim()) + "]");
  }
  return spectrum(op).values.head(k).sum();
}

/// Modified Gram-Schmidt with one re-orthogonalization pass. Columns whose
/// residual norm falls below drop_tol * (largest input column norm) are
/// dropped. Returns an orthonormal basis of the column span (rows x rank).
template <typename Scalar>
Matrix<Scalar> orthonormalize(const Eigen::Ref<const Matrix<Scalar>>& columns,
                              Scalar drop_tol = Scalar(1e-10)) {
  const Index rows = columns.rows();
  Matrix<Scalar> q(rows, columns.cols());
  if (columns.cols() == 0) return Matrix<Scalar>(rows, 0);
  const Scalar largest = columns.colwise().norm().maxCoeff();
  if (largest == Scalar(0)) return Matrix<Scalar>(rows, 0);

  Index rank = 0;
  for (Index j = 0; j < columns.cols(); ++j) {
    Vector<Scalar> w = columns.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < rank; ++i) w -= q.col(i).dot(w) * q.col(i);
    }
    const Scalar norm = w.norm();
    if (norm <= drop_tol * largest) continue;
    q.col(rank++) = w / norm;
  }
  return q.leftCols(rank);
}

/// Orthogonal projector onto the span of the columns of `basis`.
template <typename Scalar>
SymOperator<Scalar> orthogonal_projector(
    const Eigen::Ref<const Matrix<Scalar>>& basis) {
  const Matrix<Scalar> q = orthonormalize<Scalar>(basis);
  return SymOperator<Scalar>(q * q.transpose());
}

/// Orthonormal basis of the orthogonal complement of span(basis) in R^rows.
template <typename Scalar>
Matrix<Scalar> orthogonal_complement(
    const Eigen::Ref<const Matrix<Scalar>>& basis) {
  const Index n = basis.rows();
  const Matrix<Scalar> q = orthonormalize<Scalar>(basis);
  Matrix<Scalar> stacked(n, q.cols() + n);
  stacked << q, Matrix<Scalar>::Identity(n, n);
  const Matrix<Scalar> full = orthonormalize<Scalar>(stacked);
  return full.rightCols(full.cols() - q.cols());
}

template <typename Scalar>
Scalar spectral_norm(const Eigen::Ref<const Matrix<Scalar>>& a) {
  if (a.size() == 0) return Scalar(0);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(a);
  return svd.singularValues()(0);
}

template <typename Scalar>
Scalar smallest_singular_value(const Eigen::Ref<const Matrix<Scalar>>& a) {
  if (a.size() == 0) return Scalar(0);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace jfs
