#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "jfs/symlin.hpp"

namespace jfs {

/// Curvature operator t -> R(t) = R(., gamma') gamma' along a unit-speed
/// geodesic, written in a parallel orthonormal frame of the normal space
/// (dimension n-1 for an n-manifold).
class CurvatureField {
 public:
  enum class Kind { ConstantSectional, DiagonalConstant, Sampled };

  int n() const { return n_; }
  Index normal_dim() const { return static_cast<Index>(n_ - 1); }
  Kind kind() const { return kind_; }
  bool is_constant() const { return kind_ != Kind::Sampled; }

  /// Interval on which evaluate() is defined; infinite for constant fields.
  double t_min() const;
  double t_max() const;

  SymOperatord evaluate(double t) const;
  SymOperatord operator()(double t) const { return evaluate(t); }

  // Parameters of the field, for serialization.
  double sectional() const { return sectional_; }
  const Vectord& eigenvalues() const { return eigs_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<Matrixd>& nodes() const { return ops_; }

  friend CurvatureField constant_sectional(int n, double c);
  friend CurvatureField diagonal_constant(const std::vector<double>& eigs);
  friend CurvatureField sampled_field(int n, std::vector<double> grid,
                                      std::vector<Matrixd> ops);

 private:
  CurvatureField() = default;

  int n_ = 2;
  Kind kind_ = Kind::ConstantSectional;
  double sectional_ = 0.0;
  Vectord eigs_;
  Matrixd constant_;
  std::vector<double> grid_;
  std::vector<Matrixd> ops_;
};

/// Space form of sectional curvature c: R(t) = c id.
CurvatureField constant_sectional(int n, double c);

/// Jacobi operator of CP^{n/2} with holomorphic curvature 4 in the parallel
/// frame whose first vector is J gamma': diag(4, 1, ..., 1).
CurvatureField fubini_study_model(int n);

/// R(t) = diag(eigs), n = eigs.size() + 1.
CurvatureField diagonal_constant(const std::vector<double>& eigs);

/// Piecewise-linear interpolation of operators given at strictly increasing
/// grid times. Each operator is (n-1)x(n-1).
CurvatureField sampled_field(int n, std::vector<double> grid,
                             std::vector<Matrixd> ops);

/// Parses {"n": int, "grid": [t...], "ops": [[row-major (n-1)^2]...]}.
/// Errors name the offending node index.
CurvatureField sampled_field_from_json(std::string_view text);

/// Sum of the k smallest eigenvalues of R(t): the floor of
/// sum_i sec(gamma', w_i) over orthonormal k-frames orthogonal to gamma'.
double ric_k_floor(const CurvatureField& field, double t, int k);

/// Brute-force minimum of sum_i <R(t) w_i, w_i> over `samples` random
/// orthonormal k-frames (Gaussian columns, QR-orthonormalized).
double ric_k_floor_sampled(const CurvatureField& field, double t, int k,
                           int samples, std::uint64_t seed);

/// Same sampler applied directly to an operator.
double ky_fan_sampled(const SymOperatord& op, int k, int samples,
                      std::uint64_t seed);

std::string to_string(CurvatureField::Kind kind);

}  // namespace jfs
