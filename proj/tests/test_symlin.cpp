#include <gtest/gtest.h>

#include <random>

#include "jfs/curvature.hpp"
#include "jfs/symlin.hpp"

namespace jfs {
namespace {

Matrixd random_orthogonal(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrixd a(n, n);
  for (Index i = 0; i < a.size(); ++i) a(i) = g(rng);
  Eigen::HouseholderQR<Matrixd> qr(a);
  return qr.householderQ();
}

Matrixd random_symmetric(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrixd a(n, n);
  for (Index i = 0; i < a.size(); ++i) a(i) = g(rng);
  return (a + a.transpose()) / 2.0;
}

TEST(Spectrum, Identity) {
  const auto s = spectrum(SymOperatord::Identity(2));
  EXPECT_DOUBLE_EQ(s.values(0), 1.0);
  EXPECT_DOUBLE_EQ(s.values(1), 1.0);
}

TEST(Spectrum, DiagonalSortedAscending) {
  const auto s = spectrum(SymOperatord::Diagonal(Vectord{{4.0, 1.0, 1.0}}));
  EXPECT_DOUBLE_EQ(s.values(0), 1.0);
  EXPECT_DOUBLE_EQ(s.values(1), 1.0);
  EXPECT_DOUBLE_EQ(s.values(2), 4.0);
}

TEST(Spectrum, OffDiagonal2x2) {
  Matrixd a{{0.0, 1.0}, {1.0, 0.0}};
  const auto s = spectrum(SymOperatord(a));
  EXPECT_NEAR(s.values(0), -1.0, 1e-15);
  EXPECT_NEAR(s.values(1), 1.0, 1e-15);
}

TEST(Spectrum, EigenpairsAndOrthonormalityOnRandomInput) {
  std::mt19937_64 rng(11);
  for (Index n = 1; n <= 16; ++n) {
    const SymOperatord op(random_symmetric(n, rng));
    const auto s = spectrum(op);
    const double scale = spectral_norm<double>(op.matrix());
    for (Index i = 0; i < n; ++i) {
      const Vectord r = op.matrix() * s.vectors.col(i) - s.values(i) * s.vectors.col(i);
      EXPECT_LE(r.norm(), 1e-10 * scale) << "n=" << n;
      if (i > 0) { EXPECT_LE(s.values(i - 1), s.values(i)); }
    }
    const Matrixd gram = s.vectors.transpose() * s.vectors;
    EXPECT_LE((gram - Matrixd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12 * n);
    // cross-check against Eigen's own solver
    Eigen::SelfAdjointEigenSolver<Matrixd> ref(op.matrix());
    EXPECT_LE((ref.eigenvalues() - s.values).cwiseAbs().maxCoeff(), 1e-12 * (1 + scale));
  }
}

TEST(Spectrum, InvariantUnderOrthogonalConjugation) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 1 + trial % 8;
    const Matrixd a = random_symmetric(n, rng);
    const Matrixd q = random_orthogonal(n, rng);
    const auto s1 = spectrum(SymOperatord(a));
    const auto s2 = spectrum(SymOperatord(q.transpose() * a * q));
    EXPECT_LE((s1.values - s2.values).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(SymOperator, ConstructionSymmetrizesAndRecordsDefect) {
  Matrixd a{{1.0, 2.0}, {0.0, 3.0}};
  const SymOperatord op(a);
  EXPECT_EQ(op(0, 1), op(1, 0));
  EXPECT_DOUBLE_EQ(op(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(op.input_defect(), 2.0);
  EXPECT_THROW(SymOperatord(Matrixd(2, 3)), Error);
}

TEST(SymmetryDefect, RotationGenerator) {
  // Riccati operator of the non-self-adjoint S^3 family in the basis {J1, J2}
  GeneralOperatord s(Matrixd{{0.0, 1.0}, {-1.0, 0.0}});
  EXPECT_DOUBLE_EQ(symmetry_defect(s), 2.0);
}

TEST(SymmetryDefect, SymmetricInputIsZero) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::normal_distribution<double> g;
    Matrixd a(4, 4);
    for (Index i = 0; i < a.size(); ++i) a(i) = g(rng);
    EXPECT_EQ(symmetry_defect(GeneralOperatord(a + a.transpose())), 0.0);
  }
}

TEST(SymmetryDefect, Nilpotent2x2) {
  EXPECT_DOUBLE_EQ(symmetry_defect(GeneralOperatord(Matrixd{{0.0, 2.0}, {0.0, 0.0}})), 2.0);
}

TEST(SymmetryDefect, NonIdentityMetric) {
  // op is self-adjoint for g = diag(1, 4) iff g op is symmetric
  const SymOperatord g(Matrixd{{1.0, 0.0}, {0.0, 4.0}});
  GeneralOperatord op(Matrixd{{0.0, 4.0}, {1.0, 0.0}});
  EXPECT_NEAR(symmetry_defect(op, g), 0.0, 1e-15);
  EXPECT_GT(symmetry_defect(op), 1.0);
}

TEST(SymmetryDefect, RejectsIndefiniteMetric) {
  const SymOperatord g(Matrixd{{1.0, 0.0}, {0.0, -1.0}});
  EXPECT_THROW(symmetry_defect(GeneralOperatord(Matrixd::Identity(2, 2)), g), Error);
}

TEST(KyFan, Examples) {
  EXPECT_DOUBLE_EQ(ky_fan_min(SymOperatord::Diagonal(Vectord{{4.0, 1.0, 1.0}}), 2), 2.0);
  for (Index k = 1; k <= 5; ++k) {
    EXPECT_DOUBLE_EQ(ky_fan_min(SymOperatord::Identity(5), k), static_cast<double>(k));
  }
  EXPECT_DOUBLE_EQ(ky_fan_min(SymOperatord::Diagonal(Vectord{{1.0, 0.0, 0.0}}), 2), 0.0);
  EXPECT_THROW(ky_fan_min(SymOperatord::Identity(3), 0), Error);
  EXPECT_THROW(ky_fan_min(SymOperatord::Identity(3), 4), Error);
}

TEST(KyFan, SampledFramesNeverBeatTheMinimum) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 2 + trial % 5;
    const SymOperatord op(random_symmetric(n, rng));
    for (Index k = 1; k <= n; ++k) {
      const double exact = ky_fan_min(op, k);
      const double coarse = ky_fan_sampled(op, static_cast<int>(k), 100, 100 + trial);
      const double fine = ky_fan_sampled(op, static_cast<int>(k), 10000, 100 + trial);
      EXPECT_LE(exact, fine + 1e-12);
      EXPECT_LE(fine - exact, coarse - exact + 1e-12) << "n=" << n << " k=" << k;
      // frame sampling only gets close when the Grassmannian is small
      if (k * (n - k) <= 2) { EXPECT_LE(fine - exact, 1e-2) << "n=" << n << " k=" << k; }
    }
  }
}

TEST(Projector, Examples) {
  Matrixd e1 = Matrixd::Zero(3, 1);
  e1(0, 0) = 1.0;
  EXPECT_EQ(orthogonal_projector<double>(e1).matrix(),
            Matrixd(Vectord{{1.0, 0.0, 0.0}}.asDiagonal()));

  EXPECT_EQ(orthogonal_projector<double>(Matrixd(3, 0)).matrix(), Matrixd::Zero(3, 3));

  Matrixd d{{1.0}, {1.0}};
  const Matrixd p = orthogonal_projector<double>(d).matrix();
  EXPECT_NEAR((p - Matrixd::Constant(2, 2, 0.5)).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(Projector, IdempotentSymmetricAndDropsDependentColumns) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 2 + trial % 6;
    const Index r = 1 + trial % n;
    Matrixd b(n, r + 1);
    for (Index i = 0; i < n * r; ++i) b(i) = g(rng);
    b.col(r) = b.leftCols(r) * Vectord::Ones(r);  // dependent column
    const Matrixd p = orthogonal_projector<double>(b).matrix();
    EXPECT_LE((p * p - p).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((p - p.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(p.trace(), static_cast<double>(r), 1e-12);
    EXPECT_LE((p * b - b).norm(), 1e-12 * b.norm());
  }
}

TEST(Projector, ComplementIsOrthonormalAndOrthogonal) {
  Matrixd b{{1.0}, {1.0}, {0.0}};
  const Matrixd c = orthogonal_complement<double>(b);
  ASSERT_EQ(c.cols(), 2);
  EXPECT_LE((c.transpose() * c - Matrixd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((c.transpose() * b).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Spectrum, LongDoubleInstantiation) {
  using Ml = Matrix<long double>;
  Ml a{{2.0L, 1.0L}, {1.0L, 2.0L}};
  const auto s = spectrum(SymOperator<long double>(a));
  EXPECT_NEAR(static_cast<double>(s.values(0)), 1.0, 1e-15);
  EXPECT_NEAR(static_cast<double>(s.values(1)), 3.0, 1e-15);
}

}  // namespace
}  // namespace jfs
