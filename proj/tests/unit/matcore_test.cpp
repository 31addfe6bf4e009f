#include <gtest/gtest.h>

#include <cmath>

#include "lel/matcore.hpp"
#include "lel/noncomm_ops.hpp"
#include "lel/random.hpp"
#include "support/testing.hpp"

namespace lel {
namespace {

using testing::for_all;
using testing::max_abs;

TEST(EigHermitian, IdentityHasUnitEigenvalues) {
  const auto s = eig_hermitian(Matrix::Identity(2, 2));
  EXPECT_DOUBLE_EQ(s.values(0), 1.0);
  EXPECT_DOUBLE_EQ(s.values(1), 1.0);
}

TEST(EigHermitian, TwoByTwoCharacteristicPolynomial) {
  // tr = 1, det = 1/49
  const auto s = eig_hermitian(testing::reference_sigma().matrix());
  EXPECT_NEAR(s.values(0), (7.0 - 3.0 * std::sqrt(5.0)) / 14.0, 1e-14);
  EXPECT_NEAR(s.values(1), (7.0 + 3.0 * std::sqrt(5.0)) / 14.0, 1e-14);
  EXPECT_NEAR(s.values(0), 0.020843, 1e-6);
  EXPECT_NEAR(s.values(1), 0.979157, 1e-6);
}

TEST(EigHermitian, DiagonalInput) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 0.7;
  d(1, 1) = 0.3;
  const auto s = eig_hermitian(d);
  EXPECT_DOUBLE_EQ(s.values(0), 0.3);
  EXPECT_DOUBLE_EQ(s.values(1), 0.7);
}

TEST(EigHermitian, RejectsNonHermitian) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = 1.0;
  EXPECT_THROW(eig_hermitian(a), StructuralError);
}

TEST(EigHermitian, ReconstructionAndOrthonormality) {
  const int bad = for_all(101, 1000, [](Rng& r, int) {
    const int n = testing::random_dim(r, 2, 8);
    const Matrix a = random_hermitian(n, r);
    const auto s = eig_hermitian(a);
    const bool sorted = std::is_sorted(s.values.data(), s.values.data() + n);
    const double rec = (s.reconstruct() - a).norm() / a.norm();
    const double orth = max_abs(s.vectors.adjoint() * s.vectors - Matrix::Identity(n, n));
    return sorted && rec <= 1e-10 && orth <= 1e-12;
  });
  EXPECT_EQ(bad, -1);
}

TEST(EigHermitian, PhaseFixingMakesVectorsDeterministic) {
  Rng r(5);
  const Matrix a = random_hermitian(4, r);
  // Same spectrum, same eigenspaces, different input phases: results agree exactly.
  const auto s1 = eig_hermitian(a);
  const auto s2 = eig_hermitian(Matrix(s1.vectors * s1.values.cast<Complex>().asDiagonal() * s1.vectors.adjoint()));
  EXPECT_LE(max_abs(s1.vectors - s2.vectors), 1e-10);
  for (int k = 0; k < 4; ++k) {
    int first = 0;
    while (std::abs(s1.vectors(first, k)) <= 1e-10) ++first;
    EXPECT_NEAR(s1.vectors(first, k).imag(), 0.0, 1e-15);
    EXPECT_GT(s1.vectors(first, k).real(), 0.0);
  }
}

TEST(MatFn, SquareRootOfDiagonal) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const Matrix r = mat_sqrt(d);
  EXPECT_NEAR(r(0, 0).real(), 2.0, 1e-14);
  EXPECT_NEAR(r(1, 1).real(), 3.0, 1e-14);
  EXPECT_NEAR(std::abs(r(0, 1)), 0.0, 1e-14);
}

TEST(MatFn, ZerothPowerIsIdentity) {
  Rng r(7);
  const Matrix a = testing::random_positive(3, r);
  EXPECT_LE(max_abs(mat_pow(a, 0.0) - Matrix::Identity(3, 3)), 1e-13);
}

TEST(MatFn, LogOfPaperSigma) {
  const auto s = eig_hermitian(mat_log(testing::reference_sigma().matrix()));
  EXPECT_NEAR(s.values(0), std::log((7.0 - 3.0 * std::sqrt(5.0)) / 14.0), 1e-12);
  EXPECT_NEAR(s.values(1), std::log((7.0 + 3.0 * std::sqrt(5.0)) / 14.0), 1e-12);
}

TEST(MatFn, StrictModeRejectsSingularLog) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  try {
    mat_log(d);
    FAIL() << "expected SingularityError";
  } catch (const SingularityError& e) {
    EXPECT_EQ(e.eigenvalue(), 0.0);
  }
  EXPECT_THROW(mat_pow(d, -0.5), SingularityError);
}

TEST(MatFn, LenientModeClampsToFloor) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1e-11;
  const Matrix l = mat_log(d, DomainMode::lenient);
  EXPECT_NEAR(l(1, 1).real(), std::log(tol::pos_floor), 1e-9);
  d(1, 1) = -1e-6;  // beyond tol_psd: still an error
  EXPECT_THROW(mat_log(d, DomainMode::lenient), SingularityError);
}

TEST(MatFn, PowerSemigroup) {
  const int bad = for_all(102, 200, [](Rng& r, int) {
    const int n = testing::random_dim(r, 2, 6);
    const DensityMatrix s = random_density(n, r, 0.2);
    const double a = r.uniform(-2.0, 2.0), b = r.uniform(-2.0, 2.0);
    const Matrix lhs = mat_pow(s.matrix(), a) * mat_pow(s.matrix(), b);
    const Matrix rhs = mat_pow(s.matrix(), a + b);
    return (lhs - rhs).norm() <= 1e-10 * std::max(1.0, rhs.norm());
  });
  EXPECT_EQ(bad, -1);
}

TEST(DensityMatrix, ValidatesTracePositivityHermiticity) {
  Matrix m = Matrix::Identity(2, 2) * 0.5;
  EXPECT_NO_THROW(DensityMatrix::from(m));
  EXPECT_THROW(DensityMatrix::from(m * 2.0), ValidationError);
  Matrix neg = m;
  neg(0, 0) = 1.1;
  neg(1, 1) = -0.1;
  EXPECT_THROW(DensityMatrix::from(neg), ValidationError);
  Matrix nh = m;
  nh(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix::from(nh), ValidationError);
  EXPECT_THROW(DensityMatrix::from(Matrix(2, 3)), StructuralError);
}

TEST(DensityMatrix, StrictPositivity) {
  EXPECT_TRUE(DensityMatrix::maximally_mixed(3).strictly_positive());
  const DensityMatrix pure = DensityMatrix::diagonal({1.0, 0.0});
  EXPECT_FALSE(pure.strictly_positive());
  EXPECT_THROW(pure.require_strictly_positive("test"), SingularityError);
}

TEST(InnerS, UnitOnIdentityForEveryS) {
  Rng r(9);
  const DensityMatrix s = random_density(3, r, 0.1);
  for (double t : {0.0, 0.25, 0.5, 1.0}) {
    EXPECT_NEAR(inner_s(Matrix::Identity(3, 3), Matrix::Identity(3, 3), s, t).real(), 1.0, 1e-13);
  }
}

TEST(InnerS, EndpointsMatchDirectTraces) {
  const int bad = for_all(103, 200, [](Rng& r, int) {
    const int n = testing::random_dim(r, 2, 5);
    const DensityMatrix s = random_density(n, r, 0.1);
    const Matrix a = random_ginibre(n, r), b = random_ginibre(n, r);
    const Complex i0 = (a.adjoint() * s.matrix() * b).trace();
    const Complex i1 = (s.matrix() * a.adjoint() * b).trace();
    return std::abs(inner_s(a, b, s, 0.0) - i0) <= 1e-12 && std::abs(inner_s(a, b, s, 1.0) - i1) <= 1e-12;
  });
  EXPECT_EQ(bad, -1);
}

TEST(InnerS, ConjugateSymmetryAndPositivity) {
  const int bad = for_all(104, 300, [](Rng& r, int) {
    const int n = testing::random_dim(r, 2, 6);
    const DensityMatrix s = random_density(n, r, 0.1);
    const Matrix a = random_ginibre(n, r), b = random_ginibre(n, r);
    const double t = r.uniform();
    const bool sym = std::abs(inner_s(a, b, s, t) - std::conj(inner_s(b, a, s, t))) <= 1e-12;
    const Complex aa = inner_s(a, a, s, 0.5);
    return sym && aa.real() > 0.0 && std::abs(aa.imag()) <= 1e-12;
  });
  EXPECT_EQ(bad, -1);
  const DensityMatrix s = DensityMatrix::maximally_mixed(2);
  EXPECT_EQ(inner_s(Matrix::Zero(2, 2), Matrix::Zero(2, 2), s, 0.5), Complex(0.0));
}

TEST(TraceNorm, KnownValues) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -2.0;
  EXPECT_NEAR(trace_norm(d), 3.0, 1e-14);
  Rng r(3);
  EXPECT_NEAR(trace_norm(random_unitary(2, r)), 2.0, 1e-13);
}

TEST(TraceNorm, BoundsAbsoluteTrace) {
  const int bad = for_all(105, 300, [](Rng& r, int) {
    const Matrix a = random_ginibre(testing::random_dim(r, 2, 6), r);
    // Singular-value oracle: sum of sqrt(eig(A* A)).
    const auto s = eig_hermitian(hermitian_part(a.adjoint() * a));
    double sv = 0.0;
    for (int k = 0; k < s.dim(); ++k) sv += std::sqrt(std::max(0.0, s.values(k)));
    return std::abs(trace_norm(a) - sv) <= 1e-10 * sv && trace_norm(a) + 1e-12 >= std::abs(a.trace());
  });
  EXPECT_EQ(bad, -1);
}

TEST(Vectorization, ColumnStackingConvention) {
  Rng r(11);
  const Matrix x = random_ginibre(3, r), a = random_ginibre(3, r), y = random_ginibre(3, r);
  const Vector lhs = vec(x * a * y);
  const Vector rhs = kron(y.transpose(), x) * vec(a);
  EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(vec(a)(1), a(1, 0));
  EXPECT_EQ(vec(a)(3), a(0, 1));
  EXPECT_LE(max_abs(unvec(vec(a), 3) - a), 0.0);
}

TEST(Superoperator, SuperopOfIdentityAndGamma) {
  const Superoperator id = superop_of([](const Matrix& a) { return a; }, 2);
  EXPECT_LE(max_abs(id.matrix() - Matrix::Identity(4, 4)), 0.0);
  const DensityMatrix half = DensityMatrix::maximally_mixed(2);
  const Superoperator g = superop_of([&](const Matrix& a) { return gamma_pow(half, 1.0, a); }, 2);
  EXPECT_LE(max_abs(g.matrix() - 0.5 * Matrix::Identity(4, 4)), 1e-15);
}

TEST(Superoperator, LeftMultiplicationIsIdentityKronX) {
  Rng r(12);
  const Matrix x = random_ginibre(3, r);
  const Superoperator s = superop_of([&](const Matrix& a) { return Matrix(x * a); }, 3);
  EXPECT_LE(max_abs(s.matrix() - kron(Matrix::Identity(3, 3), x)), 1e-15);
  EXPECT_LE(max_abs(Superoperator::left(x).matrix() - s.matrix()), 1e-15);
}

TEST(Superoperator, RoundTripAndAlgebra) {
  const int bad = for_all(106, 100, [](Rng& r, int) {
    const int n = testing::random_dim(r, 2, 5);
    const Matrix x = random_ginibre(n, r), y = random_ginibre(n, r), a = random_ginibre(n, r);
    auto phi = [&](const Matrix& m) { return Matrix(x * m * y + m.transpose()); };
    const Superoperator s = superop_of(phi, n);
    const bool round = max_abs(s.apply(a) - phi(a)) <= 1e-12 * std::max(1.0, max_abs(phi(a)));
    const Superoperator sw = Superoperator::sandwich(x, y);
    const bool comp = max_abs((sw * sw).apply(a) - x * x * a * y * y) <= 1e-11 * std::max(1.0, max_abs(x * x * a * y * y));
    // Hilbert-Schmidt adjoint: <S(a), b> = <a, S*(b)>
    const Matrix b = random_ginibre(n, r);
    const bool adj = std::abs(hs_inner(s.apply(a), b) - hs_inner(a, s.adjoint().apply(b))) <= 1e-10;
    return round && comp && adj;
  });
  EXPECT_EQ(bad, -1);
}

TEST(Superoperator, TraceNorms) {
  EXPECT_EQ(superop_trace_norm(Superoperator::zero(2)), 0.0);
  EXPECT_NEAR(superop_trace_norm(Superoperator::identity(2)), 4.0, 1e-14);
  // Gamma_sigma is diagonal in the eigenbasis with kernel sqrt(l_k l_l).
  const DensityMatrix s = testing::reference_sigma();
  const Superoperator g = superop_of([&](const Matrix& a) { return gamma_pow(s, 1.0, a); }, 2);
  const double r0 = std::sqrt(s.spectrum().values(0)) + std::sqrt(s.spectrum().values(1));
  EXPECT_NEAR(superop_trace_norm(g), r0 * r0, 1e-13);
}

TEST(TracelessBasis, OrthonormalHermitianTraceless) {
  for (int n = 1; n <= 5; ++n) {
    const auto basis = traceless_hermitian_basis(n);
    ASSERT_EQ(static_cast<int>(basis.size()), n * n - 1);
    for (size_t a = 0; a < basis.size(); ++a) {
      EXPECT_TRUE(is_hermitian(basis[a]));
      EXPECT_NEAR(std::abs(basis[a].trace()), 0.0, 1e-14);
      for (size_t b = 0; b < basis.size(); ++b) {
        EXPECT_NEAR(std::abs(hs_inner(basis[a], basis[b])), a == b ? 1.0 : 0.0, 1e-14);
      }
    }
  }
}

}  // namespace
}  // namespace lel
