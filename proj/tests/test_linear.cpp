#include "aodecomp/linear.hpp"

#include <cmath>
#include <variant>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace aodecomp {
namespace {

using testing::Draw;
using testing::near;

constexpr double kSqrt2 = 1.4142135623730951;

// ---------------------------------------------------------------------------
// classify_spectrum
// ---------------------------------------------------------------------------

TEST(ClassifySpectrum, DiagonalDistinct) {
  const auto c = classify_spectrum(Matrix2::diag(-1, -2));
  ASSERT_TRUE(std::holds_alternative<RealDistinct>(c));
  EXPECT_EQ(std::get<RealDistinct>(c).lambda1, -1.0);
  EXPECT_EQ(std::get<RealDistinct>(c).lambda2, -2.0);
}

TEST(ClassifySpectrum, RotationIsComplexWithPositiveBeta) {
  const auto c = classify_spectrum(Matrix2{0, 1, -1, 0});
  ASSERT_TRUE(std::holds_alternative<ComplexPair>(c));
  EXPECT_EQ(std::get<ComplexPair>(c).alpha, 0.0);
  EXPECT_EQ(std::get<ComplexPair>(c).beta, 1.0);
  // Transposed rotation has the same unordered pair.
  EXPECT_EQ(std::get<ComplexPair>(classify_spectrum(Matrix2{0, -1, 1, 0})).beta, 1.0);
}

TEST(ClassifySpectrum, LowerTriangularUnitSubdiagonalIsDefective) {
  const auto c = classify_spectrum(Matrix2{-1, 0, 1, -1});
  ASSERT_TRUE(std::holds_alternative<RepeatedDefective>(c));
  EXPECT_EQ(std::get<RepeatedDefective>(c).lambda, -1.0);
}

TEST(ClassifySpectrum, ScalarMatrixIsDiagonalizable) {
  const auto c = classify_spectrum(-3.0 * Matrix2::identity());
  ASSERT_TRUE(std::holds_alternative<RepeatedDiagonalizable>(c));
  EXPECT_EQ(std::get<RepeatedDiagonalizable>(c).lambda, -3.0);
  EXPECT_TRUE(std::holds_alternative<RepeatedDiagonalizable>(classify_spectrum(Matrix2::zero())));
  EXPECT_TRUE(std::holds_alternative<RepeatedDefective>(classify_spectrum(Matrix2{0, 0, 1, 0})));
}

TEST(ClassifySpectrum, ConsistentWithCharacteristicPolynomial) {
  Draw draw(21);
  for (int i = 0; i < 1000; ++i) {
    const Matrix2 a = draw.matrix(-3, 3);
    const double tr = a.trace(), det = a.det();
    const auto c = classify_spectrum(a);
    if (const auto* r = std::get_if<RealDistinct>(&c)) {
      EXPECT_GT(r->lambda1, r->lambda2);
      for (double l : {r->lambda1, r->lambda2}) EXPECT_NEAR(l * l - tr * l + det, 0.0, 1e-9);
    } else if (const auto* z = std::get_if<ComplexPair>(&c)) {
      EXPECT_GT(z->beta, 0.0);
      EXPECT_NEAR(2 * z->alpha, tr, 1e-12);
      EXPECT_NEAR(z->alpha * z->alpha + z->beta * z->beta, det, 1e-9);
    }
  }
}

// ---------------------------------------------------------------------------
// solve_gyration
// ---------------------------------------------------------------------------

TEST(SolveGyration, NodeUnique) {
  const auto s = solve_gyration(Matrix2::diag(-1, -2), DiffusionParams(1, 0.3, 1));
  ASSERT_TRUE(std::holds_alternative<UniqueQ>(s));
  // (l1 - l2) / (l1 + l2) * d12 = (1 / -3) * 0.3
  EXPECT_NEAR(std::get<UniqueQ>(s).q, -0.1, 1e-15);
}

TEST(SolveGyration, SaddleFamily) {
  const auto s = solve_gyration(Matrix2::diag(1, -1), DiffusionParams::identity());
  ASSERT_TRUE(std::holds_alternative<FamilyQ>(s));
  EXPECT_EQ(std::get<FamilyQ>(s).default_q, 1.0);
  EXPECT_EQ(std::get<FamilyQ>(s).note, "d12 = 0");
}

TEST(SolveGyration, SaddleWithCorrelatedDiffusionIsInconsistent) {
  const auto s = solve_gyration(Matrix2::diag(1, -1), DiffusionParams(1, 0.5, 1));
  ASSERT_TRUE(std::holds_alternative<InconsistentQ>(s));
  EXPECT_DOUBLE_EQ(std::get<InconsistentQ>(s).residual, 1.0);
}

TEST(SolveGyration, CenterWithIdentityDiffusionIsInconsistent) {
  const auto s = solve_gyration(Matrix2{0, 1, -1, 0}, DiffusionParams::identity());
  ASSERT_TRUE(std::holds_alternative<InconsistentQ>(s));
  EXPECT_EQ(std::get<InconsistentQ>(s).residual, 2.0);
  EXPECT_EQ(gyration_constraint_note(Matrix2{0, 1, -1, 0}), "d11 = d22 = d12 = 0");
}

TEST(SolveGyration, CenterWithZeroDiffusionIsFamily) {
  const auto s = solve_gyration(Matrix2{0, 1, -1, 0}, DiffusionParams::zero());
  ASSERT_TRUE(std::holds_alternative<FamilyQ>(s));
  EXPECT_EQ(std::get<FamilyQ>(s).note, "d11 = d22 = d12 = 0");
}

TEST(SolveGyration, NilpotentShearNote) {
  EXPECT_EQ(gyration_constraint_note(Matrix2{0, 0, 1, 0}), "d11 = d12 = 0");
  EXPECT_EQ(gyration_constraint_note(Matrix2::zero()), "none (any D)");
}

TEST(SolveGyration, UniqueBranchSolvesLyapunovEquation) {
  Draw draw(22);
  for (int i = 0; i < 1000; ++i) {
    const Matrix2 a = draw.matrix_with_trace(0.1);
    const DiffusionParams d = draw.diffusion();
    const auto s = solve_gyration(a, d);
    ASSERT_TRUE(std::holds_alternative<UniqueQ>(s));
    EXPECT_LT(lyapunov_equation_residual(a, d, AntisymScalar{std::get<UniqueQ>(s).q}), 1e-10);
  }
}

// ---------------------------------------------------------------------------
// lyapunov_equation_residual
// ---------------------------------------------------------------------------

TEST(LyapunovResidual, FamilyHoldsForEveryQ) {
  const Matrix2 a = Matrix2::diag(1, -1);
  for (double q : {-100.0, -1.0, 0.0, 0.5, 1.0, 3e7}) {
    EXPECT_LT(lyapunov_equation_residual(a, DiffusionParams::identity(), AntisymScalar{q}), 1e-10);
  }
}

TEST(LyapunovResidual, WrongQIsFrobeniusOfScaledJ) {
  // Residual matrix is (trace q - rhs) J = (-3 * 0.1 - 0.3) J = -0.6 J,
  // whose Frobenius norm is 0.6 sqrt(2).
  const Matrix2 a = Matrix2::diag(-1, -2);
  const DiffusionParams d(1, 0.3, 1);
  const AntisymScalar q{0.1};
  const Matrix2 qm = q.matrix(), dm = d.matrix();
  const Matrix2 brute = a * qm + qm * a.transpose() - a * dm + dm * a.transpose();
  EXPECT_TRUE(near(brute, -0.6 * Matrix2::rotation_generator(), 1e-15));
  EXPECT_NEAR(lyapunov_equation_residual(a, d, q), 0.6 * kSqrt2, 1e-15);
}

// ---------------------------------------------------------------------------
// assemble_decomposition
// ---------------------------------------------------------------------------

TEST(AssembleDecomposition, Saddle) {
  const auto dec = assemble_decomposition(Matrix2::diag(1, -1), DiffusionParams::identity(), {1.0});
  EXPECT_TRUE(near(dec.s, 0.5 * Matrix2::identity(), 1e-15));
  EXPECT_DOUBLE_EQ(dec.t.q, -0.5);
  EXPECT_TRUE(near(dec.u, Matrix2{-0.5, -0.5, -0.5, 0.5}, 1e-15));
}

TEST(AssembleDecomposition, RepeatedDiagonalIdentityDiffusion) {
  const auto dec = assemble_decomposition(-1.0 * Matrix2::identity(), DiffusionParams::identity(), {0.0});
  EXPECT_EQ(dec.s, Matrix2::identity());
  EXPECT_EQ(dec.t.q, 0.0);
  EXPECT_EQ(dec.u, Matrix2::identity());
}

TEST(AssembleDecomposition, ZeroMatrixIsConservative) {
  const auto dec = assemble_decomposition(Matrix2::zero(), DiffusionParams(2, 0.5, 1), {0.0});
  EXPECT_EQ(dec.u, Matrix2::zero());
  const ScalarField phi = quadratic_potential(dec.u);
  EXPECT_EQ(phi(Point2{3, -4}), 0.0);
}

TEST(AssembleDecomposition, SingularDPlusQ) {
  EXPECT_THROW(assemble_decomposition(Matrix2::diag(1, -1), DiffusionParams::zero(), {0.0}),
               SingularMatrix);
}

TEST(AssembleDecomposition, WrongQGivesAsymmetricU) {
  try {
    assemble_decomposition(Matrix2::diag(-1, -2), DiffusionParams(1, 0.3, 1), {0.1});
    FAIL() << "expected AsymmetricU";
  } catch (const AsymmetricU& e) {
    EXPECT_GT(e.gap(), 1e-3);
    EXPECT_GT(max_abs_diff(e.u(), e.u().transpose()), 1e-3);
  }
}

TEST(AssembleDecomposition, InvariantsOnRandomUniqueDraws) {
  Draw draw(23);
  for (int i = 0; i < 1000; ++i) {
    const Matrix2 a = draw.matrix_with_trace(0.1);
    const DiffusionParams d = draw.diffusion();
    const double q = std::get<UniqueQ>(solve_gyration(a, d)).q;
    const auto dec = assemble_decomposition(a, d, {q});
    EXPECT_LT(lyapunov_equation_residual(a, d, dec.q), 1e-10);
    const Matrix2 inv = testing::cramer_inverse(d.matrix() + dec.q.matrix());
    EXPECT_TRUE(near(dec.s_plus_t(), inv, 1e-10 * (1 + inv.max_norm())));
    EXPECT_EQ(dec.u, dec.u.transpose());
    EXPECT_GE(dec.s.trace(), -1e-12);
    EXPECT_GE(dec.s.det(), -1e-12 * (1 + dec.s.max_norm() * dec.s.max_norm()));
    for (int k = 0; k < 5; ++k) {
      const Point2 x = draw.point(-3, 3);
      const double scale = 1e-9 * (1 + dec.u.max_norm()) * (1 + x.norm());
      // (S + T) A x = -U x
      EXPECT_TRUE(near(dec.s_plus_t() * (a * x), -(dec.u * x), scale));
      EXPECT_TRUE(near(reconstruct_drift(dec, x), a * x, scale * (1 + d.matrix().max_norm())));
    }
  }
}

TEST(AssembleDecomposition, StableSpectrumHasNonIncreasingPotential) {
  Draw draw(24);
  for (int i = 0; i < 200; ++i) {
    const Matrix2 a = draw.stable_matrix();
    const DiffusionParams d = draw.diffusion();
    const auto dec = assemble_decomposition(a, d, {std::get<UniqueQ>(solve_gyration(a, d)).q});
    for (int k = 0; k < 5; ++k) {
      const Point2 x = draw.point(-3, 3);
      const Point2 xdot = a * x;
      const double rate = (dec.u * x).dot(xdot);
      const double hp = xdot.dot(dec.s * xdot);
      EXPECT_LE(rate, 1e-12 * (1 + x.norm_sq()));
      EXPECT_NEAR(std::abs(rate), hp, 1e-9 * (1 + std::abs(rate)));
    }
  }
}

// ---------------------------------------------------------------------------
// Printed per-case closed forms, 20 random parameter draws each.
// ---------------------------------------------------------------------------

TEST(ClosedForms, DistinctRealNonzeroTrace) {
  Draw draw(31);
  for (int i = 0; i < 20; ++i) {
    const double l1 = draw.uniform(-3, -0.2), l2 = draw.uniform(-3, -0.2);
    const DiffusionParams d = draw.diffusion();
    const Matrix2 a = Matrix2::diag(l1, l2);
    const double q = std::get<UniqueQ>(solve_gyration(a, d)).q;
    EXPECT_NEAR(q, (l1 - l2) / (l1 + l2) * d.d12(), 1e-12);
    const auto dec = assemble_decomposition(a, d, {q});
    const double sum = l1 + l2;
    const double k = sum * sum / (d.d11() * d.d22() * sum * sum - 4 * l1 * l2 * d.d12() * d.d12());
    EXPECT_TRUE(near(dec.s, k * Matrix2{d.d22(), -d.d12(), -d.d12(), d.d11()}, 1e-9));
    const double c = -2 * l1 * l2 / sum * d.d12();
    EXPECT_TRUE(near(dec.u, -k * Matrix2{l1 * d.d22(), c, c, l2 * d.d11()}, 1e-9));
  }
}

TEST(ClosedForms, SaddleTraceZero) {
  Draw draw(32);
  for (int i = 0; i < 20; ++i) {
    const double l1 = draw.uniform(0.2, 3);
    const double d11 = draw.uniform(0.1, 2), d22 = draw.uniform(0.1, 2), q = draw.uniform(-3, 3);
    const DiffusionParams d(d11, 0, d22);
    const auto dec = assemble_decomposition(Matrix2::diag(l1, -l1), d, {q});
    const double c = 1 / (d11 * d22 + q * q);
    EXPECT_TRUE(near(dec.s, c * Matrix2::diag(d22, d11), 1e-9));
    EXPECT_TRUE(near(dec.u, -l1 * c * Matrix2{d22, q, q, -d11}, 1e-9));
  }
}

TEST(ClosedForms, RepeatedDiagonalNonzero) {
  // The printed U carries d11 d22 + d12^2 in its denominator; the printed S,
  // and the identity U = -lambda S, need d11 d22 - d12^2.
  Draw draw(33);
  for (int i = 0; i < 20; ++i) {
    const double l = draw.uniform(-3, -0.2);
    const DiffusionParams d = draw.diffusion();
    const auto dec = assemble_decomposition(l * Matrix2::identity(), d, {0.0});
    const double det = d.d11() * d.d22() - d.d12() * d.d12();
    const Matrix2 s = (1 / det) * Matrix2{d.d22(), -d.d12(), -d.d12(), d.d11()};
    EXPECT_TRUE(near(dec.s, s, 1e-9 * (1 + s.max_norm())));
    EXPECT_TRUE(near(dec.u, -l * s, 1e-9 * (1 + s.max_norm())));
  }
}

TEST(ClosedForms, DefectiveNonzero) {
  Draw draw(34);
  for (int i = 0; i < 20; ++i) {
    const double l = draw.uniform(-3, -0.2);
    const DiffusionParams d = draw.diffusion();
    const double d11 = d.d11(), d12 = d.d12(), d22 = d.d22();
    const Matrix2 a{l, 0, 1, l};
    const double q = std::get<UniqueQ>(solve_gyration(a, d)).q;
    EXPECT_NEAR(q, -d11 / (2 * l), 1e-12);
    const auto dec = assemble_decomposition(a, d, {q});
    const double k = 4 * l * l / (4 * l * l * d11 * d22 - 4 * l * l * d12 * d12 + d11 * d11);
    EXPECT_TRUE(near(dec.s, k * Matrix2{d22, -d12, -d12, d11}, 1e-9));
    const double c = -d12 * l + d11 / 2;
    EXPECT_TRUE(near(dec.u, -k * Matrix2{d22 * l - d12 + d11 / (2 * l), c, c, d11 * l}, 1e-9));
  }
}

TEST(ClosedForms, ComplexPairNonzeroReal) {
  Draw draw(35);
  for (int i = 0; i < 20; ++i) {
    const double al = draw.uniform(-3, -0.2), be = draw.uniform(0.2, 3);
    const DiffusionParams d = draw.diffusion();
    const double d11 = d.d11(), d12 = d.d12(), d22 = d.d22();
    const Matrix2 a{al, be, -be, al};
    const double q = std::get<UniqueQ>(solve_gyration(a, d)).q;
    EXPECT_NEAR(q, be * (d11 + d22) / (2 * al), 1e-12);
    const auto dec = assemble_decomposition(a, d, {q});
    const double k = 4 * al * al / (4 * al * al * (d11 * d22 - d12 * d12) + be * be * (d11 + d22) * (d11 + d22));
    EXPECT_TRUE(near(dec.s, k * Matrix2{d22, -d12, -d12, d11}, 1e-9));
    const double m = be * be * (d11 + d22) / (2 * al);
    const double c = -d12 * al + be * (d22 - d11) / 2;
    EXPECT_TRUE(near(dec.u, -k * Matrix2{d22 * al + d12 * be + m, c, c, d11 * al - d12 * be + m}, 1e-9));
  }
}

TEST(ClosedForms, CenterConservative) {
  for (double be : {0.5, 1.0, 2.0}) {
    for (double q : {-2.0, 1.0, 3.0}) {
      const auto dec = assemble_decomposition(Matrix2{0, be, -be, 0}, DiffusionParams::zero(), {q});
      EXPECT_TRUE(near(dec.s, Matrix2::zero(), 1e-15));
      EXPECT_TRUE(near(dec.u, (-be / q) * Matrix2::identity(), 1e-14));
    }
  }
}

// ---------------------------------------------------------------------------
// quadratic_potential / reconstruct_drift / construct_linear
// ---------------------------------------------------------------------------

TEST(QuadraticPotential, HalfQuadraticForm) {
  const ScalarField id = quadratic_potential(Matrix2::identity());
  EXPECT_EQ(id(Point2{1, 1}), 1.0);
  EXPECT_EQ(id.gradient(Point2{1, 1}), (Point2{1, 1}));
  const ScalarField saddle = quadratic_potential(Matrix2{-0.5, -0.5, -0.5, 0.5});
  EXPECT_EQ(saddle(Point2{1, 0}), -0.25);
  EXPECT_EQ(saddle.gradient(Point2{1, 0}), (Point2{-0.5, -0.5}));
  EXPECT_EQ(quadratic_potential(Matrix2::zero())(Point2{7, 8}), 0.0);
  const auto c = potential_coefficients(Matrix2{-0.5, -0.5, -0.5, 0.5});
  EXPECT_EQ(c.c11, -0.25);
  EXPECT_EQ(c.c12, -0.5);
  EXPECT_EQ(c.c22, 0.25);
}

TEST(ReconstructDrift, Fixtures) {
  const auto saddle = assemble_decomposition(Matrix2::diag(1, -1), DiffusionParams::identity(), {1.0});
  EXPECT_TRUE(near(reconstruct_drift(saddle, {1, 0}), Point2{1, 0}, 1e-15));
  EXPECT_EQ(reconstruct_drift(saddle, {0, 0}), (Point2{0, 0}));
  const auto node = assemble_decomposition(Matrix2::diag(-1, -2), DiffusionParams(1, 0.3, 1), {-0.1});
  EXPECT_TRUE(near(reconstruct_drift(node, {1, 1}), Point2{-1, -2}, 1e-9));
}

TEST(ConstructLinear, DefaultsAndErrors) {
  const auto built = construct_linear(LinearSystem{Matrix2::diag(-1, -2), std::nullopt, std::nullopt});
  EXPECT_EQ(built.decomposition.d, DiffusionParams::identity());
  EXPECT_EQ(built.decomposition.q.q, 0.0);

  const auto fam = construct_linear(LinearSystem{Matrix2::diag(1, -1), std::nullopt, std::nullopt});
  EXPECT_TRUE(std::holds_alternative<FamilyQ>(fam.branch));
  EXPECT_EQ(fam.decomposition.q.q, 1.0);

  try {
    construct_linear(LinearSystem{Matrix2{0, 1, -1, 0}, std::nullopt, std::nullopt});
    FAIL() << "expected InconsistentGyration";
  } catch (const InconsistentGyration& e) {
    EXPECT_EQ(e.residual(), 2.0);
    EXPECT_EQ(e.constraint(), "d11 = d22 = d12 = 0");
  }
}

}  // namespace
}  // namespace aodecomp
