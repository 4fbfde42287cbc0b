#include <gtest/gtest.h>

#include <cmath>

#include "gnslab/numerics.hpp"
#include "gnslab/random.hpp"
#include "gnslab/spin.hpp"

using namespace gnslab;

namespace {

CMatrix diag2(cplx a, cplx b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// Largest ||m v|| over random unit vectors; a lower bound for the operator norm.
double sampled_norm(const CMatrix& m, Rng& rng, int samples) {
  double best = 0.0;
  for (int s = 0; s < samples; ++s) best = std::max(best, (m * rng.unit_vector(m.cols())).norm());
  return best;
}

}  // namespace

TEST(Eigh, DiagonalInputSortsAscending) {
  const EighResult e = eigh(diag2(3.0, 1.0));
  EXPECT_NEAR(e.eigenvalues(0), 1.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues(1), 3.0, 1e-14);
}

TEST(Eigh, PauliXEigenvectors) {
  const EighResult e = eigh(spin::pauli_x());
  EXPECT_NEAR(e.eigenvalues(0), -1.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues(1), 1.0, 1e-14);
  CVector minus(2), plus(2);
  minus << 1.0, -1.0;
  plus << 1.0, 1.0;
  minus /= std::sqrt(2.0);
  plus /= std::sqrt(2.0);
  EXPECT_NEAR(std::abs(inner(minus, e.eigenvectors.col(0))), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(inner(plus, e.eigenvectors.col(1))), 1.0, 1e-12);
}

TEST(Eigh, BlochHamiltonianSpectrum) {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const RVector ev = eigvalsh(spin::hamiltonian(rng.sphere_point()));
    EXPECT_NEAR(ev(0), -1.0, 1e-12);
    EXPECT_NEAR(ev(1), 1.0, 1e-12);
  }
}

TEST(Eigh, ReconstructionAndOrthonormality) {
  Rng rng(12);
  for (int t = 0; t < 1000; ++t) {
    const int n = rng.integer(2, 32);
    const CMatrix m = rng.hermitian(n);
    const EighResult e = eigh(m);
    const CMatrix& v = e.eigenvectors;
    const CMatrix rec = v * e.eigenvalues.cast<cplx>().asDiagonal() * v.adjoint();
    const double scale = operator_norm(m);
    ASSERT_LE(operator_norm(rec - m), 1e-10 * scale);
    ASSERT_LE((v.adjoint() * v - identity(n)).cwiseAbs().maxCoeff(), 1e-12);
    for (Eigen::Index j = 0; j < n; ++j)
      ASSERT_LE((m * v.col(j) - e.eigenvalues(j) * v.col(j)).norm(), 1e-10 * scale);
  }
}

TEST(Eigh, PhaseConventionLargestEntryRealPositive) {
  Rng rng(13);
  const EighResult e = eigh(rng.hermitian(6));
  for (Eigen::Index j = 0; j < 6; ++j) {
    Eigen::Index best = 0;
    e.eigenvectors.col(j).cwiseAbs().maxCoeff(&best);
    EXPECT_NEAR(e.eigenvectors(best, j).imag(), 0.0, 1e-15);
    EXPECT_GT(e.eigenvectors(best, j).real(), 0.0);
  }
}

TEST(Eigh, RejectsNonHermitianAndNonFinite) {
  CMatrix m = diag2(1.0, 2.0);
  m(0, 1) = 1.0;
  try {
    eigh(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotHermitian);
  }
  CMatrix bad = diag2(std::nan(""), 1.0);
  try {
    eigh(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonFinite);
  }
}

TEST(OperatorNorm, SimpleCases) {
  EXPECT_NEAR(operator_norm(identity(5)), 1.0, 1e-14);
  EXPECT_NEAR(operator_norm(diag2(2.0, -3.0)), 3.0, 1e-14);
}

TEST(OperatorNorm, SamplingLowerBound) {
  Rng rng(21);
  const CMatrix m = rng.gaussian(8, 8);
  const double exact = operator_norm(m);
  const double sampled = sampled_norm(m, rng, 100000);
  EXPECT_LE(sampled, exact + 1e-6);
  // Power iteration on m* m, seeded randomly, approaches the bound from below.
  CVector v = rng.unit_vector(8);
  for (int it = 0; it < 5000; ++it) {
    v = m.adjoint() * (m * v);
    v.normalize();
  }
  EXPECT_NEAR((m * v).norm(), exact, 1e-10 * exact);
}

TEST(TraceNorm, SimpleCases) {
  EXPECT_NEAR(trace_norm(diag2(1.0, -1.0)), 2.0, 1e-14);
  Rng rng(22);
  const CVector u = rng.unit_vector(5), v = rng.unit_vector(5);
  EXPECT_NEAR(trace_norm(u * v.adjoint()), 1.0, 1e-12);
}

TEST(TraceNorm, ProjectorDifference) {
  Rng rng(23);
  for (int t = 0; t < 100; ++t) {
    const int n = rng.integer(2, 10);
    const CVector a = rng.unit_vector(n), b = rng.unit_vector(n);
    const double overlap = std::abs(inner(a, b));
    EXPECT_NEAR(trace_norm(projector(a) - projector(b)), 2.0 * std::sqrt(1.0 - overlap * overlap), 1e-10);
  }
}

TEST(Norms, OperatorTraceRankSandwich) {
  Rng rng(24);
  for (int t = 0; t < 200; ++t) {
    const int n = rng.integer(1, 12);
    const int r = rng.integer(1, n);
    const CMatrix m = rng.gaussian(n, r) * rng.gaussian(r, n);
    const double op = operator_norm(m), tr = trace_norm(m);
    EXPECT_LE(op, tr + 1e-12 * tr);
    EXPECT_LE(tr, r * op * (1 + 1e-12));
  }
}

TEST(GramSchmidt, DiagonalInput) {
  CVector a(2), b(2);
  a << 1.0, 0.0;
  b << 0.0, 2.0;
  const GramSchmidtResult g = gram_schmidt({a, b}, 1e-12);
  EXPECT_NEAR((g.basis[1] - CVector::Unit(2, 1)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g.change(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g.change(1, 1) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g.change(1, 0)), 0.0, 1e-15);
}

TEST(GramSchmidt, HandComputedChange) {
  CVector a(2), b(2);
  a << 1.0, 0.0;
  b << 1.0, 1.0;
  const GramSchmidtResult g = gram_schmidt({a, b}, 1e-12);
  EXPECT_NEAR((g.basis[1] - CVector::Unit(2, 1)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g.change(1, 0) + 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g.change(1, 1) - 1.0), 0.0, 1e-15);
}

TEST(GramSchmidt, DependentInputReportsIndex) {
  CVector a(2), b(2);
  a << 1.0, 0.0;
  b << 1.0, 1e-14;
  try {
    gram_schmidt({a, b}, 1e-9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::LinearlyDependent);
    ASSERT_TRUE(e.index().has_value());
    EXPECT_EQ(*e.index(), 1u);
  }
}

TEST(GramSchmidt, RoundTripAndTriangularity) {
  Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    const int d = rng.integer(2, 12);
    const int n = rng.integer(1, d);
    std::vector<CVector> vs;
    for (int i = 0; i < n; ++i) vs.push_back(rng.vector(d));
    const GramSchmidtResult g = gram_schmidt(vs, 1e-10);
    for (int i = 0; i < n; ++i) {
      CVector comb = CVector::Zero(d);
      for (int j = 0; j < n; ++j) comb += g.change(i, j) * vs[static_cast<std::size_t>(j)];
      ASSERT_LE((comb - g.basis[static_cast<std::size_t>(i)]).norm(), 1e-12 * 10);
      for (int j = i + 1; j < n; ++j) ASSERT_EQ(g.change(i, j), cplx(0.0));
      for (int j = 0; j < n; ++j)
        ASSERT_NEAR(std::abs(inner(g.basis[static_cast<std::size_t>(i)], g.basis[static_cast<std::size_t>(j)]) -
                             (i == j ? 1.0 : 0.0)),
                    0.0, 1e-12);
    }
  }
}

TEST(Polar, Examples) {
  EXPECT_LE(operator_norm(polar_unitary(identity(3)) - identity(3)), 1e-14);
  Rng rng(41);
  const CMatrix u0 = rng.unitary(4);
  EXPECT_LE(operator_norm(polar_unitary(2.0 * u0) - u0), 1e-12);
  for (int t = 0; t < 50; ++t) {
    const CMatrix m = rng.gaussian(4, 4);
    const CMatrix u = polar_unitary(m);
    EXPECT_LE(unitarity_defect(u), 1e-10);
    // |m| = (m* m)^{1/2} from an independent eigen-solve
    const EighResult e = eigh(m.adjoint() * m);
    const CMatrix abs_m = e.eigenvectors * e.eigenvalues.cwiseMax(0.0).cwiseSqrt().cast<cplx>().asDiagonal() *
                          e.eigenvectors.adjoint();
    EXPECT_LE(operator_norm(u * abs_m - m), 1e-9);
  }
}

TEST(Polar, RankDeficient) {
  try {
    polar_unitary(diag2(1.0, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::RankDeficient);
  }
}

TEST(ExpLog, Examples) {
  EXPECT_LE(operator_norm(matrix_exp(CMatrix::Zero(3, 3)) - identity(3)), 1e-15);
  EXPECT_LE(operator_norm(matrix_log_principal(identity(3))), 1e-15);
  const double theta = 0.3;
  const CMatrix e = matrix_exp(cplx(0.0, theta) * spin::pauli_z());
  EXPECT_LE(operator_norm(e - diag2(std::polar(1.0, theta), std::polar(1.0, -theta))), 1e-14);
}

TEST(ExpLog, RoundTripOnRandomUnitaries) {
  Rng rng(51);
  for (int t = 0; t < 100; ++t) {
    const int n = rng.integer(1, 8);
    const CMatrix u = rng.unitary(n);
    const CMatrix l = matrix_log_principal(u);
    EXPECT_LE(operator_norm(matrix_exp(l) - u), 1e-9);
    EXPECT_LE(operator_norm(l), pi + 1e-12);
    EXPECT_LE(operator_norm(l + l.adjoint()), 1e-9);
  }
}

TEST(ExpLog, SpectrumAtMinusOne) {
  try {
    matrix_log_principal(diag2(-1.0, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SpectrumAtMinusOne);
  }
}

TEST(Policy, StrictProfileTightens) {
  const NumericPolicy s = NumericPolicy::from_profile("strict");
  const NumericPolicy d = NumericPolicy::from_profile("default");
  EXPECT_EQ(s.profile, "strict");
  EXPECT_LT(s.hermiticity, d.hermiticity);
  EXPECT_DOUBLE_EQ(d.hermiticity, 1e-10);
  EXPECT_DOUBLE_EQ(d.rank, 1e-10);
  EXPECT_DOUBLE_EQ(d.orthonormality, 1e-12);
}
