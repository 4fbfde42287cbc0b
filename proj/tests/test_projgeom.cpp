#include <gtest/gtest.h>

#include <cmath>

#include "gnslab/projgeom.hpp"
#include "gnslab/random.hpp"

using namespace gnslab;

namespace {

CVector e(int n, int i) { return CVector::Unit(n, i); }

CVector diagonal_vector() {
  CVector v(2);
  v << 1.0, 1.0;
  return v / std::sqrt(2.0);
}

// min over a uniform grid of lambda in U(1) of ||Psi - lambda Omega||
double chordal_grid_oracle(const CVector& psi, const CVector& omega, int points) {
  double best = 1e300;
  for (int k = 0; k < points; ++k) best = std::min(best, (psi - std::polar(1.0, 2 * pi * k / points) * omega).norm());
  return best;
}

template <class F>
Errc error_of(F f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidArgument;
}

}  // namespace

TEST(Ray, Normalizes) {
  const Ray r(CVector::Constant(3, 2.0));
  EXPECT_NEAR(r.representative().norm(), 1.0, 1e-15);
  EXPECT_EQ(error_of([] { Ray(CVector::Zero(2)); }), Errc::ZeroVector);
}

TEST(RayProduct, Examples) {
  EXPECT_NEAR(ray_product(Ray(e(2, 0)), Ray(e(2, 1))), 0.0, 1e-15);
  Rng rng(201);
  const CVector v = rng.unit_vector(4);
  EXPECT_NEAR(ray_product(Ray(v), Ray(rng.phase() * v)), 1.0, 1e-14);
  EXPECT_NEAR(ray_product(Ray(e(2, 0)), Ray(diagonal_vector())), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Metrics, Examples) {
  Rng rng(202);
  const CVector v = rng.unit_vector(3);
  const Ray a(v), b(rng.phase() * v);
  EXPECT_NEAR(d_chordal(a, b), 0.0, 1e-7);
  EXPECT_NEAR(d_fubini_study(a, b), 0.0, 1e-7);
  EXPECT_NEAR(d_gap(a, b), 0.0, 1e-7);

  const Ray x(e(2, 0)), y(e(2, 1));
  EXPECT_NEAR(d_chordal(x, y), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(d_fubini_study(x, y), pi / 2, 1e-15);
  EXPECT_NEAR(d_gap(x, y), 1.0, 1e-15);

  const Ray d(diagonal_vector());
  EXPECT_NEAR(d_chordal(x, d), std::sqrt(2.0 - std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(d_chordal(x, d), 0.76536686473, 1e-10);
  EXPECT_NEAR(d_chordal(x, d), chordal_grid_oracle(e(2, 0), diagonal_vector(), 1000000), 1e-10);
  EXPECT_NEAR(d_gap(x, d), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(d_gap(x, d), operator_norm(x.projection() - d.projection()), 1e-12);
}

TEST(Metrics, ChordalMatchesGridOracle) {
  Rng rng(203);
  for (int t = 0; t < 20; ++t) {
    const int n = rng.integer(2, 6);
    const CVector p = rng.unit_vector(n), q = rng.unit_vector(n);
    // The grid spacing 2 pi / 1e5 bounds the oracle's excess by about 3e-5 squared.
    EXPECT_NEAR(d_chordal(Ray(p), Ray(q)), chordal_grid_oracle(p, q, 100000), 1e-8);
  }
}

TEST(Metrics, TriangleInequalities) {
  Rng rng(204);
  for (int t = 0; t < 2000; ++t) {
    const int n = rng.integer(2, 8);
    const Ray a(rng.vector(n)), b(rng.vector(n)), c(rng.vector(n));
    for (auto d : {d_chordal, d_fubini_study, d_gap}) {
      EXPECT_LE(d(a, c), d(a, b) + d(b, c) + 1e-12);
      EXPECT_NEAR(d(a, b), d(b, a), 1e-15);
    }
  }
}

TEST(Metrics, EquivalenceChains) {
  Rng rng(205);
  const double c = std::sqrt(2.0) * pi / 4;
  for (int t = 0; t < 10000; ++t) {
    const int n = rng.integer(2, 32);
    const Ray a(rng.vector(n)), b(rng.vector(n));
    const double chd = d_chordal(a, b), fs = d_fubini_study(a, b), gap = d_gap(a, b);
    ASSERT_LE(chd, fs + 1e-12);
    ASSERT_LE(fs, c * chd + 1e-12);
    ASSERT_LE(chd / std::sqrt(2.0), gap + 1e-12);
    ASSERT_LE(gap, chd + 1e-12);
  }
}

TEST(GapViaProjection, MatchesFormula) {
  EXPECT_NEAR(gap_via_projection(Ray(e(3, 0)), Ray(e(3, 2))), 1.0, 1e-14);
  Rng rng(206);
  for (int t = 0; t < 200; ++t) {
    const Ray a(rng.vector(16)), b(rng.vector(16));
    ASSERT_NEAR(gap_via_projection(a, b), d_gap(a, b), 1e-10);
    // Independent eigen-solve: P - Q has eigenvalues +-d_gap and zeros.
    const RVector ev = eigvalsh(a.projection() - b.projection());
    ASSERT_NEAR(std::max(-ev(0), ev(15)), d_gap(a, b), 1e-10);
  }
}

TEST(Charts, Examples) {
  Rng rng(207);
  const CVector psi = rng.unit_vector(4);
  const ChartPoint p = chart_forward(psi, Ray(psi));
  EXPECT_LE(p.tangent().norm(), 1e-14);
  const Ray back = chart_backward(ChartPoint(psi, CVector::Zero(4)));
  EXPECT_NEAR(ray_product(back, Ray(psi)), 1.0, 1e-14);
  EXPECT_EQ(error_of([] { chart_forward(e(2, 0), Ray(e(2, 1))); }), Errc::OrthogonalRay);
}

TEST(Charts, RoundTrips) {
  Rng rng(208);
  for (int t = 0; t < 500; ++t) {
    const int n = rng.integer(2, 10);
    const CVector psi = rng.unit_vector(n);
    const Ray l(rng.vector(n));
    if (ray_product(Ray(psi), l) < 1e-3) continue;
    const ChartPoint p = chart_forward(psi, l);
    EXPECT_NEAR(std::abs(inner(psi, p.tangent())), 0.0, 1e-10 * std::max(1.0, p.tangent().norm()));
    EXPECT_NEAR(ray_product(chart_backward(p), l), 1.0, 1e-10);

    CVector tangent = rng.vector(n);
    tangent -= inner(psi, tangent) * psi;
    const ChartPoint q(psi, tangent);
    const ChartPoint q2 = chart_forward(psi, chart_backward(q));
    EXPECT_LE((q2.tangent() - tangent).norm(), 1e-10 * std::max(1.0, tangent.norm()));
  }
}

TEST(PositiveSection, Examples) {
  Rng rng(209);
  const CVector psi = rng.unit_vector(3);
  EXPECT_LE((positive_section(psi, Ray(psi)) - psi).norm(), 1e-14);
  EXPECT_LE((positive_section(psi, Ray(-psi)) - psi).norm(), 1e-14);

  const CVector base = e(2, 0);
  CVector omega(2);
  omega << I_unit, 1.0;
  omega /= omega.norm();
  const CVector phi = positive_section(base, Ray(omega));
  const cplx h = inner(base, omega);
  EXPECT_LE((phi - std::conj(h) / std::abs(h) * omega).norm(), 1e-15);
  EXPECT_NEAR(inner(phi, base).imag(), 0.0, 1e-15);
  EXPECT_GT(inner(phi, base).real(), 0.0);
  EXPECT_EQ(error_of([] { positive_section(e(2, 0), Ray(e(2, 1))); }), Errc::OrthogonalRay);
}

TEST(PositiveSection, PhaseInvariance) {
  Rng rng(210);
  for (int t = 0; t < 200; ++t) {
    const int n = rng.integer(2, 8);
    const CVector psi = rng.unit_vector(n), omega = rng.unit_vector(n);
    const CVector a = positive_section(psi, Ray(omega));
    const CVector b = positive_section(psi, Ray(rng.phase() * omega));
    EXPECT_LE((a - b).norm(), 1e-12);
    EXPECT_NEAR(ray_product(Ray(psi), Ray(omega)), ray_product(Ray(rng.phase() * psi), Ray(omega)), 1e-12);
    EXPECT_NEAR(d_gap(Ray(psi), Ray(omega)), d_gap(Ray(rng.phase() * psi), Ray(rng.phase() * omega)), 1e-12);
  }
}

TEST(Bridge, Examples) {
  const CStarAlgebra m2 = CStarAlgebra::full_matrix(2);
  const PureState p = ray_to_pure(m2, 0, Ray(e(2, 0)));
  EXPECT_LE(operator_norm(p.to_state().density(0) - projector(e(2, 0))), 1e-15);
  EXPECT_NEAR(state_norm_distance(ray_to_pure(m2, 0, Ray(e(2, 0))).to_state(),
                                  ray_to_pure(m2, 0, Ray(e(2, 1))).to_state()),
              2.0, 1e-14);
  EXPECT_EQ(error_of([&] { ray_to_pure(m2, 0, Ray(e(3, 0))); }), Errc::DimensionMismatch);
}

TEST(Bridge, GapIsHalfStateDistance) {
  const CStarAlgebra alg({3, 5});
  Rng rng(211);
  for (int t = 0; t < 500; ++t) {
    const std::size_t k = static_cast<std::size_t>(rng.integer(0, 1));
    const int n = alg.block_dim(k);
    const Ray a(rng.vector(n)), b(rng.vector(n));
    const PureState pa = ray_to_pure(alg, k, a), pb = ray_to_pure(alg, k, b);
    const double dist = state_norm_distance(pa.to_state(), pb.to_state());
    ASSERT_NEAR(d_gap(a, b), 0.5 * dist, 1e-10);
    // Transition probability identity.
    const double p = ray_product(a, b);
    ASSERT_NEAR(p * p, 1.0 - 0.25 * dist * dist, 1e-10);
    // Vector-state continuity bound.
    ASSERT_LE(dist, 2.0 * (a.representative() - b.representative()).norm() + 1e-12);
    ASSERT_NEAR(ray_product(pure_to_ray(pa), a), 1.0, 1e-12);
  }
}

TEST(FubiniStudy, Examples) {
  const CStarAlgebra alg({2, 2});
  const PureState a(alg, 0, e(2, 0)), b(alg, 0, e(2, 1)), c(alg, 1, e(2, 0));
  EXPECT_NEAR(fs_geodesic_distance(a, a), 0.0, 1e-7);
  EXPECT_NEAR(fs_geodesic_distance(a, b), pi / 2, 1e-15);
  EXPECT_EQ(error_of([&] { fs_geodesic_distance(a, c); }), Errc::DifferentSectors);
  Rng rng(212);
  for (int t = 0; t < 100; ++t) {
    const CVector u = rng.unit_vector(2), v = rng.unit_vector(2);
    EXPECT_NEAR(fs_geodesic_distance(PureState(alg, 1, u), PureState(alg, 1, v)),
                std::acos(std::min(1.0, std::abs(u.dot(v)))), 1e-14);
  }
}
