#pragma once

#include <algorithm>
#include <cmath>

#include "algebra.hpp"

namespace gnslab {

/// Complex line C.Psi, stored through an arbitrary unit representative.
class Ray {
 public:
  explicit Ray(const CVector& v) {
    require_finite(v, "Ray");
    const double n = v.norm();
    if (n == 0.0) throw Error(Errc::ZeroVector, "Ray: zero vector");
    rep_ = v / n;
  }

  const CVector& representative() const { return rep_; }
  Eigen::Index dimension() const { return rep_.size(); }
  CMatrix projection() const { return projector(rep_); }

 private:
  CVector rep_;
};

/// Point of the chart centred at `base`: a tangent vector orthogonal to it.
class ChartPoint {
 public:
  ChartPoint(CVector base, CVector tangent, const NumericPolicy& policy = default_policy())
      : base_(std::move(base)), tangent_(std::move(tangent)) {
    if (base_.size() != tangent_.size())
      throw Error(Errc::DimensionMismatch, "ChartPoint: base and tangent differ in dimension");
    const double overlap = std::abs(inner(base_, tangent_));
    if (overlap > policy.orthogonal_ray * std::max(1.0, tangent_.norm()))
      throw Error(Errc::InvalidArgument, "ChartPoint: tangent not orthogonal to base",
                  std::nullopt, overlap);
  }

  const CVector& base() const { return base_; }
  const CVector& tangent() const { return tangent_; }

 private:
  CVector base_;
  CVector tangent_;
};

namespace detail {
inline void require_same_dim(const Ray& k, const Ray& l, const char* where) {
  if (k.dimension() != l.dimension())
    throw Error(Errc::DimensionMismatch, std::string(where) + ": rays differ in dimension");
}
inline void require_unit(const CVector& v, const NumericPolicy& policy, const char* where) {
  const double n = v.norm();
  if (std::abs(n - 1.0) > policy.orthogonal_ray)
    throw Error(Errc::NotNormalized, std::string(where) + ": expected a unit vector", std::nullopt,
                n);
}
}  // namespace detail

/// |<Psi, Omega>| for unit representatives.
inline double ray_product(const Ray& k, const Ray& l) {
  detail::require_same_dim(k, l, "ray_product");
  return std::min(1.0, std::abs(inner(k.representative(), l.representative())));
}

inline double d_chordal(const Ray& k, const Ray& l) {
  return std::sqrt(std::max(0.0, 2.0 * (1.0 - ray_product(k, l))));
}

inline double d_fubini_study(const Ray& k, const Ray& l) { return std::acos(ray_product(k, l)); }

inline double d_gap(const Ray& k, const Ray& l) {
  const double p = ray_product(k, l);
  return std::sqrt(std::max(0.0, (1.0 - p) * (1.0 + p)));
}

inline double gap_via_projection(const Ray& k, const Ray& l) {
  detail::require_same_dim(k, l, "gap_via_projection");
  return operator_norm(k.projection() - l.projection());
}

/// tau_Psi(C.Omega) = Omega / <Psi, Omega> - Psi
inline ChartPoint chart_forward(const CVector& base, const Ray& l,
                                const NumericPolicy& policy = default_policy()) {
  detail::require_unit(base, policy, "chart_forward");
  if (base.size() != l.dimension())
    throw Error(Errc::DimensionMismatch, "chart_forward: dimension mismatch");
  const CVector& omega = l.representative();
  const cplx h = inner(base, omega);
  if (std::abs(h) <= policy.orthogonal_ray)
    throw Error(Errc::OrthogonalRay, "chart_forward: ray orthogonal to the chart centre",
                std::nullopt, std::abs(h));
  CVector t = omega / h - base;
  t -= inner(base, t) * base;
  return {base, std::move(t), policy};
}

/// tau_Psi^{-1}(Phi) = C(Phi + Psi)
inline Ray chart_backward(const ChartPoint& p) { return Ray(p.tangent() + p.base()); }

/// The representative Phi of l with <Phi, Psi> > 0.
inline CVector positive_section(const CVector& psi, const Ray& l,
                                const NumericPolicy& policy = default_policy()) {
  if (psi.size() != l.dimension())
    throw Error(Errc::DimensionMismatch, "positive_section: dimension mismatch");
  const CVector& omega = l.representative();
  const cplx h = inner(psi, omega);
  const double a = std::abs(h);
  if (a <= policy.orthogonal_ray)
    throw Error(Errc::OrthogonalRay, "positive_section: ray orthogonal to the section centre",
                std::nullopt, a);
  return (std::conj(h) / a) * omega;
}

inline PureState ray_to_pure(const CStarAlgebra& alg, std::size_t block, const Ray& l) {
  if (block >= alg.block_count() || alg.block_dim(block) != l.dimension())
    throw Error(Errc::DimensionMismatch, "ray_to_pure: ray does not fit the block", block);
  return {alg, block, l.representative()};
}

inline Ray pure_to_ray(const PureState& ps) { return Ray(ps.vector()); }

inline double fs_geodesic_distance(const PureState& a, const PureState& b) {
  require_same_algebra(a.algebra(), b.algebra(), "fs_geodesic_distance");
  if (a.block() != b.block())
    throw Error(Errc::DifferentSectors, "fs_geodesic_distance: states lie in different blocks");
  return d_fubini_study(pure_to_ray(a), pure_to_ray(b));
}

}  // namespace gnslab
