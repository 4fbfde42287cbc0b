#pragma once

#include <array>
#include <cmath>

#include "numerics.hpp"

namespace gnslab::spin {

using Vec3 = std::array<double, 3>;

inline CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
inline CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0.0, cplx(0, -1), cplx(0, 1), 0.0;
  return m;
}
inline CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec3& a, const Vec3& b) {
  return norm(Vec3{a[0] - b[0], a[1] - b[1], a[2] - b[2]});
}

inline Vec3 from_angles(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

/// r . sigma
inline CMatrix hamiltonian(const Vec3& r) {
  CMatrix h(2, 2);
  h << r[2], cplx(r[0], -r[1]), cplx(r[0], r[1]), -r[2];
  return h;
}

/// Lowest eigenvector of r . sigma, phase-fixed by eigh.
inline CVector ground_vector(const Vec3& r) { return eigh(hamiltonian(r)).eigenvectors.col(0); }

/// Closed-form ground vector valid away from the south pole.
inline CVector ground_vector_north_chart(const Vec3& r) {
  CVector v(2);
  if (r[2] <= -1.0) {
    v << 1.0, 0.0;
    return v;
  }
  const double s = std::sqrt(2.0 + 2.0 * r[2]);
  v << cplx(-r[0], r[1]) / s, (r[2] + 1.0) / s;
  return v;
}

/// Closed-form ground vector valid away from the north pole.
inline CVector ground_vector_south_chart(const Vec3& r) {
  CVector v(2);
  if (r[2] >= 1.0) {
    v << 0.0, 1.0;
    return v;
  }
  const double s = std::sqrt(2.0 - 2.0 * r[2]);
  v << (r[2] - 1.0) / s, cplx(r[0], r[1]) / s;
  return v;
}

}  // namespace gnslab::spin
