#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "numerics.hpp"

namespace gnslab {

/// Seeded source for every randomized sweep. Same seed, same stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  cplx complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }
  cplx phase() { return std::polar(1.0, uniform(-pi, pi)); }

  CMatrix gaussian(Eigen::Index rows, Eigen::Index cols) {
    CMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_normal();
    return m;
  }

  CVector vector(Eigen::Index n) { return gaussian(n, 1).col(0); }

  CVector unit_vector(Eigen::Index n) {
    CVector v = vector(n);
    return v / v.norm();
  }

  CMatrix hermitian(Eigen::Index n) {
    const CMatrix g = gaussian(n, n);
    return 0.5 * (g + g.adjoint());
  }

  /// Haar-distributed unitary: QR of a Ginibre matrix with R's diagonal phases removed.
  CMatrix unitary(Eigen::Index n) {
    const CMatrix g = gaussian(n, n);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = std::abs(r(j, j));
      if (a > 0.0) q.col(j) *= r(j, j) / a;
    }
    return q;
  }

  std::array<double, 3> sphere_point() {
    double x = normal(), y = normal(), z = normal();
    const double n = std::sqrt(x * x + y * y + z * z);
    return {x / n, y / n, z / n};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gnslab
