#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "error.hpp"
#include "policy.hpp"

namespace gnslab {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I_unit{0.0, 1.0};

/// <a, b> with the first slot antilinear.
inline cplx inner(const CVector& a, const CVector& b) { return a.dot(b); }

inline CMatrix projector(const CVector& v) { return v * v.adjoint(); }

inline CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

template <class Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* where) {
  if (!m.allFinite()) throw Error(Errc::NonFinite, std::string(where) + ": non-finite entry");
}

inline void require_square(const CMatrix& m, const char* where) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(Errc::ShapeMismatch, std::string(where) + ": expected a non-empty square matrix");
}

inline RVector singular_values(const CMatrix& m) {
  if (m.size() == 0) return RVector();
  return Eigen::BDCSVD<CMatrix>(m).singularValues();
}

inline double operator_norm(const CMatrix& m) {
  require_finite(m, "operator_norm");
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

inline double trace_norm(const CMatrix& m) {
  require_finite(m, "trace_norm");
  return singular_values(m).sum();
}

/// ||m - m*|| relative to ||m||; zero for the zero matrix.
inline double hermiticity_defect(const CMatrix& m) {
  require_finite(m, "hermiticity_defect");
  if ((m - m.adjoint()).norm() == 0.0) return 0.0;
  const double scale = operator_norm(m);
  if (scale == 0.0) return 0.0;
  return operator_norm(m - m.adjoint()) / scale;
}

inline double unitarity_defect(const CMatrix& u) {
  return operator_norm(u.adjoint() * u - identity(u.cols()));
}

inline void require_hermitian(const CMatrix& m, const NumericPolicy& policy, const char* where) {
  require_square(m, where);
  require_finite(m, where);
  const double defect = hermiticity_defect(m);
  if (defect > policy.hermiticity)
    throw Error(Errc::NotHermitian, std::string(where) + ": matrix is not Hermitian", std::nullopt,
                defect);
}

/// Multiplies v by the phase that makes its largest-modulus entry real
/// positive. Ties go to the lowest index.
inline void fix_phase(Eigen::Ref<CVector> v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (best_abs > 0.0) v *= std::conj(v(best)) / best_abs;
}

struct EighResult {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // columns, phase-fixed
};

inline EighResult eigh(const CMatrix& m, const NumericPolicy& policy = default_policy()) {
  require_hermitian(m, policy, "eigh");
  const CMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw Error(Errc::NonFinite, "eigh: solver failed");
  EighResult out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index j = 0; j < out.eigenvectors.cols(); ++j) fix_phase(out.eigenvectors.col(j));
  return out;
}

inline RVector eigvalsh(const CMatrix& m, const NumericPolicy& policy = default_policy()) {
  require_hermitian(m, policy, "eigvalsh");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

struct GramSchmidtResult {
  std::vector<CVector> basis;  // e_i
  CMatrix change;              // lower triangular, e_i = sum_j change(i, j) v_j
};

/// Classical Gram-Schmidt with one re-orthogonalization pass. Inputs are
/// processed in the given order; a residual norm below `tol` aborts with
/// the index of the offending input.
inline GramSchmidtResult gram_schmidt(const std::vector<CVector>& vs, double tol) {
  if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "gram_schmidt: tol must be positive");
  const auto n = static_cast<Eigen::Index>(vs.size());
  GramSchmidtResult out;
  out.change = CMatrix::Zero(n, n);
  if (n == 0) return out;
  const Eigen::Index dim = vs.front().size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const CVector& v = vs[static_cast<std::size_t>(i)];
    if (v.size() != dim) throw Error(Errc::DimensionMismatch, "gram_schmidt: ragged input", i);
    require_finite(v, "gram_schmidt");
    CVector w = v;
    Eigen::RowVectorXcd coeff = Eigen::RowVectorXcd::Zero(n);
    coeff(i) = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < i; ++j) {
        const cplx h = inner(out.basis[static_cast<std::size_t>(j)], w);
        w -= h * out.basis[static_cast<std::size_t>(j)];
        coeff -= h * out.change.row(j);
      }
    }
    const double r = w.norm();
    if (r < tol)
      throw Error(Errc::LinearlyDependent, "gram_schmidt: input depends on its predecessors",
                  static_cast<std::size_t>(i), r);
    out.basis.push_back(w / r);
    out.change.row(i) = coeff / r;
  }
  return out;
}

/// Unitary factor U of m = U|m|.
inline CMatrix polar_unitary(const CMatrix& m, const NumericPolicy& policy = default_policy()) {
  require_square(m, "polar_unitary");
  require_finite(m, "polar_unitary");
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smax > 0.0) || smin < policy.rank * smax)
    throw Error(Errc::RankDeficient, "polar_unitary: matrix is numerically singular", std::nullopt,
                smax > 0.0 ? smin / smax : 0.0);
  return svd.matrixU() * svd.matrixV().adjoint();
}

inline CMatrix matrix_exp(const CMatrix& m) {
  require_square(m, "matrix_exp");
  require_finite(m, "matrix_exp");
  return m.exp();
}

/// Principal logarithm of a unitary. The spectrum has to stay at least
/// policy.minus_one_gap away from -1.
inline CMatrix matrix_log_principal(const CMatrix& u, const NumericPolicy& policy = default_policy()) {
  require_square(u, "matrix_log_principal");
  require_finite(u, "matrix_log_principal");
  Eigen::ComplexSchur<CMatrix> schur(u);
  const CMatrix& t = schur.matrixT();
  const CMatrix& z = schur.matrixU();
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < t.rows(); ++i) gap = std::min(gap, std::abs(t(i, i) + 1.0));
  if (gap < policy.minus_one_gap)
    throw Error(Errc::SpectrumAtMinusOne, "matrix_log_principal: eigenvalue at -1", std::nullopt,
                gap);
  const double off = t.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().norm();
  if (off > 1e-10 * std::max(1.0, t.norm())) return u.log();
  CVector logs(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i) logs(i) = std::log(t(i, i));
  return z * logs.asDiagonal() * z.adjoint();
}

}  // namespace gnslab
