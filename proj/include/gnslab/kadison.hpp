#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "projgeom.hpp"

namespace gnslab {

enum class Flavor { general, self_adjoint, unitary };

namespace detail {
inline CMatrix columns(const std::vector<CVector>& vs) {
  if (vs.empty()) return CMatrix();
  CMatrix m(vs.front().size(), static_cast<Eigen::Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = vs[i];
  return m;
}

/// Orthonormal basis of the column span of m, via SVD with a relative cutoff.
inline CMatrix range_basis(const CMatrix& m, double rel_tol) {
  if (m.cols() == 0) return CMatrix(m.rows(), 0);
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU);
  const RVector& s = svd.singularValues();
  Eigen::Index r = 0;
  const double cut = rel_tol * std::max(1.0, s.size() ? s(0) : 0.0);
  while (r < s.size() && s(r) > cut) ++r;
  return svd.matrixU().leftCols(r);
}

inline void require_orthonormal(const std::vector<CVector>& vs, double tol, const char* where) {
  const CMatrix m = columns(vs);
  if (m.size() == 0) return;
  const double defect = (m.adjoint() * m - identity(m.cols())).cwiseAbs().maxCoeff();
  if (defect > tol)
    throw Error(Errc::NotOrthonormal, std::string(where) + ": family is not orthonormal",
                std::nullopt, defect);
}

inline void require_unit_vector(const CVector& v, double tol, const char* where) {
  const double n = v.norm();
  if (std::abs(n - 1.0) > tol)
    throw Error(Errc::NotNormalized, std::string(where) + ": expected a unit vector", std::nullopt, n);
}
}  // namespace detail

/// T = sum_i z_i <x_i, .> for an orthonormal family x.
inline CMatrix bounded_interpolant(const std::vector<CVector>& xs, const std::vector<CVector>& zs,
                                   double orthonormal_tol = 1e-10) {
  if (xs.size() != zs.size() || xs.empty())
    throw Error(Errc::ShapeMismatch, "bounded_interpolant: need equally many, nonempty families");
  detail::require_orthonormal(xs, orthonormal_tol, "bounded_interpolant");
  return detail::columns(zs) * detail::columns(xs).adjoint();
}

/// Interpolation data x_i -> y_i in C^d.
struct InterpolationProblem {
  int hilbert_dim = 0;
  std::vector<CVector> xs;
  std::vector<CVector> ys;
  Flavor flavor = Flavor::general;

  void validate() const {
    if (hilbert_dim < 1) throw Error(Errc::InvalidArgument, "InterpolationProblem: dimension < 1");
    if (xs.size() != ys.size() || xs.empty())
      throw Error(Errc::ShapeMismatch, "InterpolationProblem: need equally many, nonempty families");
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i].size() != hilbert_dim || ys[i].size() != hilbert_dim)
        throw Error(Errc::DimensionMismatch, "InterpolationProblem: vector has wrong dimension", i);
      require_finite(xs[i], "InterpolationProblem");
      require_finite(ys[i], "InterpolationProblem");
    }
  }
};

struct KadisonSolution {
  AlgebraElement element;      // A in M_d
  CMatrix interpolant;         // T = sum z_i <e_i, .>
  CMatrix compressed;          // T0 = P T P
  std::vector<CVector> zs;     // z = Lambda y
  double residual = 0.0;       // max_i ||A x_i - y_i||
  double norm_a = 0.0;
  double norm_t = 0.0;
  double norm_t0 = 0.0;
  double lemma_bound = 0.0;    // sqrt(2n) max ||z_i||
};

/// U_{x,y}: z -> <y,x> z - <y,z> x + <x,z> y on span{x,y}, identity elsewhere.
inline CMatrix rotation_unitary(const CVector& x, const CVector& y,
                                const NumericPolicy& policy = default_policy()) {
  if (x.size() != y.size()) throw Error(Errc::DimensionMismatch, "rotation_unitary: size mismatch");
  detail::require_unit_vector(x, policy.orthogonal_ray, "rotation_unitary");
  detail::require_unit_vector(y, policy.orthogonal_ray, "rotation_unitary");
  const Eigen::Index d = x.size();
  CMatrix pk = projector(x);
  const CVector r = y - inner(x, y) * x;
  if (r.norm() > 1e-14) pk += projector(r / r.norm());
  return (identity(d) - pk) + inner(y, x) * pk - x * y.adjoint() + y * x.adjoint();
}

inline KadisonSolution kadison_solve(const InterpolationProblem& p,
                                     const NumericPolicy& policy = default_policy()) {
  p.validate();
  double scale = 1.0;
  for (const auto& x : p.xs) scale = std::max(scale, x.norm());
  const GramSchmidtResult gs = gram_schmidt(p.xs, policy.rank * scale);
  const CMatrix X = detail::columns(p.xs);
  const CMatrix Y = detail::columns(p.ys);
  const CMatrix E = X * gs.change.transpose();
  const CMatrix Z = Y * gs.change.transpose();
  const auto n = static_cast<Eigen::Index>(p.xs.size());
  const Eigen::Index d = p.hilbert_dim;

  CMatrix both(d, 2 * n);
  both << E, Z;
  const CMatrix K = detail::range_basis(both, 1e-12);
  const CMatrix P = K * K.adjoint();
  const CMatrix T = Z * E.adjoint();
  const CMatrix T0 = P * T * P;

  CMatrix A;
  switch (p.flavor) {
    case Flavor::general:
      A = T0;
      break;
    case Flavor::self_adjoint: {
      const CMatrix B = E.adjoint() * Z;
      const double skew = 0.5 * (B - B.adjoint()).norm();
      if (skew > policy.normalization)
        throw Error(Errc::NoSelfAdjointSolution, "kadison_solve: no Hermitian interpolant",
                    std::nullopt, skew);
      const CMatrix Bh = 0.5 * (B + B.adjoint());
      const CMatrix F = detail::range_basis((identity(d) - E * E.adjoint()) * Z, 1e-12);
      if (F.cols() == 0) {
        A = E * Bh * E.adjoint();
        break;
      }
      const CMatrix C = F.adjoint() * Z;
      CMatrix stacked(n + F.cols(), n);
      stacked << Bh, C;
      const double mu = operator_norm(stacked) * (1.0 + 1e-12);
      CMatrix D = CMatrix::Zero(F.cols(), F.cols());
      if (mu > 0.0) {
        // Hermitian norm-preserving completion D = -C B (mu^2 - B^2)^{-1} C*
        const EighResult eb = eigh(Bh);
        RVector w(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          const double b = eb.eigenvalues(i);
          w(i) = b / std::max(mu * mu - b * b, std::numeric_limits<double>::min());
        }
        const CMatrix mid = eb.eigenvectors * w.asDiagonal() * eb.eigenvectors.adjoint();
        D = -C * mid * C.adjoint();
      }
      CMatrix Q(d, n + F.cols());
      Q << E, F;
      CMatrix AK(n + F.cols(), n + F.cols());
      AK << Bh, C.adjoint(), C, D;
      A = Q * AK * Q.adjoint();
      A = 0.5 * (A + A.adjoint());
      break;
    }
    case Flavor::unitary: {
      const double gram = (X.adjoint() * X - Y.adjoint() * Y).cwiseAbs().maxCoeff();
      if (gram > policy.normalization)
        throw Error(Errc::NoUnitarySolution, "kadison_solve: Gram matrices differ", std::nullopt,
                    gram);
      CMatrix U = identity(d);
      for (Eigen::Index i = 0; i < n; ++i) {
        CVector cur = U * E.col(i);
        CVector target = Z.col(i);
        cur.normalize();
        target.normalize();
        U = rotation_unitary(cur, target, policy) * U;
      }
      A = U;
      break;
    }
  }

  KadisonSolution s{AlgebraElement(CStarAlgebra::full_matrix(static_cast<int>(d)), {A}),
                    T, T0, {}, 0.0, 0.0, 0.0, 0.0, 0.0};
  double zmax = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    s.zs.push_back(Z.col(i));
    zmax = std::max(zmax, Z.col(i).norm());
    s.residual = std::max(s.residual, (A * X.col(i) - Y.col(i)).norm());
  }
  s.norm_a = operator_norm(A);
  s.norm_t = operator_norm(T);
  s.norm_t0 = operator_norm(T0);
  s.lemma_bound = std::sqrt(2.0 * static_cast<double>(n)) * zmax;
  return s;
}

struct ExpFormResult {
  CMatrix generator;  // Hermitian S with unitary = exp(i S)
  CMatrix unitary;    // rotation after phase correction
};

/// Phase correction exp(i alpha P_x) followed by the rotation exp(i T) that
/// carries e^{i alpha} x to y inside span{x, y}.
inline ExpFormResult exp_form_unitary(const CVector& x, const CVector& y,
                                      const NumericPolicy& policy = default_policy()) {
  if (x.size() != y.size()) throw Error(Errc::DimensionMismatch, "exp_form_unitary: size mismatch");
  detail::require_unit_vector(x, policy.orthogonal_ray, "exp_form_unitary");
  detail::require_unit_vector(y, policy.orthogonal_ray, "exp_form_unitary");
  const cplx h = inner(x, y);
  const double cut_distance = h.real() <= 0.0 ? std::abs(h.imag()) : std::abs(h);
  if (cut_distance < policy.minus_one_gap)
    throw Error(Errc::BranchCut, "exp_form_unitary: <x,y> on the non-positive real axis",
                std::nullopt, cut_distance);

  const Eigen::Index d = x.size();
  const double alpha = std::arg(h);
  const CMatrix V = identity(d) + (std::polar(1.0, alpha) - 1.0) * projector(x);
  const CVector xp = std::polar(1.0, alpha) * x;
  const double c = std::clamp(inner(xp, y).real(), -1.0, 1.0);
  const double theta = std::acos(c);
  CMatrix R = identity(d);
  const CVector r = y - c * xp;
  if (r.norm() > 1e-14) {
    const CVector w = r / r.norm();
    R += (std::cos(theta) - 1.0) * (projector(xp) + projector(w)) +
         std::sin(theta) * (w * xp.adjoint() - xp * w.adjoint());
  }
  ExpFormResult out;
  out.unitary = R * V;
  const CMatrix s = -I_unit * matrix_log_principal(out.unitary, policy);
  out.generator = 0.5 * (s + s.adjoint());
  return out;
}

/// delta(eps, n) from the inductive proof: delta(eps,1) = eps,
/// delta(eps,n+1) = min(delta(eps/3,n), eps/3).
inline double stiefel_delta(double eps, std::size_t n) {
  if (n <= 1) return eps;
  return std::min(stiefel_delta(eps / 3.0, n - 1), eps / 3.0);
}

struct StiefelResult {
  CMatrix unitary;
  double delta = 0.0;     // admissible input distance
  double achieved = 0.0;  // ||I - U||
};

inline StiefelResult stiefel_transport(const std::vector<CVector>& xs, const std::vector<CVector>& ys,
                                       double eps, const NumericPolicy& policy = default_policy()) {
  if (xs.size() != ys.size() || xs.empty())
    throw Error(Errc::ShapeMismatch, "stiefel_transport: need equally many, nonempty families");
  if (!(eps > 0.0)) throw Error(Errc::InvalidArgument, "stiefel_transport: eps must be positive");
  detail::require_orthonormal(xs, 1e-10, "stiefel_transport");
  detail::require_orthonormal(ys, 1e-10, "stiefel_transport");
  const Eigen::Index d = xs.front().size();
  StiefelResult out{identity(d), stiefel_delta(eps, xs.size()), 0.0};
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    worst = std::max(worst, (xs[i] - ys[i]).norm());
    CVector z = out.unitary * xs[i];
    z.normalize();
    out.unitary = rotation_unitary(z, ys[i], policy) * out.unitary;
  }
  out.achieved = operator_norm(identity(d) - out.unitary);
  if (!(worst < out.delta))
    throw Error(Errc::TooFar, "stiefel_transport: inputs farther apart than delta(eps, n)",
                std::nullopt, out.achieved);
  return out;
}

/// Unitary element U with U . omega = psi, built from the positive-gauge
/// representative of psi relative to Omega.
inline AlgebraElement transport_unitary(const PureState& omega, const PureState& psi,
                                        const NumericPolicy& policy = default_policy()) {
  require_same_algebra(omega.algebra(), psi.algebra(), "transport_unitary");
  if (omega.block() != psi.block())
    throw Error(Errc::SectorMismatch, "transport_unitary: states lie in different blocks");
  const double dist = state_norm_distance(omega.to_state(), psi.to_state());
  if (!(dist < 2.0 - policy.antipodal))
    throw Error(Errc::Antipodal, "transport_unitary: states at distance 2", std::nullopt, dist);
  const CVector target = positive_section(omega.vector(), Ray(psi.vector()), policy);
  const ExpFormResult ef = exp_form_unitary(omega.vector(), target, policy);
  AlgebraElement u = AlgebraElement::unit(omega.algebra());
  std::vector<CMatrix> blocks = u.blocks();
  blocks[omega.block()] = ef.unitary;
  return {omega.algebra(), std::move(blocks)};
}

}  // namespace gnslab
