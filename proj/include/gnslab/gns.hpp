#pragma once

#include <cstddef>
#include <vector>

#include "projgeom.hpp"

namespace gnslab {

/// Coordinates of an element in the matrix-unit basis, ordered (block, row, col).
inline CVector to_coordinates(const AlgebraElement& a) {
  CVector c(a.algebra().dimension());
  Eigen::Index pos = 0;
  for (const auto& m : a.blocks())
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) c(pos++) = m(i, j);
  return c;
}

inline AlgebraElement from_coordinates(const CStarAlgebra& alg, const CVector& c) {
  if (c.size() != alg.dimension())
    throw Error(Errc::DimensionMismatch, "from_coordinates: wrong coordinate count");
  std::vector<CMatrix> blocks;
  Eigen::Index pos = 0;
  for (int n : alg.block_dims()) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = c(pos++);
    blocks.push_back(std::move(m));
  }
  return {alg, std::move(blocks)};
}

/// All matrix units in coordinate order.
inline std::vector<AlgebraElement> matrix_unit_basis(const CStarAlgebra& alg) {
  std::vector<AlgebraElement> out;
  for (std::size_t k = 0; k < alg.block_count(); ++k)
    for (int i = 0; i < alg.block_dim(k); ++i)
      for (int j = 0; j < alg.block_dim(k); ++j) out.push_back(AlgebraElement::matrix_unit(alg, k, i, j));
  return out;
}

/// G_ab = omega(b_a* b_b) over the matrix units; for units in one block
/// this is delta_{il} rho(m, j).
inline CMatrix gram_form(const State& s) {
  const CStarAlgebra& alg = s.algebra();
  const int dim = alg.dimension();
  CMatrix g = CMatrix::Zero(dim, dim);
  int off = 0;
  for (std::size_t k = 0; k < alg.block_count(); ++k) {
    const int n = alg.block_dim(k);
    const CMatrix& rho = s.density(k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m) g(off + i * n + j, off + i * n + m) = rho(m, j);
    off += n * n;
  }
  return g;
}

struct GNSData {
  CStarAlgebra algebra;
  State state;
  std::vector<AlgebraElement> ideal_basis;  // Frobenius-orthonormal
  int hilbert_dim = 0;
  CMatrix quotient;                         // hilbert_dim x dim(A), acts on coordinates
  std::vector<AlgebraElement> lifts;        // quotient(lifts[a]) = e_a
  std::vector<CMatrix> basis_rep;           // pi(matrix unit) in coordinate order
  CVector cyclic;

  CVector quotient_of(const AlgebraElement& a) const { return quotient * to_coordinates(a); }

  CMatrix rep(const AlgebraElement& a) const {
    const CVector c = to_coordinates(a);
    CMatrix out = CMatrix::Zero(hilbert_dim, hilbert_dim);
    for (Eigen::Index i = 0; i < c.size(); ++i)
      if (c(i) != cplx(0.0)) out += c(i) * basis_rep[static_cast<std::size_t>(i)];
    return out;
  }
};

namespace detail {
struct GramSplit {
  CMatrix kernel;     // columns spanning the null space
  CMatrix positive;   // eigenvectors of the positive part
  RVector values;     // matching positive eigenvalues
};

inline GramSplit split_gram(const State& s, const NumericPolicy& policy) {
  const EighResult e = eigh(gram_form(s), policy);
  const double top = std::max(1.0, e.eigenvalues.cwiseAbs().maxCoeff());
  const double cut = policy.rank * top;
  Eigen::Index nk = 0;
  while (nk < e.eigenvalues.size() && e.eigenvalues(nk) <= cut) ++nk;
  const Eigen::Index np = e.eigenvalues.size() - nk;
  return {e.eigenvectors.leftCols(nk), e.eigenvectors.rightCols(np), e.eigenvalues.tail(np)};
}
}  // namespace detail

inline std::vector<AlgebraElement> gelfand_ideal(const State& s,
                                                 const NumericPolicy& policy = default_policy()) {
  const detail::GramSplit split = detail::split_gram(s, policy);
  std::vector<AlgebraElement> out;
  for (Eigen::Index c = 0; c < split.kernel.cols(); ++c)
    out.push_back(from_coordinates(s.algebra(), split.kernel.col(c)));
  return out;
}

inline GNSData gns_construct(const State& s, const NumericPolicy& policy = default_policy()) {
  const CStarAlgebra& alg = s.algebra();
  const detail::GramSplit split = detail::split_gram(s, policy);
  GNSData g{alg, s, {}, static_cast<int>(split.values.size()), {}, {}, {}, {}};

  for (Eigen::Index c = 0; c < split.kernel.cols(); ++c)
    g.ideal_basis.push_back(from_coordinates(alg, split.kernel.col(c)));

  const RVector root = split.values.cwiseSqrt();
  g.quotient = root.asDiagonal() * split.positive.adjoint();
  CMatrix lift_coords = split.positive * root.cwiseInverse().asDiagonal();
  for (Eigen::Index a = 0; a < lift_coords.cols(); ++a)
    g.lifts.push_back(from_coordinates(alg, lift_coords.col(a)));

  for (const auto& unit : matrix_unit_basis(alg)) {
    CMatrix p(g.hilbert_dim, g.hilbert_dim);
    for (int a = 0; a < g.hilbert_dim; ++a)
      p.col(a) = g.quotient_of(unit * g.lifts[static_cast<std::size_t>(a)]);
    g.basis_rep.push_back(std::move(p));
  }
  g.cyclic = g.quotient_of(AlgebraElement::unit(alg));
  return g;
}

/// Dimension of {X : [pi(A), X] = 0 for all A}, from a generating set of
/// matrix units (superdiagonal units plus E_00 in every block).
inline int commutant_dimension(const GNSData& g, std::size_t max_hilbert_dim = 32) {
  const int d = g.hilbert_dim;
  if (static_cast<std::size_t>(d) > max_hilbert_dim)
    throw Error(Errc::TooLarge, "commutant_dimension: representation too large", std::nullopt, d);
  const CStarAlgebra& alg = g.algebra;
  std::vector<AlgebraElement> gens;
  for (std::size_t k = 0; k < alg.block_count(); ++k) {
    gens.push_back(AlgebraElement::matrix_unit(alg, k, 0, 0));
    for (int i = 0; i + 1 < alg.block_dim(k); ++i) {
      gens.push_back(AlgebraElement::matrix_unit(alg, k, i, i + 1));
      gens.push_back(AlgebraElement::matrix_unit(alg, k, i + 1, i));
    }
  }
  const CMatrix id = identity(d);
  CMatrix normal = CMatrix::Zero(d * d, d * d);
  for (const auto& gen : gens) {
    const CMatrix p = g.rep(gen);
    CMatrix k(d * d, d * d);
    // vec(PX - XP) = (I (x) P - P^T (x) I) vec(X), column-major vec
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        k.block(a * d, b * d, d, d) = (a == b ? p : CMatrix::Zero(d, d)) - p(b, a) * id;
    normal += k.adjoint() * k;
  }
  const RVector ev = eigvalsh(normal);
  const double cut = 1e-8 * std::max(1.0, ev.maxCoeff());
  int nullity = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) <= cut) ++nullity;
  return nullity;
}

/// || a - proj_span(basis) a || in Frobenius coordinates; basis must be orthonormal.
inline double subspace_residual(const std::vector<AlgebraElement>& basis, const AlgebraElement& a) {
  CVector c = to_coordinates(a);
  for (const auto& b : basis) {
    const CVector bc = to_coordinates(b);
    c -= inner(bc, c) * bc;
  }
  return c.norm();
}

/// Images of the matrix units under an inner automorphism.
inline std::vector<AlgebraElement> automorphism_images(const InnerAutomorphism& alpha) {
  std::vector<AlgebraElement> out;
  for (const auto& unit : matrix_unit_basis(alpha.algebra())) out.push_back(alpha.apply(unit));
  return out;
}

/// Recovers block unitaries from the images of the matrix units. The map
/// must keep every block in place and be a *-homomorphism on unit pairs.
inline InnerAutomorphism automorphism_to_unitaries(const CStarAlgebra& alg,
                                                   const std::vector<AlgebraElement>& images,
                                                   double tol = 1e-8) {
  const auto units = matrix_unit_basis(alg);
  if (images.size() != units.size())
    throw Error(Errc::ShapeMismatch, "automorphism_to_unitaries: need one image per matrix unit");
  for (const auto& im : images) require_same_algebra(alg, im.algebra(), "automorphism_to_unitaries");

  struct Index { std::size_t k; int i, j; };
  std::vector<Index> idx;
  std::vector<std::size_t> start;
  for (std::size_t k = 0; k < alg.block_count(); ++k) {
    start.push_back(idx.size());
    for (int i = 0; i < alg.block_dim(k); ++i)
      for (int j = 0; j < alg.block_dim(k); ++j) idx.push_back({k, i, j});
  }
  auto pos = [&](std::size_t k, int i, int j) {
    return start[k] + static_cast<std::size_t>(i * alg.block_dim(k) + j);
  };

  for (std::size_t a = 0; a < images.size(); ++a) {
    for (std::size_t q = 0; q < alg.block_count(); ++q) {
      if (q == idx[a].k) continue;
      const double leak = operator_norm(images[a].block(q));
      if (leak > tol)
        throw Error(Errc::NotBlockPreserving, "automorphism_to_unitaries: image leaves its block", a,
                    leak);
    }
  }

  const AlgebraElement zero = AlgebraElement::zero(alg);
  for (std::size_t a = 0; a < images.size(); ++a) {
    const auto [k, i, j] = idx[a];
    const double adj = element_norm(images[a].adjoint() - images[pos(k, j, i)]);
    if (adj > tol)
      throw Error(Errc::NotMultiplicative, "automorphism_to_unitaries: adjoint not preserved", a, adj);
    for (std::size_t b = 0; b < images.size(); ++b) {
      const auto [k2, l, m] = idx[b];
      const AlgebraElement expect = (k == k2 && j == l) ? images[pos(k, i, m)] : zero;
      const double r = element_norm(images[a] * images[b] - expect);
      if (r > tol)
        throw Error(Errc::NotMultiplicative, "automorphism_to_unitaries: product not preserved", a, r);
    }
  }

  std::vector<CMatrix> us;
  for (std::size_t k = 0; k < alg.block_count(); ++k) {
    const int n = alg.block_dim(k);
    const CMatrix p00 = images[pos(k, 0, 0)].block(k);
    const EighResult e = eigh(0.5 * (p00 + p00.adjoint()));
    CVector w = e.eigenvectors.col(n - 1);
    if (std::abs(w(0)) > tol) w *= std::conj(w(0)) / std::abs(w(0));
    CMatrix u(n, n);
    for (int i = 0; i < n; ++i) u.col(i) = images[pos(k, i, 0)].block(k) * w;
    us.push_back(std::move(u));
  }
  return {alg, std::move(us)};
}

struct IntertwinerResult {
  CVector phi;              // positive-gauge representative of alpha_* omega
  CMatrix unitary;          // U with U (A Omega) = alpha(A) Phi
  double diagram_residual;  // max over matrix units of that identity
};

/// U(alpha, Omega, Psi) for an inner automorphism, pure states realized in
/// the defining representation of their block.
inline IntertwinerResult intertwiner(const InnerAutomorphism& alpha, const PureState& omega,
                                     const PureState& psi,
                                     const NumericPolicy& policy = default_policy()) {
  require_same_algebra(alpha.algebra(), omega.algebra(), "intertwiner");
  require_same_algebra(alpha.algebra(), psi.algebra(), "intertwiner");
  const PureState pushed = alpha.push_forward(omega);
  if (pushed.block() != psi.block())
    throw Error(Errc::SectorMismatch, "intertwiner: alpha_* omega and psi lie in different blocks");
  const double dist = state_norm_distance(pushed.to_state(), psi.to_state());
  if (!(dist < 2.0 - policy.antipodal))
    throw Error(Errc::Antipodal, "intertwiner: states at distance 2", std::nullopt, dist);

  const std::size_t k = psi.block();
  const CMatrix& u = alpha.unitary(k);
  const CVector uo = u * omega.vector();
  const cplx h = inner(psi.vector(), uo);
  const cplx c = std::conj(h) / std::abs(h);
  IntertwinerResult r{positive_section(psi.vector(), Ray(uo), policy), c * u, 0.0};

  const int n = alpha.algebra().block_dim(k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const AlgebraElement e = AlgebraElement::matrix_unit(alpha.algebra(), k, i, j);
      const CVector lhs = r.unitary * (e.block(k) * omega.vector());
      const CVector rhs = alpha.apply(e).block(k) * r.phi;
      r.diagram_residual = std::max(r.diagram_residual, (lhs - rhs).norm());
    }
  return r;
}

}  // namespace gnslab
