#pragma once

#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "numerics.hpp"

namespace gnslab {

/// Block algebra M_{n_1} (+) ... (+) M_{n_K}.
class CStarAlgebra {
 public:
  static constexpr std::size_t default_dimension_limit = 1u << 16;

  explicit CStarAlgebra(std::vector<int> block_dims,
                        std::size_t dimension_limit = default_dimension_limit)
      : dims_(std::move(block_dims)) {
    if (dims_.empty()) throw Error(Errc::InvalidArgument, "CStarAlgebra: no blocks");
    std::size_t total = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      if (dims_[k] < 1) throw Error(Errc::InvalidArgument, "CStarAlgebra: block size < 1", k);
      total += static_cast<std::size_t>(dims_[k]) * static_cast<std::size_t>(dims_[k]);
    }
    if (total > dimension_limit)
      throw Error(Errc::TooLarge, "CStarAlgebra: total dimension over limit", std::nullopt,
                  static_cast<double>(total));
  }

  static CStarAlgebra full_matrix(int n) { return CStarAlgebra({n}); }

  const std::vector<int>& block_dims() const { return dims_; }
  std::size_t block_count() const { return dims_.size(); }
  int block_dim(std::size_t k) const { return dims_.at(k); }

  /// Complex dimension sum n_k^2.
  int dimension() const {
    return std::accumulate(dims_.begin(), dims_.end(), 0, [](int s, int n) { return s + n * n; });
  }
  /// Dimension of the defining representation, sum n_k.
  int rep_dimension() const { return std::accumulate(dims_.begin(), dims_.end(), 0); }
  int block_offset(std::size_t k) const {
    return std::accumulate(dims_.begin(), dims_.begin() + static_cast<std::ptrdiff_t>(k), 0);
  }

  bool operator==(const CStarAlgebra&) const = default;

 private:
  std::vector<int> dims_;
};

inline void require_same_algebra(const CStarAlgebra& a, const CStarAlgebra& b, const char* where) {
  if (!(a == b)) throw Error(Errc::AlgebraMismatch, std::string(where) + ": different algebras");
}

class AlgebraElement {
 public:
  AlgebraElement(CStarAlgebra algebra, std::vector<CMatrix> blocks)
      : algebra_(std::move(algebra)), blocks_(std::move(blocks)) {
    if (blocks_.size() != algebra_.block_count())
      throw Error(Errc::ShapeMismatch, "AlgebraElement: wrong number of blocks");
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const int n = algebra_.block_dim(k);
      if (blocks_[k].rows() != n || blocks_[k].cols() != n)
        throw Error(Errc::ShapeMismatch, "AlgebraElement: block has wrong shape", k);
    }
  }

  static AlgebraElement zero(const CStarAlgebra& alg) {
    std::vector<CMatrix> b;
    for (int n : alg.block_dims()) b.push_back(CMatrix::Zero(n, n));
    return {alg, std::move(b)};
  }
  static AlgebraElement unit(const CStarAlgebra& alg) {
    std::vector<CMatrix> b;
    for (int n : alg.block_dims()) b.push_back(identity(n));
    return {alg, std::move(b)};
  }
  /// Matrix unit E_ij in block k.
  static AlgebraElement matrix_unit(const CStarAlgebra& alg, std::size_t k, int i, int j) {
    AlgebraElement e = zero(alg);
    e.blocks_.at(k)(i, j) = 1.0;
    return e;
  }
  /// Element equal to m in block k and zero elsewhere.
  static AlgebraElement in_block(const CStarAlgebra& alg, std::size_t k, const CMatrix& m) {
    AlgebraElement e = zero(alg);
    e.blocks_.at(k) = m;
    e = AlgebraElement(alg, e.blocks_);
    return e;
  }

  const CStarAlgebra& algebra() const { return algebra_; }
  const std::vector<CMatrix>& blocks() const { return blocks_; }
  const CMatrix& block(std::size_t k) const { return blocks_.at(k); }

  AlgebraElement adjoint() const {
    std::vector<CMatrix> b;
    for (const auto& m : blocks_) b.push_back(m.adjoint());
    return {algebra_, std::move(b)};
  }

  /// Block-diagonal assembly in the defining representation.
  CMatrix to_dense() const {
    const int d = algebra_.rep_dimension();
    CMatrix out = CMatrix::Zero(d, d);
    int off = 0;
    for (const auto& m : blocks_) {
      out.block(off, off, m.rows(), m.cols()) = m;
      off += static_cast<int>(m.rows());
    }
    return out;
  }

  friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
    return a.zip(b, [](const CMatrix& x, const CMatrix& y) { return CMatrix(x + y); });
  }
  friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
    return a.zip(b, [](const CMatrix& x, const CMatrix& y) { return CMatrix(x - y); });
  }
  friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
    return a.zip(b, [](const CMatrix& x, const CMatrix& y) { return CMatrix(x * y); });
  }
  friend AlgebraElement operator*(cplx s, const AlgebraElement& a) {
    std::vector<CMatrix> b;
    for (const auto& m : a.blocks_) b.push_back(s * m);
    return {a.algebra_, std::move(b)};
  }

 private:
  template <class F>
  AlgebraElement zip(const AlgebraElement& o, F f) const {
    require_same_algebra(algebra_, o.algebra_, "AlgebraElement");
    std::vector<CMatrix> b;
    for (std::size_t k = 0; k < blocks_.size(); ++k) b.push_back(f(blocks_[k], o.blocks_[k]));
    return {algebra_, std::move(b)};
  }

  CStarAlgebra algebra_;
  std::vector<CMatrix> blocks_;
};

/// Normalized positive functional, stored as one density part per block.
class State {
 public:
  State(CStarAlgebra algebra, std::vector<CMatrix> densities,
        const NumericPolicy& policy = default_policy())
      : algebra_(std::move(algebra)), densities_(std::move(densities)) {
    if (densities_.size() != algebra_.block_count())
      throw Error(Errc::ShapeMismatch, "State: wrong number of blocks");
    double trace = 0.0;
    for (std::size_t k = 0; k < densities_.size(); ++k) {
      const CMatrix& rho = densities_[k];
      const int n = algebra_.block_dim(k);
      if (rho.rows() != n || rho.cols() != n)
        throw Error(Errc::ShapeMismatch, "State: density has wrong shape", k);
      require_hermitian(rho, policy, "State");
      const RVector ev = eigvalsh(rho, policy);
      if (ev(0) < -policy.psd)
        throw Error(Errc::InvalidArgument, "State: density is not positive", k, ev(0));
      trace += rho.trace().real();
    }
    if (std::abs(trace - 1.0) > policy.trace)
      throw Error(Errc::NotNormalized, "State: total trace is not 1", std::nullopt, trace);
  }

  const CStarAlgebra& algebra() const { return algebra_; }
  const std::vector<CMatrix>& densities() const { return densities_; }
  const CMatrix& density(std::size_t k) const { return densities_.at(k); }

 private:
  CStarAlgebra algebra_;
  std::vector<CMatrix> densities_;
};

/// Vector state of a unit vector living in a single block.
class PureState {
 public:
  PureState(CStarAlgebra algebra, std::size_t block, CVector vector,
            const NumericPolicy& policy = default_policy())
      : algebra_(std::move(algebra)), block_(block), vector_(std::move(vector)) {
    if (block_ >= algebra_.block_count())
      throw Error(Errc::InvalidArgument, "PureState: block index out of range", block_);
    if (vector_.size() != algebra_.block_dim(block_))
      throw Error(Errc::DimensionMismatch, "PureState: vector has wrong dimension", block_);
    require_finite(vector_, "PureState");
    const double n = vector_.norm();
    if (std::abs(n - 1.0) > policy.orthonormality)
      throw Error(Errc::NotNormalized, "PureState: vector is not a unit vector", std::nullopt, n);
  }

  const CStarAlgebra& algebra() const { return algebra_; }
  std::size_t block() const { return block_; }
  const CVector& vector() const { return vector_; }

  State to_state() const {
    std::vector<CMatrix> d;
    for (std::size_t k = 0; k < algebra_.block_count(); ++k) {
      const int n = algebra_.block_dim(k);
      d.push_back(k == block_ ? projector(vector_) : CMatrix::Zero(n, n));
    }
    return {algebra_, std::move(d)};
  }

 private:
  CStarAlgebra algebra_;
  std::size_t block_;
  CVector vector_;
};

/// delta(A) = i[h, A] blockwise.
class Derivation {
 public:
  Derivation(CStarAlgebra algebra, std::vector<CMatrix> generators,
             const NumericPolicy& policy = default_policy())
      : algebra_(std::move(algebra)), generators_(std::move(generators)) {
    if (generators_.size() != algebra_.block_count())
      throw Error(Errc::ShapeMismatch, "Derivation: wrong number of blocks");
    for (std::size_t k = 0; k < generators_.size(); ++k) {
      if (generators_[k].rows() != algebra_.block_dim(k))
        throw Error(Errc::ShapeMismatch, "Derivation: generator has wrong shape", k);
      require_hermitian(generators_[k], policy, "Derivation");
    }
  }

  const CStarAlgebra& algebra() const { return algebra_; }
  const std::vector<CMatrix>& generators() const { return generators_; }

  AlgebraElement apply(const AlgebraElement& a) const {
    require_same_algebra(algebra_, a.algebra(), "Derivation::apply");
    std::vector<CMatrix> b;
    for (std::size_t k = 0; k < generators_.size(); ++k) {
      const CMatrix& h = generators_[k];
      b.push_back(I_unit * (h * a.block(k) - a.block(k) * h));
    }
    return {algebra_, std::move(b)};
  }

 private:
  CStarAlgebra algebra_;
  std::vector<CMatrix> generators_;
};

/// A -> u A u* with one unitary per block.
class InnerAutomorphism {
 public:
  InnerAutomorphism(CStarAlgebra algebra, std::vector<CMatrix> unitaries,
                    const NumericPolicy& policy = default_policy())
      : algebra_(std::move(algebra)), unitaries_(std::move(unitaries)) {
    if (unitaries_.size() != algebra_.block_count())
      throw Error(Errc::ShapeMismatch, "InnerAutomorphism: wrong number of blocks");
    for (std::size_t k = 0; k < unitaries_.size(); ++k) {
      const CMatrix& u = unitaries_[k];
      if (u.rows() != algebra_.block_dim(k) || u.cols() != algebra_.block_dim(k))
        throw Error(Errc::ShapeMismatch, "InnerAutomorphism: unitary has wrong shape", k);
      require_finite(u, "InnerAutomorphism");
      const double defect = unitarity_defect(u);
      if (defect > policy.hermiticity)
        throw Error(Errc::InvalidArgument, "InnerAutomorphism: block is not unitary", k, defect);
    }
  }

  static InnerAutomorphism identity_of(const CStarAlgebra& alg) {
    std::vector<CMatrix> u;
    for (int n : alg.block_dims()) u.push_back(identity(n));
    return {alg, std::move(u)};
  }

  const CStarAlgebra& algebra() const { return algebra_; }
  const std::vector<CMatrix>& unitaries() const { return unitaries_; }
  const CMatrix& unitary(std::size_t k) const { return unitaries_.at(k); }

  AlgebraElement apply(const AlgebraElement& a) const {
    require_same_algebra(algebra_, a.algebra(), "InnerAutomorphism::apply");
    std::vector<CMatrix> b;
    for (std::size_t k = 0; k < unitaries_.size(); ++k)
      b.push_back(unitaries_[k] * a.block(k) * unitaries_[k].adjoint());
    return {algebra_, std::move(b)};
  }

  InnerAutomorphism inverse() const {
    std::vector<CMatrix> u;
    for (const auto& m : unitaries_) u.push_back(m.adjoint());
    return {algebra_, std::move(u)};
  }

  /// Push-forward omega o alpha^{-1}.
  State push_forward(const State& s) const {
    require_same_algebra(algebra_, s.algebra(), "InnerAutomorphism::push_forward");
    std::vector<CMatrix> d;
    for (std::size_t k = 0; k < unitaries_.size(); ++k)
      d.push_back(unitaries_[k] * s.density(k) * unitaries_[k].adjoint());
    return {algebra_, std::move(d)};
  }

  PureState push_forward(const PureState& s) const {
    require_same_algebra(algebra_, s.algebra(), "InnerAutomorphism::push_forward");
    CVector v = unitaries_[s.block()] * s.vector();
    v.normalize();
    return {algebra_, s.block(), std::move(v)};
  }

 private:
  CStarAlgebra algebra_;
  std::vector<CMatrix> unitaries_;
};

inline double element_norm(const AlgebraElement& a) {
  double n = 0.0;
  for (const auto& m : a.blocks()) n = std::max(n, operator_norm(m));
  return n;
}

inline cplx evaluate(const State& s, const AlgebraElement& a) {
  require_same_algebra(s.algebra(), a.algebra(), "evaluate");
  cplx v = 0.0;
  for (std::size_t k = 0; k < a.blocks().size(); ++k)
    v += (s.density(k).transpose().cwiseProduct(a.block(k))).sum();
  return v;
}

inline cplx evaluate(const PureState& s, const AlgebraElement& a) {
  require_same_algebra(s.algebra(), a.algebra(), "evaluate");
  return inner(s.vector(), a.block(s.block()) * s.vector());
}

/// ||s1 - s2|| in the dual norm, sum of blockwise trace norms.
inline double state_norm_distance(const State& s1, const State& s2) {
  require_same_algebra(s1.algebra(), s2.algebra(), "state_norm_distance");
  double d = 0.0;
  for (std::size_t k = 0; k < s1.densities().size(); ++k)
    d += trace_norm(s1.density(k) - s2.density(k));
  return d;
}

struct PurityResult {
  bool pure = false;
  std::optional<PureState> state;
};

inline PurityResult is_pure(const State& s, double tol) {
  std::optional<std::size_t> support;
  for (std::size_t k = 0; k < s.densities().size(); ++k) {
    if (s.density(k).trace().real() > tol) {
      if (support) return {};
      support = k;
    }
  }
  if (!support) return {};
  const EighResult e = eigh(s.density(*support));
  const auto n = e.eigenvalues.size();
  if (n > 1 && e.eigenvalues(n - 2) >= tol) return {};
  CVector v = e.eigenvectors.col(n - 1);
  v.normalize();
  return {true, PureState(s.algebra(), *support, std::move(v))};
}

/// State A -> <v, A v> for v in the defining representation (+)_k C^{n_k}.
inline State vector_state(const CStarAlgebra& alg, const CVector& v) {
  if (v.size() != alg.rep_dimension())
    throw Error(Errc::DimensionMismatch, "vector_state: vector has wrong dimension");
  require_finite(v, "vector_state");
  const double n = v.norm();
  if (n == 0.0) throw Error(Errc::ZeroVector, "vector_state: zero vector");
  const CVector u = v / n;
  std::vector<CMatrix> d;
  for (std::size_t k = 0; k < alg.block_count(); ++k)
    d.push_back(projector(u.segment(alg.block_offset(k), alg.block_dim(k))));
  return {alg, std::move(d)};
}

/// The state A -> omega(b* A b), defined when omega(b* b) = 1.
inline State quasi_local_perturbation(const State& s, const AlgebraElement& b,
                                      const NumericPolicy& policy = default_policy()) {
  const cplx norm = evaluate(s, b.adjoint() * b);
  if (std::abs(norm - 1.0) > policy.normalization)
    throw Error(Errc::NotNormalized, "quasi_local_perturbation: omega(b*b) != 1", std::nullopt,
                std::abs(norm));
  std::vector<CMatrix> d;
  for (std::size_t k = 0; k < s.densities().size(); ++k) {
    const CMatrix m = b.block(k) * s.density(k) * b.block(k).adjoint() / norm.real();
    d.push_back(0.5 * (m + m.adjoint()));
  }
  return {s.algebra(), std::move(d), policy};
}

/// exp(t delta) as the inner automorphism Ad(exp(i t h)).
inline InnerAutomorphism exp_derivation(const Derivation& d, double t) {
  std::vector<CMatrix> u;
  for (const auto& h : d.generators()) u.push_back(matrix_exp(cplx(0.0, t) * h));
  return {d.algebra(), std::move(u)};
}

/// i(I - u)(I + u)^{-1}
inline AlgebraElement cayley(const AlgebraElement& u, const NumericPolicy& policy = default_policy()) {
  std::vector<CMatrix> b;
  for (std::size_t k = 0; k < u.blocks().size(); ++k) {
    const CMatrix& m = u.block(k);
    const CMatrix id = identity(m.rows());
    const double dist = operator_norm(id - m);
    if (!(dist < 2.0 - policy.minus_one_gap))
      throw Error(Errc::SpectrumAtMinusOne, "cayley: -1 in the spectrum", k, dist);
    const CMatrix inv = (id + m).partialPivLu().inverse();
    b.push_back(I_unit * (id - m) * inv);
  }
  return {u.algebra(), std::move(b)};
}

/// (iI - a)(iI + a)^{-1}
inline AlgebraElement cayley_inverse(const AlgebraElement& a,
                                     const NumericPolicy& policy = default_policy()) {
  std::vector<CMatrix> b;
  for (std::size_t k = 0; k < a.blocks().size(); ++k) {
    const CMatrix& m = a.block(k);
    require_hermitian(m, policy, "cayley_inverse");
    const CMatrix iid = I_unit * identity(m.rows());
    b.push_back((iid - m) * (iid + m).partialPivLu().inverse());
  }
  return {a.algebra(), std::move(b)};
}

}  // namespace gnslab
