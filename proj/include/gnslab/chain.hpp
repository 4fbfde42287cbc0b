#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "io.hpp"
#include "spin.hpp"

namespace gnslab {

using Site = std::vector<int>;

/// The first `count` sites of Z^d, ordered by l-infinity shell and then
/// lexicographically inside a shell.
inline std::vector<Site> enumerate_sites(int d, std::size_t count) {
  if (d < 1) throw Error(Errc::InvalidArgument, "enumerate_sites: dimension < 1");
  std::vector<Site> out;
  for (int shell = 0; out.size() < count; ++shell) {
    Site s(static_cast<std::size_t>(d), -shell);
    while (true) {
      int m = 0;
      for (int c : s) m = std::max(m, std::abs(c));
      if (m == shell) {
        out.push_back(s);
        if (out.size() == count) break;
      }
      int pos = d - 1;
      while (pos >= 0 && s[static_cast<std::size_t>(pos)] == shell) {
        s[static_cast<std::size_t>(pos)] = -shell;
        --pos;
      }
      if (pos < 0) break;
      ++s[static_cast<std::size_t>(pos)];
    }
  }
  return out;
}

/// Finite window of a field r : Z^d -> S^2.
class FieldConfig {
 public:
  FieldConfig(std::vector<Site> sites, std::vector<spin::Vec3> field)
      : sites_(std::move(sites)), field_(std::move(field)) {
    if (sites_.size() != field_.size())
      throw Error(Errc::ShapeMismatch, "FieldConfig: one field value per site required");
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      if (!sites_.empty() && sites_[i].size() != sites_.front().size())
        throw Error(Errc::DimensionMismatch, "FieldConfig: sites of different dimension", i);
      if (std::abs(spin::norm(field_[i]) - 1.0) > 1e-12)
        throw Error(Errc::NotNormalized, "FieldConfig: field value is not a unit vector", i,
                    spin::norm(field_[i]));
      if (!index_.emplace(sites_[i], i).second)
        throw Error(Errc::InvalidArgument, "FieldConfig: repeated site", i);
    }
  }

  static FieldConfig constant(int d, std::size_t count, const spin::Vec3& r) {
    return {enumerate_sites(d, count), std::vector<spin::Vec3>(count, r)};
  }

  const std::vector<Site>& sites() const { return sites_; }
  const std::vector<spin::Vec3>& field() const { return field_; }
  std::size_t size() const { return sites_.size(); }
  std::optional<std::size_t> find(const Site& s) const {
    const auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<Site> sites_;
  std::vector<spin::Vec3> field_;
  std::map<Site, std::size_t> index_;
};

/// Omega = tensor product of the per-site ground vectors of r_v . sigma.
class ProductGroundState {
 public:
  explicit ProductGroundState(FieldConfig config) : config_(std::move(config)) {
    for (std::size_t i = 0; i < config_.size(); ++i) {
      const spin::Vec3& r = config_.field()[i];
      CVector g = spin::ground_vector(r);
      const double res = (spin::hamiltonian(r) * g + g).norm();
      if (res > 1e-10) throw Error(Errc::NonFinite, "ProductGroundState: eigen-residual", i, res);
      factors_.push_back(std::move(g));
    }
  }

  const FieldConfig& config() const { return config_; }
  const std::vector<CVector>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }

  /// Dense 2^N vector, site q on bit q.
  CVector dense() const {
    const std::size_t n = size();
    CVector out(Eigen::Index(1) << n);
    for (Eigen::Index idx = 0; idx < out.size(); ++idx) {
      cplx amp = 1.0;
      for (std::size_t q = 0; q < n; ++q) amp *= factors_[q]((idx >> q) & 1);
      out(idx) = amp;
    }
    return out;
  }

 private:
  FieldConfig config_;
  std::vector<CVector> factors_;
};

/// Linear combination of simple tensors sum_t c_t (x)_{v in supp t} A_{t,v}.
class LocalOperator {
 public:
  struct Term {
    cplx coefficient = 1.0;
    std::map<Site, Eigen::Matrix2cd> factors;
  };

  LocalOperator() = default;
  explicit LocalOperator(std::vector<Term> terms) : terms_(std::move(terms)) {}

  static LocalOperator identity() { return LocalOperator({Term{}}); }
  static LocalOperator single_site(const Site& s, const Eigen::Matrix2cd& m) {
    Term t;
    t.factors.emplace(s, m);
    return LocalOperator({t});
  }

  const std::vector<Term>& terms() const { return terms_; }
  void add(Term t) { terms_.push_back(std::move(t)); }

  std::vector<Site> support() const {
    std::vector<Site> out;
    for (const auto& t : terms_)
      for (const auto& [s, m] : t.factors)
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::vector<Term> terms_;
};

inline Eigen::Matrix2cd to_matrix2(const CMatrix& m) {
  if (m.rows() != 2 || m.cols() != 2) throw Error(Errc::ShapeMismatch, "expected a 2x2 matrix");
  return m;
}

namespace detail {
inline std::size_t site_index(const FieldConfig& c, const Site& s) {
  const auto i = c.find(s);
  if (!i) throw Error(Errc::SupportOutsideLattice, "local operator acts outside the lattice window");
  return *i;
}

/// y = A x on (C^2)^{(x) N}, matrix-free.
inline CVector apply_dense(const FieldConfig& c, const LocalOperator& a, const CVector& x) {
  CVector y = CVector::Zero(x.size());
  for (const auto& t : a.terms()) {
    CVector cur = x;
    for (const auto& [s, m] : t.factors) {
      const std::size_t q = site_index(c, s);
      const Eigen::Index bit = Eigen::Index(1) << q;
      for (Eigen::Index idx = 0; idx < cur.size(); ++idx) {
        if (idx & bit) continue;
        const cplx a0 = cur(idx), a1 = cur(idx | bit);
        cur(idx) = m(0, 0) * a0 + m(0, 1) * a1;
        cur(idx | bit) = m(1, 0) * a0 + m(1, 1) * a1;
      }
    }
    y += t.coefficient * cur;
  }
  return y;
}

/// H_{r,Lambda} x = sum_v (r_v . sigma)_v x
inline CVector apply_hamiltonian(const FieldConfig& c, const CVector& x) {
  CVector y = CVector::Zero(x.size());
  for (std::size_t q = 0; q < c.size(); ++q) {
    const CMatrix h = spin::hamiltonian(c.field()[q]);
    const Eigen::Index bit = Eigen::Index(1) << q;
    for (Eigen::Index idx = 0; idx < x.size(); ++idx) {
      if (idx & bit) continue;
      const cplx a0 = x(idx), a1 = x(idx | bit);
      y(idx) += h(0, 0) * a0 + h(0, 1) * a1;
      y(idx | bit) += h(1, 0) * a0 + h(1, 1) * a1;
    }
  }
  return y;
}

inline void require_dense_size(std::size_t n, std::size_t limit, const char* where) {
  if (n > limit)
    throw Error(Errc::TooLarge, std::string(where) + ": lattice window too large for a dense build",
                std::nullopt, static_cast<double>(n));
}

inline void require_same_sites(const FieldConfig& a, const FieldConfig& b, const char* where) {
  if (a.sites() != b.sites()) throw Error(Errc::SiteMismatch, std::string(where) + ": different site sets");
}
}  // namespace detail

inline constexpr std::size_t dense_site_limit = 12;

/// sup_v ||r_v - r'_v||
inline double interaction_distance(const FieldConfig& a, const FieldConfig& b) {
  detail::require_same_sites(a, b, "interaction_distance");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, spin::distance(a.field()[i], b.field()[i]));
  return d;
}

/// omega(A) = sum_t c_t prod_v <Psi_v, A_{t,v} Psi_v>
inline cplx expectation(const ProductGroundState& s, const LocalOperator& a) {
  cplx total = 0.0;
  for (const auto& t : a.terms()) {
    cplx prod = t.coefficient;
    for (const auto& [site, m] : t.factors) {
      const CVector& psi = s.factors()[detail::site_index(s.config(), site)];
      prod *= psi.dot(m * psi);
    }
    total += prod;
  }
  return total;
}

struct LocalDistance {
  double exact = 0.0;  // ||omega - omega'|| = 2 sqrt(1 - |<Omega, Omega'>|^2)
  double bound = 0.0;  // 2 sum_v min_lambda ||Psi_v - lambda Psi'_v||
  bool bound_holds = true;
};

inline LocalDistance local_state_distance(const ProductGroundState& a, const ProductGroundState& b) {
  detail::require_same_sites(a.config(), b.config(), "local_state_distance");
  cplx overlap = 1.0;
  LocalDistance d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const cplx h = a.factors()[i].dot(b.factors()[i]);
    overlap *= h;
    d.bound += 2.0 * std::sqrt(std::max(0.0, 2.0 - 2.0 * std::abs(h)));
  }
  d.exact = 2.0 * std::sqrt(std::max(0.0, 1.0 - std::norm(overlap)));
  d.bound_holds = d.exact <= d.bound + 1e-12;
  return d;
}

/// -i omega_r(A* delta_r(A)) = <A Omega, [H, A] Omega>, evaluated densely.
inline double ground_state_inequality(const ProductGroundState& s, const LocalOperator& a) {
  detail::require_dense_size(s.size(), dense_site_limit, "ground_state_inequality");
  const FieldConfig& c = s.config();
  const CVector omega = s.dense();
  const CVector a_omega = detail::apply_dense(c, a, omega);
  const CVector h_a_omega = detail::apply_hamiltonian(c, a_omega);
  const CVector a_h_omega = detail::apply_dense(c, a, detail::apply_hamiltonian(c, omega));
  return (a_omega.dot(h_a_omega) - a_omega.dot(a_h_omega)).real();
}

struct SpectralGap {
  double ground_energy = 0.0;
  double gap = 0.0;
  int multiplicity = 0;
};

inline CMatrix dense_hamiltonian(const FieldConfig& c) {
  detail::require_dense_size(c.size(), dense_site_limit, "dense_hamiltonian");
  const Eigen::Index dim = Eigen::Index(1) << c.size();
  CMatrix h = CMatrix::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    CVector e = CVector::Zero(dim);
    e(col) = 1.0;
    h.col(col) = detail::apply_hamiltonian(c, e);
  }
  return h;
}

inline SpectralGap spectral_gap(const FieldConfig& c, double degeneracy_tol = 1e-8) {
  const RVector ev = eigvalsh(dense_hamiltonian(c));
  SpectralGap g{ev(0), 0.0, 0};
  Eigen::Index i = 0;
  while (i < ev.size() && ev(i) - ev(0) <= degeneracy_tol) ++i;
  g.multiplicity = static_cast<int>(i);
  g.gap = i < ev.size() ? ev(i) - ev(0) : 0.0;
  return g;
}

struct SectorWitness {
  double expected = 0.0;             // |1 - r.s|
  std::vector<double> values;        // per truncation size 0..m
  double max_deviation = 0.0;        // max |value - expected|
};

/// For each window Lambda of the first L sites (L = 0..m) evaluates H_r at
/// site number L, outside Lambda, in the constant-r and constant-s states.
inline SectorWitness sector_witness(const spin::Vec3& r, const spin::Vec3& s, std::size_t m, int d = 1) {
  SectorWitness w;
  w.expected = std::abs(1.0 - spin::dot(r, s));
  const ProductGroundState wr(FieldConfig::constant(d, m + 1, r));
  const ProductGroundState ws(FieldConfig::constant(d, m + 1, s));
  const Eigen::Matrix2cd hr = spin::hamiltonian(r);
  for (std::size_t L = 0; L <= m; ++L) {
    const LocalOperator op = LocalOperator::single_site(wr.config().sites()[L], hr);
    const double v = std::abs(expectation(wr, op) - expectation(ws, op));
    w.values.push_back(v);
    w.max_deviation = std::max(w.max_deviation, std::abs(v - w.expected));
  }
  return w;
}

struct TruncationRow {
  std::size_t sites;
  double exact;
  double bound;
};

/// Distance between the states of two fields restricted to the first
/// 1..max_sites sites.
inline std::vector<TruncationRow> distance_vs_truncation(const FieldConfig& a, const FieldConfig& b,
                                                         std::size_t max_sites) {
  detail::require_same_sites(a, b, "distance_vs_truncation");
  max_sites = std::min(max_sites, a.size());
  std::vector<TruncationRow> out;
  for (std::size_t n = 1; n <= max_sites; ++n) {
    std::vector<Site> sites(a.sites().begin(), a.sites().begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<spin::Vec3> fa(a.field().begin(), a.field().begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<spin::Vec3> fb(b.field().begin(), b.field().begin() + static_cast<std::ptrdiff_t>(n));
    const LocalDistance d = local_state_distance(ProductGroundState(FieldConfig(sites, fa)),
                                                 ProductGroundState(FieldConfig(sites, fb)));
    out.push_back({n, d.exact, d.bound});
  }
  return out;
}

inline std::string truncation_csv(const std::vector<TruncationRow>& rows) {
  std::string out = "sites,exact,bound\n";
  for (const auto& r : rows) out += std::to_string(r.sites) + "," + io::num(r.exact) + "," + io::num(r.bound) + "\n";
  return out;
}

inline std::string truncation_svg(const std::vector<TruncationRow>& rows) {
  const double w = 600, h = 360, margin = 40;
  io::Svg svg(w, h);
  double ymax = 2.0;
  for (const auto& r : rows) ymax = std::max(ymax, std::min(r.bound, 8.0));
  const double n = rows.empty() ? 1.0 : static_cast<double>(rows.back().sites);
  auto px = [&](double x) { return margin + (x - 1.0) / std::max(1.0, n - 1.0) * (w - 2 * margin); };
  auto py = [&](double y) { return h - margin - std::min(y, ymax) / ymax * (h - 2 * margin); };
  svg.line(margin, h - margin, w - margin, h - margin, "black");
  svg.line(margin, margin, margin, h - margin, "black");
  std::vector<std::pair<double, double>> exact, bound;
  for (const auto& r : rows) {
    exact.emplace_back(px(static_cast<double>(r.sites)), py(r.exact));
    bound.emplace_back(px(static_cast<double>(r.sites)), py(r.bound));
  }
  svg.polyline(exact, "#1f4e9c");
  svg.polyline(bound, "#c0392b");
  svg.text(margin, 20, "state distance (blue) and site-sum bound (red) vs window size");
  return svg.str();
}

}  // namespace gnslab
