#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gns.hpp"
#include "io.hpp"
#include "kadison.hpp"
#include "spin.hpp"

namespace gnslab {

/// Latitude/longitude lattice on S^2 with the two poles as extra vertices.
/// Quads between neighbouring rings, triangle fans closing each cap.
class SphereGrid {
 public:
  struct Plaquette {
    std::vector<std::size_t> loop;  // counter-clockwise seen from outside
    double theta, phi;              // centre, for output
    double d_theta, d_phi;          // extent, for output
  };

  SphereGrid(int n_theta, int n_phi) : n_theta_(n_theta), n_phi_(n_phi) {
    if (n_theta < 1 || n_phi < 3)
      throw Error(Errc::InvalidArgument, "SphereGrid: need n_theta >= 1 and n_phi >= 3");
  }

  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  double theta(int i) const { return (i + 0.5) * pi / n_theta_; }
  double phi(int j) const { return 2.0 * pi * j / n_phi_; }

  std::size_t vertex_count() const { return static_cast<std::size_t>(n_theta_ * n_phi_) + 2; }
  std::size_t index(int i, int j) const {
    const int jj = ((j % n_phi_) + n_phi_) % n_phi_;
    return static_cast<std::size_t>(i * n_phi_ + jj);
  }
  std::size_t north() const { return static_cast<std::size_t>(n_theta_ * n_phi_); }
  std::size_t south() const { return north() + 1; }

  spin::Vec3 point(std::size_t v) const {
    if (v == north()) return {0.0, 0.0, 1.0};
    if (v == south()) return {0.0, 0.0, -1.0};
    const int i = static_cast<int>(v) / n_phi_;
    const int j = static_cast<int>(v) % n_phi_;
    return spin::from_angles(theta(i), phi(j));
  }

  std::vector<Plaquette> plaquettes() const {
    std::vector<Plaquette> out;
    const double dphi = 2.0 * pi / n_phi_;
    const double dth = pi / n_theta_;
    for (int j = 0; j < n_phi_; ++j)
      out.push_back({{north(), index(0, j), index(0, j + 1)}, 0.25 * dth, phi(j) + 0.5 * dphi,
                     0.5 * dth, dphi});
    for (int i = 0; i + 1 < n_theta_; ++i)
      for (int j = 0; j < n_phi_; ++j)
        out.push_back({{index(i, j), index(i + 1, j), index(i + 1, j + 1), index(i, j + 1)},
                       theta(i) + 0.5 * dth, phi(j) + 0.5 * dphi, dth, dphi});
    const int last = n_theta_ - 1;
    for (int j = 0; j < n_phi_; ++j)
      out.push_back({{index(last, j), south(), index(last, j + 1)}, pi - 0.25 * dth,
                     phi(j) + 0.5 * dphi, 0.5 * dth, dphi});
    return out;
  }

  /// Vertices, distinct undirected edges and faces of the plaquette tiling.
  std::array<std::size_t, 3> euler_counts() const {
    const auto faces = plaquettes();
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& f : faces)
      for (std::size_t a = 0; a < f.loop.size(); ++a) {
        std::size_t u = f.loop[a], w = f.loop[(a + 1) % f.loop.size()];
        if (u > w) std::swap(u, w);
        edges.insert({u, w});
      }
    return {vertex_count(), edges.size(), faces.size()};
  }

 private:
  int n_theta_, n_phi_;
};

/// One unit vector in C^2 per grid vertex; each defines a pure state on M_2.
struct StateSection {
  SphereGrid grid;
  std::vector<CVector> vectors;

  PureState pure_state(std::size_t v) const {
    return {CStarAlgebra::full_matrix(2), 0, vectors.at(v)};
  }
};

inline StateSection ground_section(const SphereGrid& grid) {
  StateSection s{grid, {}};
  s.vectors.reserve(grid.vertex_count());
  for (std::size_t v = 0; v < grid.vertex_count(); ++v) {
    const spin::Vec3 r = grid.point(v);
    CVector g = spin::ground_vector(r);
    const double res = (spin::hamiltonian(r) * g + g).norm();
    if (res > 1e-10)
      throw Error(Errc::NonFinite, "ground_section: eigen-residual too large", v, res);
    s.vectors.push_back(std::move(g));
  }
  return s;
}

struct ChernField {
  std::vector<double> curvature;  // per plaquette, in (-pi, pi]
  double total = 0.0;             // sum F / 2 pi
  int chern = 0;
  double integrality = 0.0;       // |total - chern|
  double max_abs_curvature = 0.0;
  double min_link = 1.0;
};

/// Plaquette field strength of the p-th tensor power of the line bundle
/// spanned by the section, links (<a,b>/|<a,b>|)^p.
inline ChernField chern_field(const StateSection& s, int power,
                              const NumericPolicy& policy = default_policy()) {
  ChernField f;
  const auto faces = s.grid.plaquettes();
  f.curvature.reserve(faces.size());
  double sum = 0.0;
  for (std::size_t q = 0; q < faces.size(); ++q) {
    const auto& loop = faces[q].loop;
    cplx prod = 1.0;
    for (std::size_t a = 0; a < loop.size(); ++a) {
      const cplx h = inner(s.vectors[loop[a]], s.vectors[loop[(a + 1) % loop.size()]]);
      const double m = std::abs(h);
      f.min_link = std::min(f.min_link, m);
      if (m <= policy.link)
        throw Error(Errc::VanishingLink, "chern_number: vanishing link, grid too coarse", q, m);
      prod *= std::polar(1.0, power * std::arg(h));
    }
    const double phase = std::arg(std::conj(prod));
    if (std::abs(phase) >= pi - policy.curvature_margin)
      throw Error(Errc::CurvatureSaturated, "chern_number: plaquette phase near pi", q, phase);
    f.max_abs_curvature = std::max(f.max_abs_curvature, std::abs(phase));
    f.curvature.push_back(phase);
    sum += phase;
  }
  f.total = sum / (2.0 * pi);
  f.chern = static_cast<int>(std::lround(f.total));
  f.integrality = std::abs(f.total - f.chern);
  if (f.integrality > 1e-9)
    throw Error(Errc::CurvatureSaturated, "chern_number: curvature sum is not integral",
                std::nullopt, f.integrality);
  return f;
}

inline int chern_number(const StateSection& s, int power,
                        const NumericPolicy& policy = default_policy()) {
  return chern_field(s, power, policy).chern;
}

inline std::string curvature_csv(const SphereGrid& grid, const ChernField& f) {
  std::string out = "theta,phi,F\n";
  const auto faces = grid.plaquettes();
  for (std::size_t q = 0; q < faces.size(); ++q)
    out += io::num(faces[q].theta) + "," + io::num(faces[q].phi) + "," + io::num(f.curvature[q]) + "\n";
  return out;
}

/// Equirectangular heatmap of F per unit area, colour scale symmetric around 0.
inline std::string curvature_svg(const SphereGrid& grid, const ChernField& f) {
  const double w = 720.0, h = 360.0, margin = 30.0;
  io::Svg svg(w + 2 * margin, h + 2 * margin + 20);
  const auto faces = grid.plaquettes();
  std::vector<double> density(faces.size());
  double scale = 0.0;
  for (std::size_t q = 0; q < faces.size(); ++q) {
    const double area = faces[q].d_phi * (std::cos(faces[q].theta - 0.5 * faces[q].d_theta) -
                                          std::cos(faces[q].theta + 0.5 * faces[q].d_theta));
    density[q] = f.curvature[q] / area;
    scale = std::max(scale, std::abs(density[q]));
  }
  if (scale == 0.0) scale = 1.0;
  for (std::size_t q = 0; q < faces.size(); ++q) {
    const double x = margin + (faces[q].phi - 0.5 * faces[q].d_phi) / (2 * pi) * w;
    const double y = margin + (faces[q].theta - 0.5 * faces[q].d_theta) / pi * h;
    svg.rect(x, y, faces[q].d_phi / (2 * pi) * w + 0.05, faces[q].d_theta / pi * h + 0.05,
             io::diverging_color(density[q] / scale));
  }
  svg.text(margin, h + 2 * margin + 10,
           "curvature per area, phi horizontal, theta vertical; total = " + io::num(f.total));
  return svg.str();
}

/// Three unit vectors whose Bloch vectors sit 120 degrees apart on the equator.
inline std::vector<CVector> default_chart_centers() {
  std::vector<CVector> out;
  for (int k = 0; k < 3; ++k) out.push_back(spin::ground_vector(spin::from_angles(pi / 2, 2 * pi * k / 3)));
  return out;
}

struct CocycleTable {
  std::vector<CVector> centers;
  std::vector<std::vector<std::optional<CVector>>> sections;  // [point][chart], P_{v, rho}
  double cocycle_residual = 0.0;   // max |h_vw h_wu - h_vu| over triple overlaps
  double relation_residual = 0.0;  // max ||P_v - conj(h_vw) P_w|| over overlaps
  std::size_t triple_overlaps = 0;

  std::optional<cplx> h(std::size_t point, std::size_t v, std::size_t w) const {
    const auto& pv = sections.at(point).at(v);
    const auto& pw = sections.at(point).at(w);
    if (!pv || !pw) return std::nullopt;
    return inner(*pv, *pw);
  }
};

inline CocycleTable tautological_cocycle(const StateSection& s, const std::vector<CVector>& centers,
                                         const NumericPolicy& policy = default_policy()) {
  CocycleTable t{centers, {}, 0.0, 0.0, 0};
  const std::size_t nc = centers.size();
  for (std::size_t p = 0; p < s.vectors.size(); ++p) {
    const Ray ray(s.vectors[p]);
    std::vector<std::optional<CVector>> row(nc);
    bool covered = false;
    for (std::size_t v = 0; v < nc; ++v) {
      if (ray_product(Ray(centers[v]), ray) > policy.chart_overlap) {
        row[v] = positive_section(centers[v], ray, policy);
        covered = true;
      }
    }
    if (!covered) throw Error(Errc::UncoveredPoint, "tautological_cocycle: point in no chart", p);
    t.sections.push_back(std::move(row));
    for (std::size_t v = 0; v < nc; ++v)
      for (std::size_t w = 0; w < nc; ++w) {
        const auto hvw = t.h(p, v, w);
        if (!hvw) continue;
        const auto& sp = t.sections[p];
        t.relation_residual = std::max(t.relation_residual, (*sp[v] - std::conj(*hvw) * *sp[w]).norm());
        for (std::size_t u = 0; u < nc; ++u) {
          const auto hwu = t.h(p, w, u);
          if (!hwu) continue;
          t.cocycle_residual = std::max(t.cocycle_residual, std::abs(*hvw * *hwu - *t.h(p, v, u)));
          ++t.triple_overlaps;
        }
      }
  }
  return t;
}

struct TransitionRecord {
  std::size_t point, v, w;
  CMatrix unitary;  // U_{v,rho} U_{w,rho}^{-1} via the intertwiner
  cplx expected;    // conj(h_vw)
};

struct TransitionReport {
  std::vector<TransitionRecord> records;
  double intertwiner_residual = 0.0;  // max ||U - conj(h) I|| via gns.intertwiner
  double gns_residual = 0.0;          // same for the explicit GNS unitaries
  double cech_residual = 0.0;         // max ||U_vw U_wu - U_vu||
};

/// Transition unitaries of the fibrewise GNS bundle over chart overlaps,
/// built twice: through the intertwiner for the identity automorphism, and
/// from the GNS quotient as A + N -> A P_v.
inline TransitionReport gns_bundle_transitions(const StateSection& s,
                                               const std::vector<CVector>& centers,
                                               const NumericPolicy& policy = default_policy()) {
  const CocycleTable table = tautological_cocycle(s, centers, policy);
  const CStarAlgebra m2 = CStarAlgebra::full_matrix(2);
  const InnerAutomorphism id = InnerAutomorphism::identity_of(m2);
  const std::size_t nc = centers.size();
  TransitionReport rep;
  for (std::size_t p = 0; p < s.vectors.size(); ++p) {
    const auto& sec = table.sections[p];
    const GNSData g = gns_construct(s.pure_state(p).to_state(), policy);
    std::vector<std::optional<CMatrix>> to_fixed(nc);
    for (std::size_t v = 0; v < nc; ++v) {
      if (!sec[v]) continue;
      CMatrix u(2, g.hilbert_dim);
      for (int a = 0; a < g.hilbert_dim; ++a) u.col(a) = g.lifts[static_cast<std::size_t>(a)].block(0) * *sec[v];
      to_fixed[v] = std::move(u);
    }
    std::vector<std::vector<std::optional<CMatrix>>> u_vw(nc, std::vector<std::optional<CMatrix>>(nc));
    for (std::size_t v = 0; v < nc; ++v)
      for (std::size_t w = 0; w < nc; ++w) {
        if (!sec[v] || !sec[w]) continue;
        const PureState omega(m2, 0, *sec[w]);
        const PureState psi(m2, 0, centers[v]);
        const IntertwinerResult it = intertwiner(id, omega, psi, policy);
        const cplx expected = std::conj(*table.h(p, v, w));
        const CMatrix scalar = expected * identity(2);
        rep.intertwiner_residual = std::max(rep.intertwiner_residual, operator_norm(it.unitary - scalar));
        const CMatrix via_gns = *to_fixed[v] * to_fixed[w]->adjoint();
        rep.gns_residual = std::max(rep.gns_residual, operator_norm(via_gns - scalar));
        u_vw[v][w] = it.unitary;
        rep.records.push_back({p, v, w, it.unitary, expected});
      }
    for (std::size_t v = 0; v < nc; ++v)
      for (std::size_t w = 0; w < nc; ++w)
        for (std::size_t x = 0; x < nc; ++x)
          if (u_vw[v][w] && u_vw[w][x] && u_vw[v][x])
            rep.cech_residual =
                std::max(rep.cech_residual, operator_norm(*u_vw[v][w] * *u_vw[w][x] - *u_vw[v][x]));
  }
  return rep;
}

struct IdealBundleReport {
  double trivialization_residual = 0.0;  // Ad(B_v U_v) N_rho inside N_ref
  double transition_residual = 0.0;      // Ad(g_vw) N_ref inside N_ref
  double reference_residual = 0.0;       // trivialization at the reference point itself
  std::size_t min_ideal_dim = 0, max_ideal_dim = 0;
  std::size_t checked = 0;
};

/// Local trivializations of the Gelfand-ideal bundle. Over chart v the
/// fibre N_rho is carried to N_ref by Ad(B_v U_v(rho)), where U_v(rho)
/// transports rho to the chart centre and B_v the centre to the reference
/// state (the first chart centre).
inline IdealBundleReport ideal_bundle_check(const StateSection& s, const std::vector<CVector>& centers,
                                            const NumericPolicy& policy = default_policy()) {
  const CStarAlgebra m2 = CStarAlgebra::full_matrix(2);
  const std::size_t nc = centers.size();
  if (nc == 0) throw Error(Errc::InvalidArgument, "ideal_bundle_check: no charts");
  const PureState ref(m2, 0, centers[0]);
  const auto n_ref = gelfand_ideal(ref.to_state(), policy);
  std::vector<AlgebraElement> to_ref;
  for (std::size_t v = 0; v < nc; ++v) to_ref.push_back(transport_unitary(PureState(m2, 0, centers[v]), ref, policy));

  auto conj_by = [](const AlgebraElement& u, const AlgebraElement& a) { return u * a * u.adjoint(); };

  IdealBundleReport rep;
  rep.min_ideal_dim = std::numeric_limits<std::size_t>::max();
  {
    const AlgebraElement u = to_ref[0] * transport_unitary(ref, PureState(m2, 0, centers[0]), policy);
    for (const auto& b : n_ref) rep.reference_residual = std::max(rep.reference_residual, element_norm(conj_by(u, b) - b));
  }
  for (std::size_t p = 0; p < s.vectors.size(); ++p) {
    const PureState rho = s.pure_state(p);
    const auto n_rho = gelfand_ideal(rho.to_state(), policy);
    rep.min_ideal_dim = std::min(rep.min_ideal_dim, n_rho.size());
    rep.max_ideal_dim = std::max(rep.max_ideal_dim, n_rho.size());
    const Ray ray(rho.vector());
    std::vector<std::optional<AlgebraElement>> chi(nc);
    for (std::size_t v = 0; v < nc; ++v) {
      if (!(ray_product(Ray(centers[v]), ray) > policy.chart_overlap)) continue;
      const AlgebraElement u = to_ref[v] * transport_unitary(rho, PureState(m2, 0, centers[v]), policy);
      for (const auto& b : n_rho)
        rep.trivialization_residual = std::max(rep.trivialization_residual, subspace_residual(n_ref, conj_by(u, b)));
      chi[v] = u;
      ++rep.checked;
    }
    for (std::size_t v = 0; v < nc; ++v)
      for (std::size_t w = 0; w < nc; ++w) {
        if (v == w || !chi[v] || !chi[w]) continue;
        const AlgebraElement g = *chi[v] * chi[w]->adjoint();
        for (const auto& b : n_ref)
          rep.transition_residual = std::max(rep.transition_residual, subspace_residual(n_ref, conj_by(g, b)));
      }
  }
  return rep;
}

}  // namespace gnslab
