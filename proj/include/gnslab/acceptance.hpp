#pragma once

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "bundles.hpp"
#include "chain.hpp"
#include "gns.hpp"
#include "io.hpp"
#include "kadison.hpp"
#include "ktheory.hpp"
#include "oracle.hpp"
#include "projgeom.hpp"
#include "random.hpp"

namespace gnslab::acceptance {

enum class Level { quick, full };

struct Options {
  Level level = Level::quick;
  double tol_scale = 1.0;  // multiplies every floating tolerance
};

/// GNSLAB_SELFTEST_SABOTAGE=1 shrinks every tolerance to nothing.
inline Options options_from_environment(Level level) {
  Options o;
  o.level = level;
  const char* s = std::getenv("GNSLAB_SELFTEST_SABOTAGE");
  if (s && std::string(s) == "1") o.tol_scale = 1e-30;
  return o;
}

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

class Check {
 public:
  explicit Check(const Options& o) : opt_(o) {}

  /// Records `value <= tol` under the tolerance scale.
  void at_most(const std::string& what, double value, double tol) {
    const bool ok = std::isfinite(value) && value <= tol * opt_.tol_scale;
    note(what + " " + io::num(value) + " <= " + io::num(tol), ok);
  }
  void truth(const std::string& what, bool ok) { note(what, ok); }

  bool pass() const { return pass_; }
  std::string detail() const { return detail_; }

 private:
  void note(const std::string& s, bool ok) {
    if (!detail_.empty()) detail_ += "; ";
    detail_ += ok ? s : "FAILED " + s;
    pass_ = pass_ && ok;
  }
  Options opt_;
  bool pass_ = true;
  std::string detail_;
};

inline int count(const Options& o, int quick, int full) { return o.level == Level::quick ? quick : full; }

inline AlgebraElement random_element(const CStarAlgebra& alg, Rng& rng) {
  std::vector<CMatrix> b;
  for (int n : alg.block_dims()) b.push_back(rng.gaussian(n, n));
  AlgebraElement a(alg, b);
  return cplx(1.0 / element_norm(a)) * a;
}

inline CriterionResult finish(int id, std::string name, const Check& c) {
  return {id, std::move(name), c.pass(), c.detail(), 0.0};
}

}  // namespace detail

inline CriterionResult chern_numbers(const Options& o) {
  detail::Check c(o);
  const auto start = std::chrono::steady_clock::now();
  const StateSection s40 = ground_section(SphereGrid(40, 80));
  const StateSection s80 = ground_section(SphereGrid(80, 160));
  const int e40 = chern_number(s40, 1), h40 = chern_number(s40, -2);
  const int e80 = chern_number(s80, 1), h80 = chern_number(s80, -2);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.truth("chern(+1) on 40x80 = " + std::to_string(e40), e40 == 1);
  c.truth("chern(-2) on 40x80 = " + std::to_string(h40), h40 == -2);
  c.truth("80x160 identical", e80 == e40 && h80 == h40);
  c.truth("runtime under 10 s", secs < 10.0);
  return detail::finish(1, "chern numbers", c);
}

inline CriterionResult transition_probability(const Options& o) {
  detail::Check c(o);
  Rng rng(1002);
  double worst = 0.0;
  const int pairs = detail::count(o, 1000, 10000);
  for (int t = 0; t < pairs; ++t) {
    const int n = rng.integer(2, 32);
    const CStarAlgebra alg = CStarAlgebra::full_matrix(n);
    const Ray a(rng.vector(n)), b(rng.vector(n));
    const double p = ray_product(a, b);
    const double dist = state_norm_distance(ray_to_pure(alg, 0, a).to_state(), ray_to_pure(alg, 0, b).to_state());
    worst = std::max(worst, std::abs(p * p - (1.0 - 0.25 * dist * dist)));
  }
  c.at_most(std::to_string(pairs) + " pairs, max identity defect", worst, 1e-10);
  return detail::finish(2, "transition probability", c);
}

inline CriterionResult sector_distance(const Options& o) {
  detail::Check c(o);
  Rng rng(1003);
  const CStarAlgebra alg({2, 3});
  double worst = 0.0, oracle_min = 2.0;
  const int pairs = detail::count(o, 50, 200), sampled = detail::count(o, 3, 10);
  for (int t = 0; t < pairs; ++t) {
    const State a = PureState(alg, 0, rng.unit_vector(2)).to_state();
    const State b = PureState(alg, 1, rng.unit_vector(3)).to_state();
    worst = std::max(worst, std::abs(state_norm_distance(a, b) - 2.0));
    if (t < sampled) oracle_min = std::min(oracle_min, oracle::sampled_dual_norm(a, b, rng, 200, 1000));
  }
  c.at_most(std::to_string(pairs) + " cross-block pairs, max |dist - 2|", worst, 1e-12);
  c.at_most("sampling oracle shortfall 2 - min", 2.0 - oracle_min, 1e-3);
  return detail::finish(3, "sector distance", c);
}

inline CriterionResult metric_equivalence(const Options& o) {
  detail::Check c(o);
  Rng rng(1004);
  const double k = std::sqrt(2.0) * pi / 4;
  double chain = 0.0, gap = 0.0;
  const int pairs = detail::count(o, 1000, 10000);
  for (int t = 0; t < pairs; ++t) {
    const int n = rng.integer(2, 32);
    const Ray a(rng.vector(n)), b(rng.vector(n));
    const double chd = d_chordal(a, b), fs = d_fubini_study(a, b), g = d_gap(a, b);
    chain = std::max({chain, chd - fs, fs - k * chd, chd / std::sqrt(2.0) - g, g - chd});
    gap = std::max(gap, std::abs(g - operator_norm(a.projection() - b.projection())));
  }
  c.at_most(std::to_string(pairs) + " pairs, max chain violation", chain, 1e-12);
  c.at_most("max |d_gap - ||P - Q|||", gap, 1e-10);
  return detail::finish(4, "metric equivalence", c);
}

inline CriterionResult kadison_norm_control(const Options& o) {
  detail::Check c(o);
  Rng rng(1005);
  double residual = 0.0, chain = 0.0, rotation = 0.0;
  int misjudged = 0, accepted = 0, rejected = 0;
  const int problems = detail::count(o, 200, 1000);
  for (int t = 0; t < problems; ++t) {
    const int d = rng.integer(1, 16);
    const int n = rng.integer(1, std::min(d, 4));
    std::vector<CVector> xs, ys;
    for (int i = 0; i < n; ++i) xs.push_back(rng.vector(d));
    const int kind = t % 5;
    Flavor flavor = Flavor::general;
    bool expect_solution = true;
    if (kind == 0) {
      for (int i = 0; i < n; ++i) ys.push_back(rng.vector(d));
    } else if (kind == 1 || kind == 2) {
      flavor = Flavor::self_adjoint;
      const CMatrix h = rng.hermitian(d);
      for (const auto& x : xs) ys.push_back(kind == 1 ? CVector(h * x) : rng.vector(d));
      expect_solution = kind == 1;
    } else {
      flavor = Flavor::unitary;
      const CMatrix u = rng.unitary(d);
      for (const auto& x : xs) ys.push_back(u * x);
      if (kind == 4) ys.back() *= 1.0 + rng.uniform(1e-4, 0.5);
      expect_solution = kind == 3;
    }
    try {
      const KadisonSolution s = kadison_solve({d, xs, ys, flavor});
      double ymax = 0.0;
      for (const auto& y : ys) ymax = std::max(ymax, y.norm());
      residual = std::max(residual, s.residual / (1.0 + ymax));
      chain = std::max({chain, s.norm_a / s.norm_t - 1.0, s.norm_t / s.lemma_bound - 1.0});
      if (!expect_solution) ++misjudged;
      ++accepted;
    } catch (const Error& e) {
      if (expect_solution || (e.code() != Errc::NoSelfAdjointSolution && e.code() != Errc::NoUnitarySolution))
        ++misjudged;
      ++rejected;
    }
  }
  for (int t = 0; t < problems; ++t) {
    const int d = rng.integer(2, 16);
    const CVector x = rng.unit_vector(d), y = rng.unit_vector(d);
    rotation = std::max(rotation, std::abs(operator_norm(identity(d) - rotation_unitary(x, y)) - (x - y).norm()));
  }
  c.at_most(std::to_string(problems) + " problems, max relative residual", residual, 1e-9);
  c.at_most("max relative excess in ||A|| <= ||T|| <= sqrt(2n) max||z||", chain, 1e-9);
  c.truth("flavor acceptance matches feasibility (" + std::to_string(accepted) + " accepted, " +
              std::to_string(rejected) + " rejected, " + std::to_string(misjudged) + " misjudged)",
          misjudged == 0);
  c.at_most("max | ||I - U_xy|| - ||x - y|| |", rotation, 1e-9);
  return detail::finish(5, "kadison norm control", c);
}

inline CriterionResult gns_correctness(const Options& o) {
  detail::Check c(o);
  Rng rng(1006);
  bool dims = true;
  double expectation = 0.0, diagram = 0.0, naturality = 0.0;
  const int max_n = detail::count(o, 6, 8);
  for (int n = 1; n <= max_n; ++n) {
    const CStarAlgebra alg = CStarAlgebra::full_matrix(n);
    const State s = PureState(alg, 0, rng.unit_vector(n)).to_state();
    const GNSData g = gns_construct(s);
    dims = dims && g.hilbert_dim == n && static_cast<int>(g.ideal_basis.size()) == n * (n - 1) &&
           commutant_dimension(g) == 1;
    for (int t = 0; t < 20; ++t) {
      const AlgebraElement a = detail::random_element(alg, rng);
      expectation = std::max(expectation, std::abs(inner(g.cyclic, g.rep(a) * g.cyclic) - evaluate(s, a)));
    }

    std::vector<CMatrix> u{rng.unitary(n)};
    const InnerAutomorphism alpha(alg, u);
    if (n > 1) {
      const PureState omega(alg, 0, rng.unit_vector(n)), psi(alg, 0, rng.unit_vector(n));
      const IntertwinerResult r = intertwiner(alpha, omega, psi);
      for (int t = 0; t < 50; ++t) {
        const AlgebraElement a = detail::random_element(alg, rng);
        const CVector lhs = r.unitary * (a.block(0) * omega.vector());
        const CVector rhs = alpha.apply(a).block(0) * r.phi;
        diagram = std::max(diagram, (lhs - rhs).norm());
      }
      diagram = std::max(diagram, r.diagram_residual);
    }
    const auto target = gelfand_ideal(alpha.push_forward(s));
    for (const auto& b : g.ideal_basis) naturality = std::max(naturality, subspace_residual(target, alpha.apply(b)));
  }
  c.truth("n = 1.." + std::to_string(max_n) + ": hilbert_dim n, ideal n(n-1), commutant 1", dims);
  c.at_most("max |<Omega, pi(A) Omega> - omega(A)|", expectation, 1e-10);
  c.at_most("max intertwiner diagram residual", diagram, 1e-9);
  c.at_most("max naturality residual", naturality, 1e-9);
  return detail::finish(6, "gns correctness", c);
}

inline CriterionResult bundle_cocycles(const Options& o) {
  detail::Check c(o);
  const int nt = detail::count(o, 10, 20);
  const StateSection s = ground_section(SphereGrid(nt, 2 * nt));
  const auto centers = default_chart_centers();
  const CocycleTable t = tautological_cocycle(s, centers);
  const TransitionReport tr = gns_bundle_transitions(s, centers);
  const IdealBundleReport ib = ideal_bundle_check(s, centers);
  c.truth(std::to_string(t.triple_overlaps) + " triple overlaps", t.triple_overlaps > 0);
  c.at_most("cech closure", t.cocycle_residual, 1e-10);
  c.at_most("transition vs conj(h) I (intertwiner)", tr.intertwiner_residual, 1e-9);
  c.at_most("transition vs conj(h) I (gns)", tr.gns_residual, 1e-9);
  c.at_most("ideal trivialization", std::max(ib.trivialization_residual, ib.transition_residual), 1e-9);
  return detail::finish(7, "bundle cocycles", c);
}

inline CriterionResult spin_chain(const Options& o) {
  detail::Check c(o);
  Rng rng(1008);
  auto config = [&](std::size_t n) {
    std::vector<spin::Vec3> f;
    for (std::size_t i = 0; i < n; ++i) f.push_back(rng.sphere_point());
    return FieldConfig(enumerate_sites(1, n), f);
  };

  bool sup_exact = true;
  double witness = 0.0, inequality = 0.0, spectrum = 0.0;
  bool multiplicity = true, bound = true;
  const int pairs = detail::count(o, 50, 200);
  for (int t = 0; t < pairs; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 14));
    const FieldConfig a = config(n), b = config(n);
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& x = a.field()[i];
      const auto& y = b.field()[i];
      const double dx = x[0] - y[0], dy = x[1] - y[1], dz = x[2] - y[2];
      sup = std::max(sup, std::sqrt(dx * dx + dy * dy + dz * dz));
    }
    sup_exact = sup_exact && interaction_distance(a, b) == sup;
    const LocalDistance ld = local_state_distance(ProductGroundState(a), ProductGroundState(b));
    bound = bound && ld.exact <= ld.bound + 1e-12 * o.tol_scale;
  }
  for (int t = 0; t < detail::count(o, 5, 20); ++t)
    witness = std::max(witness, sector_witness(rng.sphere_point(), rng.sphere_point(), 64).max_deviation);
  const int ops = detail::count(o, 20, 100);
  for (int t = 0; t < ops; ++t) {
    const ProductGroundState s(config(6));
    LocalOperator a;
    const int terms = rng.integer(1, 3);
    for (int k = 0; k < terms; ++k) {
      LocalOperator::Term term;
      term.coefficient = rng.complex_normal() / std::sqrt(static_cast<double>(terms));
      for (const auto& site : s.config().sites())
        if (rng.uniform() < 0.5) {
          const CMatrix m = rng.gaussian(2, 2);
          term.factors.emplace(site, m / operator_norm(m));
        }
      a.add(term);
    }
    inequality = std::max(inequality, -ground_state_inequality(s, a));
  }
  const int max_sites = detail::count(o, 8, 10);
  for (int n = 1; n <= max_sites; ++n) {
    const SpectralGap g = spectral_gap(config(static_cast<std::size_t>(n)));
    spectrum = std::max({spectrum, std::abs(g.ground_energy + n), std::abs(g.gap - 2.0)});
    multiplicity = multiplicity && g.multiplicity == 1;
  }
  c.truth("interaction_distance equals the sup formula", sup_exact);
  c.at_most("sector witness deviation up to m = 64", witness, 1e-12);
  c.at_most(std::to_string(ops) + " operators, max -(ground-state form)", std::max(0.0, inequality), 1e-10);
  c.at_most("|L| <= " + std::to_string(max_sites) + ": max spectral deviation", spectrum, 1e-9);
  c.truth("ground multiplicity 1", multiplicity);
  c.truth("exact local distance <= site-sum bound", bound);
  return detail::finish(8, "spin chain", c);
}

inline CriterionResult uhf_arithmetic(const Options& o) {
  detail::Check c(o);
  const SupernaturalNumber delta = SupernaturalNumber::parse("2^inf");
  c.truth("3/8 in Q(delta)", q_contains(delta, Rational(BigInt(3), BigInt(8))));
  c.truth("1/3 not in Q(delta)", !q_contains(delta, Rational(BigInt(1), BigInt(3))));
  c.truth("pi1(U) = " + homotopy_group(1, UnitaryGroup::U).to_string(),
          homotopy_group(1, UnitaryGroup::U).to_string() == "Q(delta)");
  c.truth("pi1(U_omega) = " + homotopy_group(1, UnitaryGroup::U_omega).to_string(),
          homotopy_group(1, UnitaryGroup::U_omega).to_string() == "Z x Q(delta)");
  bool even = true;
  for (unsigned k = 0; k <= 20; k += 2)
    even = even && homotopy_group(k, UnitaryGroup::U) == GroupExpr::zero() &&
           homotopy_group(k, UnitaryGroup::U_omega) == GroupExpr::zero();
  c.truth("pi_2k = 0", even);
  c.truth("K0 = " + k_theory(0).to_string() + ", K1 = " + k_theory(1).to_string(),
          k_theory(0).to_string() == "Q(delta)" && k_theory(1).to_string() == "0");
  int checked = 0;
  bool colimit = true;
  for (int a = 1; a <= 10; ++a)
    for (int b = a; b <= 10; ++b) {
      colimit = colimit && colimit_matrix_check(1ull << a, 1ull << b);
      ++checked;
    }
  c.truth("colimit matrices on " + std::to_string(checked) + " divisor pairs", colimit);
  return detail::finish(9, "uhf arithmetic", c);
}

using CriterionFn = std::function<CriterionResult(const Options&)>;

inline std::vector<CriterionFn> criteria() {
  return {chern_numbers,   transition_probability, sector_distance, metric_equivalence, kadison_norm_control,
          gns_correctness, bundle_cocycles,       spin_chain,      uhf_arithmetic};
}

/// Runs one criterion; an escaped Error counts as a failure.
inline CriterionResult run_criterion(int id, const CriterionFn& fn, const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = fn(o);
  } catch (const Error& e) {
    r = {id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what(), 0.0};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline std::vector<CriterionResult> run_all(const Options& o) {
  std::vector<CriterionResult> out;
  const auto fns = criteria();
  for (std::size_t i = 0; i < fns.size(); ++i) out.push_back(run_criterion(static_cast<int>(i) + 1, fns[i], o));
  return out;
}

inline std::string format_line(const CriterionResult& r) {
  return std::string(r.pass ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " + r.name + ": " + r.detail;
}

}  // namespace gnslab::acceptance
