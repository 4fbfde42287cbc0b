#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gnslab/gnslab.hpp"

using json = nlohmann::json;
using namespace gnslab;
namespace fs = std::filesystem;

namespace {

constexpr int schema_version = 1;

enum Exit { ok = 0, violation = 1, input_error = 2, numeric_error = 3 };

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_input_error(Errc c) {
  switch (c) {
    case Errc::NonFinite:
    case Errc::RankDeficient:
    case Errc::SpectrumAtMinusOne:
    case Errc::VanishingLink:
    case Errc::CurvatureSaturated:
    case Errc::NotMultiplicative:
    case Errc::NotBlockPreserving:
      return false;
    default:
      return true;
  }
}

// ---- scenario parsing ----

const json& require(const json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError("missing field '" + key + "'");
  return j.at(key);
}

template <class T>
T value_or(const json& j, const std::string& key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError("field '" + key + "' has the wrong type");
  }
}

int bounded_int(const json& j, const std::string& key, int fallback, int lo, int hi) {
  const int v = value_or<int>(j, key, fallback);
  if (v < lo || v > hi)
    throw SchemaError("field '" + key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

cplx parse_scalar(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw SchemaError("complex entries are numbers or [re, im] pairs");
}

CVector parse_vector(const json& j) {
  if (!j.is_array() || j.empty()) throw SchemaError("a vector is a nonempty array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_scalar(j[i]);
  return v;
}

std::vector<CVector> parse_vectors(const json& j) {
  if (!j.is_array()) throw SchemaError("expected an array of vectors");
  std::vector<CVector> out;
  for (const auto& v : j) out.push_back(parse_vector(v));
  return out;
}

CMatrix parse_matrix(const json& j) {
  if (!j.is_array() || j.empty()) throw SchemaError("a matrix is a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const CVector row = parse_vector(j[static_cast<std::size_t>(r)]);
    if (row.size() != cols) throw SchemaError("matrix rows differ in length");
    m.row(r) = row.transpose();
  }
  return m;
}

spin::Vec3 parse_vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw SchemaError("a field value is an array of three numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::vector<int> parse_blocks(const json& j) {
  if (!j.is_array() || j.empty()) throw SchemaError("'blocks' is a nonempty array of block sizes");
  std::vector<int> out;
  for (const auto& b : j) {
    if (!b.is_number_integer()) throw SchemaError("block sizes are integers");
    out.push_back(b.get<int>());
  }
  return out;
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(text));
    const BigInt den(text.substr(slash + 1));
    if (den == 0) throw SchemaError("zero denominator in '" + text + "'");
    return Rational(BigInt(text.substr(0, slash)), den);
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const SchemaError*>(&e)) throw;
    throw SchemaError("bad rational '" + text + "'");
  }
}

json to_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

json to_json(const CMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(to_json(CVector(m.row(r).transpose())));
  return out;
}

json policy_json(const NumericPolicy& p) {
  return {{"profile", p.profile},
          {"hermiticity", p.hermiticity},
          {"rank", p.rank},
          {"orthonormality", p.orthonormality},
          {"purity", p.purity},
          {"psd", p.psd},
          {"trace", p.trace},
          {"orthogonal_ray", p.orthogonal_ray},
          {"minus_one_gap", p.minus_one_gap},
          {"antipodal", p.antipodal},
          {"normalization", p.normalization},
          {"link", p.link},
          {"curvature_margin", p.curvature_margin},
          {"chart_overlap", p.chart_overlap}};
}

// ---- report ----

struct Flags {
  bool csv = false;
  bool svg = false;
};

class Report {
 public:
  json fields = json::object();
  std::vector<std::pair<std::string, std::string>> files;  // name, contents

  void residual(const std::string& name, double value, double tolerance) {
    const bool pass = std::isfinite(value) && value <= tolerance;
    residuals_.push_back({{"name", name}, {"value", value}, {"tolerance", tolerance}, {"pass", pass}});
    ok_ = ok_ && pass;
  }
  void invariant(const std::string& name, bool holds) { residual(name, holds ? 0.0 : 1.0, 0.0); }

  bool ok() const { return ok_; }
  const json& residuals() const { return residuals_; }

 private:
  json residuals_ = json::array();
  bool ok_ = true;
};

// ---- kinds ----

void run_metrics(const json& p, Rng& rng, Report& r, const Flags& flags) {
  if (p.contains("a") || p.contains("b")) {
    const Ray a(parse_vector(require(p, "a"))), b(parse_vector(require(p, "b")));
    if (a.dimension() != b.dimension()) throw SchemaError("'a' and 'b' must have the same length");
    const CStarAlgebra alg = CStarAlgebra::full_matrix(static_cast<int>(a.dimension()));
    const double dist = state_norm_distance(ray_to_pure(alg, 0, a).to_state(), ray_to_pure(alg, 0, b).to_state());
    const double prod = ray_product(a, b);
    r.fields["pair"] = {{"ray_product", prod},
                        {"d_chordal", d_chordal(a, b)},
                        {"d_fubini_study", d_fubini_study(a, b)},
                        {"d_gap", d_gap(a, b)},
                        {"gap_via_projection", gap_via_projection(a, b)},
                        {"state_distance", dist}};
    r.residual("pair_transition_identity", std::abs(prod * prod - (1.0 - 0.25 * dist * dist)), 1e-10);
    r.residual("pair_gap_vs_projection", std::abs(d_gap(a, b) - operator_norm(a.projection() - b.projection())), 1e-10);
  }

  const int pairs = bounded_int(p, "pairs", 1000, 0, 1000000);
  const int lo = bounded_int(p, "dim_min", 2, 1, 256);
  const int hi = bounded_int(p, "dim_max", 32, lo, 256);
  const double k = std::sqrt(2.0) * pi / 4;
  double chain = 0.0, gap = 0.0, transition = 0.0;
  std::string csv = "dim,ray_product,d_chordal,d_fubini_study,d_gap,state_distance\n";
  for (int t = 0; t < pairs; ++t) {
    const int n = rng.integer(lo, hi);
    const Ray a(rng.vector(n)), b(rng.vector(n));
    const double chd = d_chordal(a, b), fs = d_fubini_study(a, b), g = d_gap(a, b), prod = ray_product(a, b);
    const CStarAlgebra alg = CStarAlgebra::full_matrix(n);
    const double dist = state_norm_distance(ray_to_pure(alg, 0, a).to_state(), ray_to_pure(alg, 0, b).to_state());
    chain = std::max({chain, chd - fs, fs - k * chd, chd / std::sqrt(2.0) - g, g - chd});
    gap = std::max(gap, std::abs(g - operator_norm(a.projection() - b.projection())));
    transition = std::max(transition, std::abs(prod * prod - (1.0 - 0.25 * dist * dist)));
    if (flags.csv)
      csv += std::to_string(n) + "," + io::num(prod) + "," + io::num(chd) + "," + io::num(fs) + "," + io::num(g) +
             "," + io::num(dist) + "\n";
  }
  r.fields["pairs"] = pairs;
  r.residual("equivalence_chain_violation", std::max(0.0, chain), 1e-12);
  r.residual("gap_vs_projection", gap, 1e-10);
  r.residual("transition_identity", transition, 1e-10);
  if (flags.csv) r.files.emplace_back("metrics.csv", csv);
}

State parse_state(const json& p, const CStarAlgebra& alg, Rng& rng) {
  if (!p.contains("state")) return PureState(alg, 0, rng.unit_vector(alg.block_dim(0))).to_state();
  const json& s = p.at("state");
  if (s.contains("pure")) {
    const json& pure = s.at("pure");
    const auto block = static_cast<std::size_t>(value_or<int>(pure, "block", 0));
    if (block >= alg.block_count()) throw SchemaError("state block out of range");
    CVector v = parse_vector(require(pure, "vector"));
    if (v.norm() == 0.0) throw SchemaError("state vector is zero");
    v /= v.norm();
    return PureState(alg, block, v).to_state();
  }
  if (s.contains("density")) {
    std::vector<CMatrix> blocks;
    for (const auto& m : require(s, "density")) blocks.push_back(parse_matrix(m));
    return State(alg, blocks);
  }
  throw SchemaError("'state' needs a 'pure' or a 'density' entry");
}

AlgebraElement random_element(const CStarAlgebra& alg, Rng& rng) {
  std::vector<CMatrix> b;
  for (int n : alg.block_dims()) b.push_back(rng.gaussian(n, n));
  AlgebraElement a(alg, b);
  return cplx(1.0 / element_norm(a)) * a;
}

void run_gns(const json& p, Rng& rng, Report& r, const Flags&) {
  const CStarAlgebra alg(parse_blocks(value_or<json>(p, "blocks", json::array({2}))));
  const State s = parse_state(p, alg, rng);
  const int samples = bounded_int(p, "samples", 50, 1, 100000);
  const GNSData g = gns_construct(s);
  r.fields["hilbert_dim"] = g.hilbert_dim;
  r.fields["ideal_dim"] = g.ideal_basis.size();
  r.fields["algebra_dim"] = alg.dimension();
  r.fields["commutant_dim"] = g.hilbert_dim <= 32 ? json(commutant_dimension(g)) : json(nullptr);
  const PurityResult purity = is_pure(s, default_policy().purity);
  r.fields["pure"] = purity.pure;

  std::size_t expected_ideal = 0;
  for (std::size_t k = 0; k < alg.block_count(); ++k) {
    const RVector ev = eigvalsh(s.density(k));
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      if (ev(i) > default_policy().rank * std::max(1.0, ev.cwiseAbs().maxCoeff())) ++rank;
    const auto n = static_cast<std::size_t>(alg.block_dim(k));
    expected_ideal += n * (n - rank);
  }
  r.invariant("ideal_dim_matches_rank_formula", g.ideal_basis.size() == expected_ideal);

  double cyclic = 0.0, multiplicative = 0.0, star = 0.0;
  for (int t = 0; t < samples; ++t) {
    const AlgebraElement a = random_element(alg, rng), b = random_element(alg, rng);
    cyclic = std::max(cyclic, std::abs(inner(g.cyclic, g.rep(a) * g.cyclic) - evaluate(s, a)));
    multiplicative = std::max(multiplicative, operator_norm(g.rep(a * b) - g.rep(a) * g.rep(b)));
    star = std::max(star, operator_norm(g.rep(a.adjoint()) - g.rep(a).adjoint()));
  }
  r.residual("cyclic_expectation", cyclic, 1e-10);
  r.residual("representation_multiplicative", multiplicative, 1e-9);
  r.residual("representation_star", star, 1e-9);

  std::vector<CMatrix> us;
  for (int n : alg.block_dims()) us.push_back(rng.unitary(n));
  const InnerAutomorphism alpha(alg, us);
  const auto target = gelfand_ideal(alpha.push_forward(s));
  double naturality = 0.0;
  for (const auto& b : g.ideal_basis) naturality = std::max(naturality, subspace_residual(target, alpha.apply(b)));
  r.residual("naturality", naturality, 1e-9);

  if (purity.pure) {
    const PureState& omega = *purity.state;
    const std::size_t k = omega.block();
    const PureState psi(alg, k, rng.unit_vector(alg.block_dim(k)));
    const IntertwinerResult it = intertwiner(alpha, omega, psi);
    double diagram = it.diagram_residual;
    for (int t = 0; t < samples; ++t) {
      const AlgebraElement a = random_element(alg, rng);
      diagram = std::max(diagram, (it.unitary * (a.block(k) * omega.vector()) - alpha.apply(a).block(k) * it.phi).norm());
    }
    r.residual("intertwiner_diagram", diagram, 1e-9);
  }
}

json kadison_one(const InterpolationProblem& prob, Report& r, const std::string& prefix) {
  try {
    const KadisonSolution s = kadison_solve(prob);
    double ymax = 0.0;
    for (const auto& y : prob.ys) ymax = std::max(ymax, y.norm());
    r.residual(prefix + "interpolation_residual", s.residual / (1.0 + ymax), 1e-9);
    r.residual(prefix + "norm_a_over_t_excess", std::max(0.0, s.norm_a / s.norm_t - 1.0), 1e-9);
    r.residual(prefix + "norm_t_over_bound_excess", std::max(0.0, s.norm_t / s.lemma_bound - 1.0), 1e-9);
    json out = {{"feasible", true},   {"norm_a", s.norm_a},         {"norm_t", s.norm_t},
                {"norm_t0", s.norm_t0}, {"lemma_bound", s.lemma_bound}, {"residual", s.residual}};
    if (prob.hilbert_dim <= 8) out["element"] = to_json(s.element.block(0));
    return out;
  } catch (const Error& e) {
    if (e.code() != Errc::NoSelfAdjointSolution && e.code() != Errc::NoUnitarySolution) throw;
    return {{"feasible", false}, {"reason", std::string(errc_name(e.code()))}};
  }
}

Flavor parse_flavor(const std::string& f) {
  if (f == "general") return Flavor::general;
  if (f == "self_adjoint") return Flavor::self_adjoint;
  if (f == "unitary") return Flavor::unitary;
  throw SchemaError("flavor must be general, self_adjoint or unitary");
}

void run_kadison(const json& p, Rng& rng, Report& r, const Flags&) {
  if (p.contains("xs")) {
    InterpolationProblem prob{value_or<int>(p, "dim", 0), parse_vectors(require(p, "xs")),
                              parse_vectors(require(p, "ys")), parse_flavor(value_or<std::string>(p, "flavor", "general"))};
    if (prob.hilbert_dim == 0 && !prob.xs.empty()) prob.hilbert_dim = static_cast<int>(prob.xs.front().size());
    r.fields["problem"] = kadison_one(prob, r, "");
  }
  const int problems = bounded_int(p, "problems", p.contains("xs") ? 0 : 100, 0, 100000);
  const int max_dim = bounded_int(p, "max_dim", 16, 1, 64);
  const int max_n = bounded_int(p, "max_n", 4, 1, 16);
  int accepted = 0, rejected = 0, misjudged = 0;
  double rotation = 0.0;
  for (int t = 0; t < problems; ++t) {
    const int d = rng.integer(1, max_dim);
    const int n = rng.integer(1, std::min(d, max_n));
    std::vector<CVector> xs, ys;
    for (int i = 0; i < n; ++i) xs.push_back(rng.vector(d));
    const int kind = t % 5;
    Flavor flavor = Flavor::general;
    bool solvable = true;
    if (kind == 0) {
      for (int i = 0; i < n; ++i) ys.push_back(rng.vector(d));
    } else if (kind <= 2) {
      flavor = Flavor::self_adjoint;
      const CMatrix h = rng.hermitian(d);
      for (const auto& x : xs) ys.push_back(kind == 1 ? CVector(h * x) : rng.vector(d));
      solvable = kind == 1;
    } else {
      flavor = Flavor::unitary;
      const CMatrix u = rng.unitary(d);
      for (const auto& x : xs) ys.push_back(u * x);
      if (kind == 4) ys.back() *= 1.0 + rng.uniform(1e-4, 0.5);
      solvable = kind == 3;
    }
    const json out = kadison_one({d, xs, ys, flavor}, r, "sweep_" + std::to_string(t) + "_");
    const bool feasible = out.at("feasible").get<bool>();
    (feasible ? accepted : rejected)++;
    if (feasible != solvable) ++misjudged;
    const CVector x = rng.unit_vector(std::max(d, 2)), y = rng.unit_vector(std::max(d, 2));
    rotation = std::max(rotation,
                        std::abs(operator_norm(identity(x.size()) - rotation_unitary(x, y)) - (x - y).norm()));
  }
  if (problems > 0) {
    r.fields["sweep"] = {{"problems", problems}, {"accepted", accepted}, {"rejected", rejected}};
    r.invariant("flavor_acceptance_matches_feasibility", misjudged == 0);
    r.residual("rotation_norm_identity", rotation, 1e-9);
  }
}

void run_chern(const json& p, Rng&, Report& r, const Flags& flags) {
  const int nt = bounded_int(p, "n_theta", 40, 1, 2000);
  const int np = bounded_int(p, "n_phi", 80, 3, 4000);
  std::vector<int> powers = value_or<std::vector<int>>(p, "powers", {1, -2});
  const SphereGrid grid(nt, np);
  const StateSection s = ground_section(grid);
  json chern = json::object();
  double integrality = 0.0, max_curv = 0.0, min_link = 1.0;
  for (int pw : powers) {
    const ChernField f = chern_field(s, pw);
    chern[std::to_string(pw)] = f.chern;
    integrality = std::max(integrality, f.integrality);
    max_curv = std::max(max_curv, f.max_abs_curvature);
    min_link = std::min(min_link, f.min_link);
  }
  const ChernField e = chern_field(s, 1);
  r.fields["grid"] = {{"n_theta", nt}, {"n_phi", np}, {"plaquettes", grid.plaquettes().size()}};
  r.fields["chern"] = chern;
  r.fields["chern_E"] = e.chern;
  r.fields["chern_detH"] = chern_number(s, -2);
  r.fields["min_link"] = min_link;
  r.fields["max_abs_curvature"] = max_curv;
  r.residual("chern_integrality", integrality, 1e-9);
  const auto [v, ed, f] = grid.euler_counts();
  r.invariant("euler_characteristic_2", static_cast<long>(v) - static_cast<long>(ed) + static_cast<long>(f) == 2);
  if (value_or<bool>(p, "refine", false)) {
    const StateSection fine = ground_section(SphereGrid(2 * nt, 2 * np));
    bool stable = true;
    json refined = json::object();
    for (int pw : powers) {
      const int c = chern_number(fine, pw);
      refined[std::to_string(pw)] = c;
      stable = stable && c == chern[std::to_string(pw)].get<int>();
    }
    r.fields["chern_refined"] = refined;
    r.invariant("refinement_stable", stable);
  }
  if (flags.csv) r.files.emplace_back("curvature.csv", curvature_csv(grid, e));
  if (flags.svg) r.files.emplace_back("curvature.svg", curvature_svg(grid, e));
}

void run_gnsbundle(const json& p, Rng&, Report& r, const Flags& flags) {
  const int nt = bounded_int(p, "n_theta", 10, 1, 200);
  const int np = bounded_int(p, "n_phi", 20, 3, 400);
  std::vector<CVector> centers = p.contains("centers") ? parse_vectors(p.at("centers")) : default_chart_centers();
  for (auto& c : centers) {
    if (c.size() != 2) throw SchemaError("chart centres are vectors in C^2");
    if (c.norm() == 0.0) throw SchemaError("chart centre is zero");
    c /= c.norm();
  }
  const StateSection s = ground_section(SphereGrid(nt, np));
  const CocycleTable t = tautological_cocycle(s, centers);
  const TransitionReport tr = gns_bundle_transitions(s, centers);
  const IdealBundleReport ib = ideal_bundle_check(s, centers);
  r.fields["points"] = s.vectors.size();
  r.fields["charts"] = centers.size();
  r.fields["triple_overlaps"] = t.triple_overlaps;
  r.fields["transitions"] = tr.records.size();
  r.fields["ideal_dim"] = {{"min", ib.min_ideal_dim}, {"max", ib.max_ideal_dim}};
  r.residual("cocycle_closure", t.cocycle_residual, 1e-10);
  r.residual("section_relation", t.relation_residual, 1e-10);
  r.residual("transition_scalar_intertwiner", tr.intertwiner_residual, 1e-9);
  r.residual("transition_scalar_gns", tr.gns_residual, 1e-9);
  r.residual("transition_cech", tr.cech_residual, 1e-9);
  r.residual("ideal_trivialization", ib.trivialization_residual, 1e-9);
  r.residual("ideal_transition", ib.transition_residual, 1e-9);
  r.invariant("ideal_dim_constant_2", ib.min_ideal_dim == 2 && ib.max_ideal_dim == 2);
  if (flags.csv) {
    std::string csv = "point,v,w,re_hbar,im_hbar,residual\n";
    for (const auto& rec : tr.records)
      csv += std::to_string(rec.point) + "," + std::to_string(rec.v) + "," + std::to_string(rec.w) + "," +
             io::num(rec.expected.real()) + "," + io::num(rec.expected.imag()) + "," +
             io::num(operator_norm(rec.unitary - rec.expected * identity(2))) + "\n";
    r.files.emplace_back("transitions.csv", csv);
  }
}

FieldConfig parse_field(const json& p, const std::string& key, std::size_t n, int d, Rng& rng) {
  std::vector<spin::Vec3> f;
  if (p.contains(key)) {
    for (const auto& v : p.at(key)) f.push_back(parse_vec3(v));
    if (f.size() != n) throw SchemaError("'" + key + "' must have one entry per site");
  } else {
    for (std::size_t i = 0; i < n; ++i) f.push_back(rng.sphere_point());
  }
  return {enumerate_sites(d, n), f};
}

void run_chain(const json& p, Rng& rng, Report& r, const Flags& flags) {
  const auto n = static_cast<std::size_t>(bounded_int(p, "sites", 8, 1, 64));
  const int d = bounded_int(p, "dimension", 1, 1, 4);
  const FieldConfig a = parse_field(p, "field_a", n, d, rng);
  const FieldConfig b = parse_field(p, "field_b", n, d, rng);
  const ProductGroundState sa(a), sb(b);
  const LocalDistance ld = local_state_distance(sa, sb);
  r.fields["interaction_distance"] = interaction_distance(a, b);
  r.fields["local_distance"] = {{"exact", ld.exact}, {"bound", ld.bound}};
  r.residual("distance_bound_excess", std::max(0.0, ld.exact - ld.bound), 1e-12);

  const json w = value_or<json>(p, "witness", json::object());
  const spin::Vec3 wr = w.contains("r") ? parse_vec3(w.at("r")) : rng.sphere_point();
  const spin::Vec3 ws = w.contains("s") ? parse_vec3(w.at("s")) : rng.sphere_point();
  const auto m = static_cast<std::size_t>(bounded_int(w, "m", 64, 0, 4096));
  const SectorWitness sw = sector_witness(wr, ws, m, d);
  r.fields["witness"] = {{"expected", sw.expected}, {"m", m}};
  r.residual("witness_deviation", sw.max_deviation, 1e-12);

  const int ops = bounded_int(p, "operators", 20, 0, 10000);
  if (ops > 0 && n <= dense_site_limit) {
    double negativity = 0.0;
    for (int t = 0; t < ops; ++t) {
      LocalOperator op;
      const int terms = rng.integer(1, 3);
      for (int k = 0; k < terms; ++k) {
        LocalOperator::Term term;
        term.coefficient = rng.complex_normal() / std::sqrt(static_cast<double>(terms));
        for (const auto& site : a.sites())
          if (rng.uniform() < 0.5) {
            const CMatrix mm = rng.gaussian(2, 2);
            term.factors.emplace(site, mm / operator_norm(mm));
          }
        op.add(term);
      }
      negativity = std::max(negativity, -ground_state_inequality(sa, op));
    }
    r.fields["ground_state_operators"] = ops;
    r.residual("ground_state_negativity", std::max(0.0, negativity), 1e-10);
  }
  if (n <= 10) {
    const SpectralGap g = spectral_gap(a);
    r.fields["spectral_gap"] = {{"ground_energy", g.ground_energy}, {"gap", g.gap}, {"multiplicity", g.multiplicity}};
    r.residual("ground_energy_deviation", std::abs(g.ground_energy + static_cast<double>(n)), 1e-9);
    r.residual("gap_deviation", std::abs(g.gap - 2.0), 1e-9);
    r.invariant("ground_multiplicity_1", g.multiplicity == 1);
  }
  const auto rows = distance_vs_truncation(a, b, n);
  json table = json::array();
  for (const auto& row : rows) table.push_back({{"sites", row.sites}, {"exact", row.exact}, {"bound", row.bound}});
  r.fields["truncation"] = table;
  if (flags.csv) r.files.emplace_back("truncation.csv", truncation_csv(rows));
  if (flags.svg) r.files.emplace_back("truncation.svg", truncation_svg(rows));
}

void run_ktheory(const json& p, Rng&, Report& r, const Flags&) {
  std::vector<std::uint64_t> seq = value_or<std::vector<std::uint64_t>>(p, "type", {2, 4, 8});
  std::vector<std::uint64_t> inf = value_or<std::vector<std::uint64_t>>(p, "infinite_primes", {2});
  const UHFType type(seq, std::set<std::uint64_t>(inf.begin(), inf.end()));
  const SupernaturalNumber delta = sn_from_type(type);
  r.fields["delta"] = delta.to_string();
  json members = json::object();
  for (const auto& q : value_or<std::vector<std::string>>(p, "rationals", {"3/8", "1/3"}))
    members[q] = q_contains(delta, parse_rational(q));
  r.fields["membership"] = members;
  const unsigned max_k = static_cast<unsigned>(bounded_int(p, "max_k", 6, 0, 1000));
  json pu = json::array(), puo = json::array();
  for (unsigned k = 0; k <= max_k; ++k) {
    pu.push_back(homotopy_group(k, UnitaryGroup::U).to_string());
    puo.push_back(homotopy_group(k, UnitaryGroup::U_omega).to_string());
  }
  r.fields["pi_U"] = pu;
  r.fields["pi_Uomega"] = puo;
  r.fields["pi1_U"] = homotopy_group(1, UnitaryGroup::U).to_string();
  r.fields["pi1_Uomega"] = homotopy_group(1, UnitaryGroup::U_omega).to_string();
  r.fields["rational_rank_pi1"] = {{"U", homotopy_group(1, UnitaryGroup::U).rational_rank()},
                                   {"U_omega", homotopy_group(1, UnitaryGroup::U_omega).rational_rank()}};
  r.fields["K0"] = k_theory(0).to_string();
  r.fields["K1"] = k_theory(1).to_string();
  if (p.contains("compare"))
    r.fields["q_isomorphic"] = q_isomorphic(delta, SupernaturalNumber::parse(p.at("compare").get<std::string>()));
  int checked = 0;
  bool colimit = true;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i; j < seq.size(); ++j) {
      colimit = colimit && colimit_matrix_check(seq[i], seq[j]);
      ++checked;
    }
  r.fields["colimit_pairs"] = checked;
  r.invariant("colimit_matrices", colimit);
}

using Handler = void (*)(const json&, Rng&, Report&, const Flags&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {{"metrics", run_metrics}, {"gns", run_gns},
                                                    {"kadison", run_kadison}, {"chern", run_chern},
                                                    {"gnsbundle", run_gnsbundle}, {"chain", run_chain},
                                                    {"ktheory", run_ktheory}};
  return h;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

int write_error(const fs::path& out_dir, const std::string& status, const std::string& code, const std::string& msg,
                int exit_code) {
  std::cerr << "gnslab: " << msg << "\n";
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!ec) {
    const json doc = {{"schema_version", schema_version},
                      {"numeric_policy", policy_json(default_policy())},
                      {"status", status},
                      {"error", {{"code", code}, {"message", msg}}},
                      {"residuals", json::array()}};
    std::ofstream(out_dir / "result.json", std::ios::binary) << doc.dump(2) << "\n";
  }
  return exit_code;
}

int run(const std::string& scenario_path, const std::string& out, std::optional<std::uint64_t> seed_flag,
        const Flags& flags) {
  const fs::path out_dir(out);
  json scenario;
  try {
    std::ifstream in(scenario_path);
    if (!in) return write_error(out_dir, "input_error", "InvalidArgument", "cannot open " + scenario_path, input_error);
    scenario = json::parse(in);
  } catch (const json::exception& e) {
    return write_error(out_dir, "input_error", "InvalidArgument", std::string("scenario parse error: ") + e.what(),
                       input_error);
  }

  try {
    const int version = value_or<int>(scenario, "schema_version", schema_version);
    if (version != schema_version) throw SchemaError("unsupported schema_version " + std::to_string(version));
    const std::string kind = require(scenario, "kind").get<std::string>();
    const auto it = handlers().find(kind);
    if (it == handlers().end()) throw SchemaError("unknown kind '" + kind + "'");
    const std::uint64_t seed = seed_flag ? *seed_flag : value_or<std::uint64_t>(scenario, "seed", 0);
    const json params = value_or<json>(scenario, "parameters", json::object());
    if (!params.is_object()) throw SchemaError("'parameters' must be an object");

    Rng rng(seed);
    Report report;
    it->second(params, rng, report, flags);

    json doc = report.fields;
    doc["schema_version"] = schema_version;
    doc["kind"] = kind;
    doc["seed"] = seed;
    doc["numeric_policy"] = policy_json(default_policy());
    doc["residuals"] = report.residuals();
    doc["status"] = report.ok() ? "ok" : "invariant_violation";

    fs::create_directories(out_dir);
    write_file(out_dir / "result.json", doc.dump(2) + "\n");
    for (const auto& [name, contents] : report.files) write_file(out_dir / name, contents);
    if (!report.ok()) {
      for (const auto& res : report.residuals())
        if (!res.at("pass").get<bool>())
          std::cerr << "gnslab: invariant violated: " << res.at("name").get<std::string>() << " = "
                    << res.at("value").get<double>() << "\n";
      return violation;
    }
    return ok;
  } catch (const SchemaError& e) {
    return write_error(out_dir, "input_error", "SchemaError", e.what(), input_error);
  } catch (const json::exception& e) {
    return write_error(out_dir, "input_error", "SchemaError", e.what(), input_error);
  } catch (const Error& e) {
    const bool input = is_input_error(e.code());
    return write_error(out_dir, input ? "input_error" : "numeric_error", std::string(errc_name(e.code())), e.what(),
                       input ? input_error : numeric_error);
  } catch (const std::exception& e) {
    return write_error(out_dir, "numeric_error", "Internal", e.what(), numeric_error);
  }
}

int selftest(bool full, const std::string& out) {
  const acceptance::Options opt =
      acceptance::options_from_environment(full ? acceptance::Level::full : acceptance::Level::quick);
  const auto results = acceptance::run_all(opt);
  int passed = 0;
  for (const auto& r : results) {
    std::cout << acceptance::format_line(r) << "\n";
    if (r.pass) ++passed;
  }
  std::cout << "selftest " << (full ? "full" : "quick") << ": " << passed << "/" << results.size() << " passed\n";
  if (full) {
    std::string csv = "criterion,name,pass,seconds\n";
    for (const auto& r : results)
      csv += std::to_string(r.id) + "," + r.name + "," + (r.pass ? "1" : "0") + "," + io::num(r.seconds) + "\n";
    const fs::path dir(out.empty() ? "." : out);
    fs::create_directories(dir);
    write_file(dir / "selftest_timing.csv", csv);
    std::cout << "timing written to " << (dir / "selftest_timing.csv").string() << "\n";
  }
  return passed == static_cast<int>(results.size()) ? ok : violation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gnslab: finite-dimensional GNS, Kadison and bundle computations"};
  app.require_subcommand(1);

  std::string scenario, out;
  std::optional<std::uint64_t> seed;
  Flags flags;
  auto* run_cmd = app.add_subcommand("run", "run a scenario file and write result.json");
  run_cmd->add_option("--scenario", scenario, "scenario JSON file")->required();
  run_cmd->add_option("--out", out, "output directory")->required();
  run_cmd->add_option("--seed", seed, "override the scenario seed");
  run_cmd->add_flag("--csv", flags.csv, "write CSV tables");
  run_cmd->add_flag("--svg", flags.svg, "write SVG figures");

  bool quick = false, full = false;
  std::string selftest_out;
  auto* st = app.add_subcommand("selftest", "run the acceptance criteria");
  st->add_flag("--quick", quick, "reduced sample counts");
  st->add_flag("--full", full, "full sample counts, writes a timing CSV");
  st->add_option("--out", selftest_out, "directory for the timing CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : input_error;
  }

  if (run_cmd->parsed()) return run(scenario, out, seed, flags);
  if (quick && full) {
    std::cerr << "gnslab: choose one of --quick and --full\n";
    return input_error;
  }
  return selftest(full, selftest_out);
}
