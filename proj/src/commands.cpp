#include "hbl/commands.hpp"

#include <cmath>
#include <sstream>

#include "hbl/maximal.hpp"

namespace hbl {

namespace {

std::string fmt(double v) { return format_decimal(v); }

Json ball_to_json(const FiniteSpace& space, const Ball& b) {
  std::vector<std::string> ids;
  for (PointIndex x : b.members) ids.push_back(space.id(x));
  return {{"center", space.id(b.center)}, {"radius", exact(b.radius)}, {"mass", exact(b.mass)}, {"memberIds", ids}};
}

Json tagged_values(const FiniteSpace& space, std::span<const double> f, Provenance p = Provenance::Exact) {
  Json out = Json::object();
  for (PointIndex x = 0; x < space.size(); ++x) out[space.id(x)] = tagged(f[x], p);
  return out;
}

double number(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) fail(ErrorCode::ParseError, std::string("/") + key + ": expected a number");
  return j[key].get<double>();
}

}  // namespace

Json forest_report(const FiniteSpace& space, const DyadicForest& forest) {
  const ForestVerification v = verify_forest(space, forest);
  return {{"forest", forest_to_json(space, forest)},
          {"verification", {{"ok", v.ok}, {"violations", v.violations}, {"a0", exact(v.a0)}, {"c1", exact(v.c1)}}}};
}

CommandOutput maximal_report(const FiniteSpace& space, const DyadicForest& forest, std::span<const double> f,
                             const MaximalRequest& request) {
  require(f.size() == space.size(), "function length differs from the space size");
  const int k = request.k_floor.value_or(base_resolution(forest));
  require(k >= forest.k_min && k <= forest.k_max, "k-floor outside the forest resolutions");
  IsoperimetricOptions io;
  io.seed = request.seed;
  const IsoperimetricProfile iso = isoperimetric_profile(space, io);
  GoodLambdaOptions go;
  go.eta_prime = request.eta_prime;
  go.eps = request.eps;
  go.b0 = request.b0;
  const auto mf = maximal_function(space, forest, f, k);
  const WeakTypeResult wt = weak_type_constant(space, forest, f, k);
  const GoodLambdaReport gl = good_lambda_check(space, forest, f, iso, go);
  const Provenance gp = iso.provenance;

  CommandOutput out;
  std::ostringstream csv;
  csv << "alpha,lhs,rhs,ratio,status,provenance\n";
  Json rows = Json::array();
  for (const auto& r : gl.rows) {
    rows.push_back({{"alpha", exact(r.alpha)},
                    {"lhs", exact(r.lhs)},
                    {"rhs", exact(r.rhs)},
                    {"ratio", exact(r.ratio)},
                    {"status", row_status_name(r.status)}});
    csv << fmt(r.alpha) << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ',' << fmt(r.ratio) << ','
        << row_status_name(r.status) << ',' << provenance_name(gp) << '\n';
  }
  const GoodLambdaConstants& c = gl.constants;
  out.json = {{"k_floor", k},
              {"maximal", tagged_values(space, mf)},
              {"weak_type", {{"constant", exact(wt.constant)}, {"alpha", exact(wt.alpha)}}},
              {"good_lambda",
               {{"constants",
                 {{"base_resolution", c.base_resolution},
                  {"kappa", exact(c.kappa)},
                  {"ihat", tagged(c.ihat, gp)},
                  {"c0", exact(c.c0)},
                  {"b_prime", exact(c.b_prime)},
                  {"sigma", tagged(c.sigma, gp)},
                  {"d", exact(c.d)},
                  {"eta_prime", exact(c.eta_prime)},
                  {"eps", tagged(c.eps, gp)},
                  {"eta", tagged(c.eta, gp)},
                  {"vacuous", c.vacuous}}},
                {"rows", std::move(rows)},
                {"passed", gl.passed},
                {"failed", gl.failed},
                {"not_applicable", gl.not_applicable},
                {"pass", gl.pass}}}};
  out.csv = csv.str();
  return out;
}

Json h1_norm_report(const FiniteSpace& space, std::span<const double> g, double b, bool with_terms) {
  H1Options opt;
  opt.keep_terms = with_terms;
  const H1Result r = h1_norm(space, g, b, opt);
  Json j = {{"b", exact(b)}, {"feasible", r.feasible}};
  if (!r.feasible) {
    j["reason"] = r.reason;
    return j;
  }
  j["value"] = exact(r.value);
  j["dual_value"] = exact(r.dual_value);
  j["gap"] = exact(r.gap);
  j["residual_l1"] = exact(r.residual_l1);
  j["columns"] = r.columns;
  j["iterations"] = r.iterations;
  j["dual_certificate"] = tagged_values(space, r.dual);
  if (with_terms) {
    Json terms = Json::array();
    for (const auto& t : r.terms) terms.push_back({{"lambda", exact(t.lambda)}, {"atom", atom_to_json(space, t.atom)}});
    j["terms"] = std::move(terms);
  }
  return j;
}

Json bmo_norm_report(const FiniteSpace& space, std::span<const double> f, double q, double b) {
  const BmoValue v = bmo_norm(space, f, q, b);
  return {{"q", exact(v.q)}, {"b", exact(v.b)}, {"value", exact(v.value)}, {"ball", ball_to_json(space, v.ball)}};
}

Atom atom_from_json(const FiniteSpace& space, const Json& j) {
  if (!j.is_object() || !j.contains("center") || !j["center"].is_string())
    fail(ErrorCode::ParseError, "/center: expected a point id");
  const auto c = space.find(j["center"].get<std::string>());
  if (!c) fail(ErrorCode::ParseError, "/center: unknown point id");
  Atom a;
  a.ball = ball(space, *c, number(j, "radius"));
  a.values.assign(space.size(), 0.0);
  if (!j.contains("values") || !j["values"].is_object()) fail(ErrorCode::ParseError, "/values: expected an object");
  for (const auto& [id, v] : j["values"].items()) {
    const auto x = space.find(id);
    if (!x) fail(ErrorCode::ParseError, "/values/" + id + ": unknown point id");
    if (!v.is_number()) fail(ErrorCode::ParseError, "/values/" + id + ": expected a number");
    a.values[*x] = v.get<double>();
  }
  return a;
}

Json atom_to_json(const FiniteSpace& space, const Atom& atom) {
  Json values = Json::object();
  for (PointIndex x : atom.ball.members) values[space.id(x)] = exact(atom.values[x]);
  return {{"ball", ball_to_json(space, atom.ball)}, {"values", std::move(values)}};
}

Json split_atom_report(const FiniteSpace& space, const Atom& atom, const SplitOptions& options) {
  const AtomCheck check = validate_atom(space, atom);
  if (!check.ok) fail(ErrorCode::InvalidParameter, "input is not an atom: " + check.violations.front());
  const SplitResult r = split_atom(space, atom, options);
  Json terms = Json::array();
  bool all_valid = true;
  for (const auto& t : r.terms) {
    const bool ok = validate_atom(space, t.atom).ok;
    all_valid = all_valid && ok;
    terms.push_back({{"lambda", exact(t.lambda)}, {"valid", ok}, {"atom", atom_to_json(space, t.atom)}});
  }
  return {{"passes", r.passes},
          {"beta_prime", exact(r.beta_prime)},
          {"coefficient_bound", exact(r.coefficient_bound)},
          {"count_bound", exact(r.count_bound)},
          {"max_pass_coefficient", exact(r.max_pass_coefficient)},
          {"max_pass_count", r.max_pass_count},
          {"residual_relative", exact(r.residual_relative)},
          {"all_valid", all_valid},
          {"terms", std::move(terms)}};
}

CommandOutput jn_report(const FiniteSpace& space, const DyadicForest& forest, std::span<const double> f,
                        std::optional<double> b0, double q, double r0, double beta) {
  const double scale = b0.value_or(default_b0(space, r0, beta));
  const JnReport jn = jn_experiment(space, forest, f, scale);
  const JnCorollary cor = jn_corollary(space, f, jn, q);
  CommandOutput out;
  std::ostringstream csv;
  csv << "s,ratio,envelope,provenance\n";
  Json rows = Json::array();
  for (const auto& r : jn.rows) {
    const double env = jn.j * std::exp(-jn.eta * r.s / jn.n);
    rows.push_back({{"s", exact(r.s)}, {"ratio", exact(r.ratio)}, {"envelope", estimate(env)}});
    csv << fmt(r.s) << ',' << fmt(r.ratio) << ',' << fmt(env) << ",estimate\n";
  }
  out.json = {{"b0", exact(jn.b0)},
              {"norm_scale", exact(jn.norm_scale)},
              {"n", exact(jn.n)},
              {"eta", estimate(jn.eta)},
              {"j", estimate(jn.j)},
              {"fitted", jn.fitted},
              {"degenerate", jn.degenerate},
              {"covered", jn.covered},
              {"rows", std::move(rows)},
              {"corollary",
               {{"q", exact(cor.q)}, {"nq", exact(cor.nq)}, {"bound", estimate(cor.bound)}, {"holds", cor.holds}}}};
  out.csv = csv.str();
  return out;
}

Json pairing_report(const FiniteSpace& space, std::span<const double> f, std::span<const double> g, double b) {
  const PairingCheck pc = duality_pairing_check(space, f, g, b);
  if (pc.skipped) return {{"b", exact(b)}, {"skipped", true}, {"pairing", exact(pc.pairing)}};
  return {{"b", exact(b)},
          {"skipped", false},
          {"pairing", exact(pc.pairing)},
          {"n1", exact(pc.n1)},
          {"h1", exact(pc.h1)},
          {"bound", exact(pc.bound)},
          {"lp_gap", exact(pc.gap)},
          {"holds", pc.holds}};
}

Multiplier multiplier_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    fail(ErrorCode::ParseError, "/kind: expected a multiplier name");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "heat") return heat_multiplier(number(j, "t"));
  if (kind == "resolvent") return resolvent_multiplier(number(j, "s"));
  if (kind == "band") return band_multiplier(number(j, "cutoff"), number(j, "width"));
  if (kind == "polynomial") {
    if (!j.contains("coeffs") || !j["coeffs"].is_array()) fail(ErrorCode::ParseError, "/coeffs: expected an array");
    std::vector<double> c;
    for (const auto& v : j["coeffs"]) {
      if (!v.is_number()) fail(ErrorCode::ParseError, "/coeffs: expected numbers");
      c.push_back(v.get<double>());
    }
    return polynomial_multiplier(std::move(c));
  }
  fail(ErrorCode::InvalidParameter, "unknown multiplier kind '" + kind + "'");
}

Json operator_report(const FiniteSpace& space, const KernelOperator& op, double b, std::size_t samples,
                     std::uint64_t seed) {
  require(op.n == space.size(), "operator and space sizes differ");
  const double l2 = l2_norm(space, op);
  const HormanderConstants h = hormander_constants(space, op, b);
  const NormEstimate e1 = h1_to_l1_estimate(space, op, b, samples, seed);
  const NormEstimate e2 = linf_to_bmo_estimate(space, op, b, samples, seed);
  auto witness = [&](std::size_t ball_index, PointIndex y, PointIndex y2) {
    return Json{{"ball", ball_index}, {"y", space.id(y)}, {"y2", space.id(y2)}};
  };
  return {{"name", op.name},
          {"b", exact(b)},
          {"self_adjoint", is_self_adjoint(op)},
          {"l2_norm", exact(l2)},
          {"nu", exact(h.nu)},
          {"upsilon", exact(h.upsilon)},
          {"nu_witness", witness(h.nu_ball, h.nu_y, h.nu_y2)},
          {"upsilon_witness", witness(h.upsilon_ball, h.upsilon_y, h.upsilon_y2)},
          {"h1_l1_estimate", tagged(e1.estimate, e1.provenance)},
          {"linf_bmo_estimate", tagged(e2.estimate, e2.provenance)},
          {"samples", e1.samples}};
}

}  // namespace hbl
