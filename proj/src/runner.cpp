#include "hbl/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include "hbl/corpus.hpp"
#include "hbl/dyadic.hpp"
#include "hbl/hardy_bmo.hpp"
#include "hbl/maximal.hpp"
#include "hbl/operators.hpp"

namespace hbl {

namespace {

const std::vector<std::string> kSuiteOrder{"geometry", "dyadic", "maximal", "hardy_bmo", "operators"};

[[noreturn]] void usage(const std::string& field, const std::string& what) {
  fail(ErrorCode::InvalidParameter, "config field '" + field + "': " + what);
}

double positive(const Json& j, const std::string& field) {
  if (!j.is_number() || !(j.get<double>() > 0.0) || !std::isfinite(j.get<double>()))
    usage(field, "expected a positive number");
  return j.get<double>();
}

std::size_t count(const Json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 1) usage(field, "expected a positive integer");
  return j.get<std::size_t>();
}

std::uint64_t parse_seed(const std::string& text, const std::string& field) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) usage(field, "not an unsigned integer");
    return v;
  } catch (const std::logic_error&) {
    usage(field, "not an unsigned integer");
  }
}

// ------------------------------------------------------------------ output

struct SuiteOutput {
  Json json = Json::object();
  std::vector<std::pair<std::string, std::string>> csv;
  std::vector<std::string> hard;
  std::vector<std::string> warnings;

  void check(bool ok, const std::string& id, const std::string& detail = {}) {
    if (!ok) hard.push_back(detail.empty() ? id : id + ": " + detail);
  }
  void soft(bool ok, const std::string& id, const std::string& detail = {}) {
    if (!ok) warnings.push_back(detail.empty() ? id : id + ": " + detail);
  }
};

std::string fmt(double v) { return format_decimal(v); }

struct Shared {
  const ExperimentConfig* config = nullptr;
  const FiniteSpace* space = nullptr;
  std::uint64_t seed = 0;
  std::optional<DyadicForest> forest;
  std::optional<IsoperimetricProfile> iso;
};

enum Stream : std::uint64_t { kTieBreak = 1, kIso, kMaximal, kHardy, kOperators };

bool unit_weights(const FiniteSpace& s) {
  return std::all_of(s.weights().begin(), s.weights().end(), [](double w) { return w == 1.0; });
}

// ------------------------------------------------------------------ geometry

SuiteOutput geometry_suite(const Shared& sh) {
  const FiniteSpace& s = *sh.space;
  const ExperimentConfig& cfg = *sh.config;
  SuiteOutput out;

  const std::vector<double> bs{cfg.c, cfg.b};
  const std::vector<double> taus{2.0, 4.0};
  Json doubling = Json::array();
  std::ostringstream dcsv;
  dcsv << "tau,b,value,provenance\n";
  for (const auto& e : doubling_constants(s, taus, bs)) {
    doubling.push_back({{"tau", exact(e.tau)}, {"b", exact(e.b)}, {"value", exact(e.value)}});
    dcsv << fmt(e.tau) << ',' << fmt(e.b) << ',' << fmt(e.value) << ",exact\n";
    out.check(e.value >= 1.0, "geometry.doubling_at_least_one", "tau=" + fmt(e.tau) + " b=" + fmt(e.b));
  }
  out.json["doubling"] = std::move(doubling);
  out.csv.emplace_back("doubling.csv", dcsv.str());

  const IsoperimetricProfile& iso = *sh.iso;
  Json profile = Json::array();
  std::ostringstream icsv;
  icsv << "kappa,raw,constant,provenance\n";
  const std::string prov(provenance_name(iso.provenance));
  for (std::size_t i = 0; i < iso.kappas.size(); ++i) {
    profile.push_back({{"kappa", exact(iso.kappas[i])},
                       {"raw", tagged(iso.raw[i], iso.provenance)},
                       {"constant", tagged(iso.constants[i], iso.provenance)}});
    icsv << fmt(iso.kappas[i]) << ',' << fmt(iso.raw[i]) << ',' << fmt(iso.constants[i]) << ',' << prov << '\n';
    if (i > 0) out.check(iso.constants[i] <= iso.constants[i - 1], "geometry.isoperimetric_monotone");
  }
  out.json["isoperimetric"] = {{"profile", std::move(profile)},
                               {"ihat", tagged(iso.ihat, iso.provenance)},
                               {"subsets_examined", iso.subsets_examined}};
  out.csv.emplace_back("isoperimetric.csv", icsv.str());

  const AmpResult amp = amp_check(s, cfg.r0, cfg.beta, 8);
  Json violations = Json::array();
  for (const auto& v : amp.violations)
    violations.push_back({{"x", s.id(v.x)}, {"y", s.id(v.y)}, {"distance", exact(v.distance)},
                          {"best_radius", exact(v.best_radius)}});
  out.json["amp"] = {{"r0", exact(cfg.r0)},         {"beta", exact(cfg.beta)},
                     {"pass", amp.pass},            {"pairs_checked", amp.pairs_checked},
                     {"violations", std::move(violations)}};

  Json growth = Json::array();
  for (const auto& [r, m] : volume_growth(s, 0)) growth.push_back({{"r", exact(r)}, {"mass", exact(m)}});
  out.json["volume_growth"] = {{"origin", s.id(0)}, {"rows", std::move(growth)}};

  if (s.has_adjacency() && s.size() > 1) {
    const CheegerResult ch = cheeger_constant(s);
    const double gap = spectral_gap(s);
    const std::size_t deg = max_degree(s);
    const double bound = ch.h * ch.h / (2.0 * static_cast<double>(deg));
    const bool holds = gap >= bound * (1.0 - 1e-12);
    const Provenance hp = ch.exact ? Provenance::Exact : Provenance::Estimate;
    out.json["cheeger"] = {{"h", tagged(ch.h, hp)},
                           {"exact", ch.exact},
                           {"disconnected", ch.disconnected},
                           {"spectral_gap", exact(gap)},
                           {"max_degree", deg},
                           {"lower_bound", tagged(bound, hp)},
                           {"holds", holds}};
    if (ch.exact && unit_weights(s))
      out.check(holds || ch.disconnected, "geometry.cheeger_spectral_gap");
    else
      out.soft(holds || ch.disconnected, "geometry.cheeger_spectral_gap");
  }
  return out;
}

// ------------------------------------------------------------------ dyadic

SuiteOutput dyadic_suite(const Shared& sh) {
  const FiniteSpace& s = *sh.space;
  const ExperimentConfig& cfg = *sh.config;
  const DyadicForest& f = *sh.forest;
  SuiteOutput out;

  const ForestVerification v = verify_forest(s, f);
  Json levels = Json::array();
  for (int k = f.k_min; k <= f.k_max; ++k)
    levels.push_back({{"k", k}, {"scale", exact(f.scale(k))}, {"cubes", f.level(k).size()}});
  out.json["forest"] = {{"delta", exact(f.delta)},
                        {"tie_break", cfg.random_tie_break ? "random" : "id"},
                        {"k_min", f.k_min},
                        {"k_max", f.k_max},
                        {"a0", exact(f.realized_a0)},
                        {"c1", exact(f.realized_c1)},
                        {"levels", std::move(levels)}};
  out.json["verification"] = {{"ok", v.ok}, {"violations", v.violations}};
  out.check(v.ok, "dyadic.verify_forest", v.violations.empty() ? "" : v.violations.front());

  // Exhaustive cube/ball interaction on small spaces.
  if (s.size() <= 30) {
    const BallFamily family = enumerate_balls(s, cfg.b);
    std::size_t pairs = 0, equality = 0, failures = 0;
    for (const Ball& b : family.balls)
      for (int k = f.k_min; k <= f.k_max; ++k) {
        const CubeBallInteraction r = cube_ball_interaction(s, f, b, k, f.cube_index(k, b.center));
        ++pairs;
        if (r.contained_case) ++equality;
        if (!r.holds) ++failures;
      }
    out.json["cube_ball"] = {{"pairs", pairs}, {"equality_cases", equality}, {"failures", failures}};
    out.check(failures == 0, "dyadic.cube_ball_interaction", std::to_string(failures) + " pairs");
  }

  // Cubes meeting a ball at its own resolution stay inside the (1 + C1) dilate.
  {
    const BallFamily family = enumerate_balls(s, std::max(s.diameter() / 4.0, s.min_distance()));
    std::size_t escapes = 0, max_count = 0;
    for (const Ball& b : family.balls) {
      const int k = resolution_for_radius(f, b.radius);
      const auto meeting = cubes_meeting(f, k, b);
      max_count = std::max(max_count, meeting.size());
      const double reach = (1.0 + f.realized_c1) * b.radius;
      for (std::size_t qi : meeting)
        for (PointIndex x : f.level(k)[qi].members)
          if (!(s.distance(b.center, x) < reach)) {
            ++escapes;
            break;
          }
    }
    out.json["cubes_meeting_balls"] = {{"balls", family.balls.size()}, {"max_cubes", max_count},
                                       {"escapes", escapes}};
    out.check(escapes == 0, "dyadic.cubes_meeting_ball");
  }

  // Covering selection for a ball around the first point.
  {
    std::vector<char> in_a(s.size(), 0);
    std::size_t members = 0;
    for (PointIndex x = 0; x < s.size(); ++x)
      if (s.distance(0, x) < s.diameter() / 2.0) {
        in_a[x] = 1;
        ++members;
      }
    if (members > 0 && members < s.size()) {
      const double kappa = std::max(1.0, s.min_distance());
      const CoveringSelection sel = covering_select(s, f, in_a, kappa, f.k_min, sh.iso->ihat);
      bool near = true;
      for (const auto& q : sel.selected) near = near && q.distance_to_complement <= kappa;
      out.json["covering"] = {{"kappa", exact(kappa)},
                              {"selected", sel.selected.size()},
                              {"target_fraction", tagged(sel.target_fraction, sh.iso->provenance)},
                              {"achieved_fraction", exact(sel.achieved_fraction)},
                              {"feasible", sel.feasible}};
      out.check(near, "dyadic.covering_boundary_proximal");
      out.soft(sel.feasible, "dyadic.covering_target");
    }
  }
  return out;
}

// ------------------------------------------------------------------ maximal

SuiteOutput maximal_suite(const Shared& sh) {
  const FiniteSpace& s = *sh.space;
  const ExperimentConfig& cfg = *sh.config;
  const DyadicForest& f = *sh.forest;
  const IsoperimetricProfile& iso = *sh.iso;
  SuiteOutput out;
  Rng rng = make_rng(sh.seed, kMaximal);

  std::vector<std::vector<double>> corpus{log_distance(s, 0)};
  {
    std::vector<double> ind(s.size(), 0.0);
    for (PointIndex x : ball(s, 0, cfg.b).members) ind[x] = 1.0;
    corpus.push_back(std::move(ind));
  }
  for (std::size_t i = 0; i < cfg.functions; ++i) corpus.push_back(gaussian_function(s, rng));

  const int kb = base_resolution(f);
  GoodLambdaOptions gopt;
  gopt.b0 = cfg.b0.value_or(0.0);
  const Provenance gp = iso.provenance;

  Json functions = Json::array();
  std::ostringstream gcsv;
  gcsv << "function,alpha,lhs,rhs,ratio,status,provenance\n";
  std::size_t passed = 0, failed = 0, na = 0;
  GoodLambdaConstants constants;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& g = corpus[i];
    std::size_t below = 0;
    for (int k : {f.k_min, kb}) {
      const auto mf = maximal_function(s, f, g, k);
      for (PointIndex x = 0; x < s.size(); ++x)
        if (mf[x] < std::fabs(g[x])) ++below;
    }
    out.check(below == 0, "maximal.pointwise_domination", "function " + std::to_string(i));
    const WeakTypeResult wt = weak_type_constant(s, f, g, kb);
    const GoodLambdaReport gl = good_lambda_check(s, f, g, iso, gopt);
    constants = gl.constants;
    passed += gl.passed;
    failed += gl.failed;
    na += gl.not_applicable;
    for (const auto& row : gl.rows)
      gcsv << i << ',' << fmt(row.alpha) << ',' << fmt(row.lhs) << ',' << fmt(row.rhs) << ',' << fmt(row.ratio) << ','
           << row_status_name(row.status) << ',' << provenance_name(gp) << '\n';
    functions.push_back({{"index", i},
                         {"weak_type", exact(wt.constant)},
                         {"weak_type_alpha", exact(wt.alpha)},
                         {"good_lambda", {{"passed", gl.passed}, {"failed", gl.failed}, {"not_applicable", gl.not_applicable}}}});
    const std::string id = "maximal.good_lambda";
    if (gp == Provenance::Exact)
      out.check(gl.pass, id, "function " + std::to_string(i));
    else
      out.soft(gl.pass, id, "function " + std::to_string(i));
  }
  out.csv.emplace_back("good_lambda.csv", gcsv.str());

  out.json["base_resolution"] = kb;
  out.json["functions"] = std::move(functions);
  out.json["good_lambda"] = {{"constants",
                              {{"kappa", exact(constants.kappa)},
                               {"ihat", tagged(constants.ihat, gp)},
                               {"c0", exact(constants.c0)},
                               {"b_prime", exact(constants.b_prime)},
                               {"sigma", tagged(constants.sigma, gp)},
                               {"d", exact(constants.d)},
                               {"eta_prime", exact(constants.eta_prime)},
                               {"eps", tagged(constants.eps, gp)},
                               {"eta", tagged(constants.eta, gp)},
                               {"vacuous", constants.vacuous}}},
                             {"passed", passed},
                             {"failed", failed},
                             {"not_applicable", na}};

  const std::vector<double> ps{2.0};
  const auto lower = sharp_lower_bound(s, corpus, ps, constants.b_prime);
  out.json["sharp_lower_bound"] = {{"p", exact(lower[0].p)},
                                   {"min_ratio", estimate(std::isfinite(lower[0].min_ratio) ? lower[0].min_ratio : 0.0)},
                                   {"evaluated", lower[0].evaluated},
                                   {"skipped", lower[0].skipped}};
  out.soft(lower[0].evaluated > 0 && lower[0].min_ratio > 0.0, "maximal.sharp_lower_bound");
  return out;
}

// ------------------------------------------------------------------ hardy_bmo

SuiteOutput hardy_suite(const Shared& sh) {
  const FiniteSpace& s = *sh.space;
  const ExperimentConfig& cfg = *sh.config;
  SuiteOutput out;
  Rng rng = make_rng(sh.seed, kHardy);
  const std::size_t n = s.size();

  std::vector<std::vector<double>> gs, fs;
  for (std::size_t i = 0; i < cfg.functions; ++i) {
    const PointIndex x = rng() % n;
    gs.push_back(local_mean_zero(s, ball(s, x, cfg.c), rng));
    fs.push_back(gaussian_function(s, rng));
  }

  Json solves = Json::array();
  std::ostringstream hcsv;
  hcsv << "function,feasible,value,dual_value,gap,residual_l1,provenance\n";
  double max_gap = 0.0;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    H1Options opt;
    opt.keep_terms = false;
    const H1Result r = h1_norm(s, gs[i], cfg.b, opt);
    solves.push_back({{"index", i},
                      {"feasible", r.feasible},
                      {"value", exact(r.value)},
                      {"dual_value", exact(r.dual_value)},
                      {"gap", exact(r.gap)},
                      {"residual_l1", exact(r.residual_l1)},
                      {"columns", r.columns},
                      {"iterations", r.iterations}});
    hcsv << i << ',' << (r.feasible ? 1 : 0) << ',' << fmt(r.value) << ',' << fmt(r.dual_value) << ',' << fmt(r.gap)
         << ',' << fmt(r.residual_l1) << ",exact\n";
    max_gap = std::max(max_gap, std::fabs(r.gap));
    const bool trivial = std::all_of(gs[i].begin(), gs[i].end(), [](double v) { return v == 0.0; });
    out.check(r.feasible || trivial, "hardy_bmo.local_feasible", "function " + std::to_string(i));
    out.check(std::fabs(r.gap) <= 1e-6, "hardy_bmo.lp_gap", "function " + std::to_string(i));
  }
  out.json["h1_norm"] = {{"b", exact(cfg.b)}, {"solves", std::move(solves)}, {"max_gap", exact(max_gap)}};
  out.csv.emplace_back("h1_norm.csv", hcsv.str());

  std::size_t pairing_failures = 0, pairing_checked = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const PairingCheck pc = duality_pairing_check(s, fs[i], gs[i], cfg.b);
    if (pc.skipped) continue;
    ++pairing_checked;
    if (!pc.holds) ++pairing_failures;
    if (pc.bound > 0.0) worst = std::max(worst, std::fabs(pc.pairing) / pc.bound);
  }
  out.json["pairing"] = {{"checked", pairing_checked}, {"failures", pairing_failures}, {"max_ratio", exact(worst)}};
  out.check(pairing_failures == 0, "hardy_bmo.pairing_bound");

  // both steps below need (AMP) at the configured (r0, beta)
  const AmpResult amp = amp_check(s, cfg.r0, cfg.beta, 1);
  out.soft(amp.pass, "hardy_bmo.amp", "scale equivalence and atom splitting skipped");
  if (!amp.pass) {
    out.json["scale_equivalence"] = {{"skipped", "amp"}};
    out.json["split_atom"] = {{"skipped", "amp"}};
  }
  if (amp.pass) try {
    const ScaleEquivalence h = h1_scale_equivalence(s, gs, cfg.b, cfg.c, cfg.r0, cfg.beta);
    const ScaleEquivalence m = bmo_scale_equivalence(s, fs, cfg.q, cfg.b, cfg.c, cfg.r0, cfg.beta);
    auto js = [](const ScaleEquivalence& e) {
      return Json{{"max_ratio", exact(e.max_ratio)},
                  {"instances", e.instances},
                  {"skipped", e.skipped},
                  {"ordering_violations", e.ordering_violations},
                  {"infeasible_at_c", e.infeasible_at_c}};
    };
    out.json["scale_equivalence"] = {{"b", exact(cfg.b)}, {"c", exact(cfg.c)}, {"h1", js(h)}, {"bmo", js(m)}};
    out.check(h.ordering_violations == 0, "hardy_bmo.h1_scale_ordering");
    out.check(m.ordering_violations == 0, "hardy_bmo.bmo_scale_ordering");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AmpFailure) throw;
    out.json["scale_equivalence"] = {{"error", e.what()}};
    out.check(false, "hardy_bmo.amp", e.what());
  }

  // Atom splitting from scale b down to scale c.
  if (amp.pass) {
    const BallFamily family = enumerate_balls(s, cfg.b);
    std::vector<const Ball*> usable;
    for (const Ball& b : family.balls)
      if (b.members.size() > 1) usable.push_back(&b);
    SplitOptions so;
    so.c = cfg.c;
    so.b_big = cfg.b;
    so.beta = cfg.beta;
    so.r0 = cfg.r0;
    std::size_t bad = 0, done = 0;
    double worst_residual = 0.0;
    std::string first_error;
    std::vector<double> scores(n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < cfg.atoms && !usable.empty(); ++i) {
      const Ball& b = *usable[rng() % usable.size()];
      for (double& v : scores) v = unit(rng);
      const Atom a = vertex_atom(s, b, scores);
      try {
        const SplitResult r = split_atom(s, a, so);
        ++done;
        worst_residual = std::max(worst_residual, r.residual_relative);
        bool ok = r.residual_relative <= 1e-9 && r.max_pass_coefficient <= r.coefficient_bound * (1.0 + 1e-12) &&
                  static_cast<double>(r.max_pass_count) <= r.count_bound;
        for (const auto& t : r.terms) ok = ok && validate_atom(s, t.atom).ok && t.atom.ball.radius <= cfg.c;
        if (!ok) ++bad;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NonContraction && e.code() != ErrorCode::AmpFailure) throw;
        ++bad;
        if (first_error.empty()) first_error = e.what();
      }
    }
    out.json["split_atom"] = {{"atoms", done}, {"failures", bad}, {"max_residual", exact(worst_residual)}};
    out.check(bad == 0, "hardy_bmo.split_atom", first_error);
  }

  {
    const double b0 = cfg.b0.value_or(default_b0(s, cfg.r0, cfg.beta));
    const auto f = log_distance(s, 0);
    const JnReport jn = jn_experiment(s, *sh.forest, f, b0);
    const JnCorollary cor = jn_corollary(s, f, jn, cfg.q);
    std::ostringstream jcsv;
    jcsv << "s,ratio,envelope,provenance\n";
    for (const auto& row : jn.rows)
      jcsv << fmt(row.s) << ',' << fmt(row.ratio) << ',' << fmt(jn.j * std::exp(-jn.eta * row.s / jn.n)) << ",estimate\n";
    out.csv.emplace_back("jn.csv", jcsv.str());
    out.json["john_nirenberg"] = {{"b0", exact(jn.b0)},
                                  {"norm_scale", exact(jn.norm_scale)},
                                  {"n", exact(jn.n)},
                                  {"rows", jn.rows.size()},
                                  {"eta", estimate(jn.eta)},
                                  {"j", estimate(jn.j)},
                                  {"fitted", jn.fitted},
                                  {"degenerate", jn.degenerate},
                                  {"covered", jn.covered},
                                  {"corollary",
                                   {{"q", exact(cor.q)}, {"nq", exact(cor.nq)}, {"bound", estimate(cor.bound)},
                                    {"holds", cor.holds}}}};
    out.soft(jn.degenerate || (jn.eta > 0.0 && jn.covered), "hardy_bmo.john_nirenberg_envelope");
    out.soft(jn.degenerate || cor.holds, "hardy_bmo.john_nirenberg_corollary");
  }

  // Unit-distance graphs: H^1 at scale 1 is trivial, local functions live at scale 2.
  if (s.has_adjacency() && n > 1 && s.min_distance() == 1.0) {
    std::size_t infeasible = 0, feasible = 0;
    for (std::size_t i = 0; i < cfg.triviality; ++i) {
      std::string why;
      if (!h1_feasible(s, enumerate_balls(s, 1.0), global_mean_zero(s, rng), &why)) ++infeasible;
      const PointIndex x = rng() % n;
      const auto g = local_mean_zero(s, ball(s, x, 2.0), rng);
      if (h1_norm(s, g, 2.0).feasible) ++feasible;
    }
    out.json["triviality"] = {{"samples", cfg.triviality}, {"infeasible_at_1", infeasible}, {"feasible_at_2", feasible}};
    out.check(infeasible == cfg.triviality, "hardy_bmo.triviality_scale_1");
    out.check(feasible == cfg.triviality, "hardy_bmo.local_feasible_scale_2");
  }
  return out;
}

// ------------------------------------------------------------------ operators

SuiteOutput operators_suite(const Shared& sh) {
  const FiniteSpace& s = *sh.space;
  const ExperimentConfig& cfg = *sh.config;
  SuiteOutput out;
  if (!s.has_adjacency() || s.size() < 2 || s.size() > 2000) {
    out.json["skipped"] = "spectral multipliers need a graph space with 2 to 2000 points";
    return out;
  }
  const std::vector<Multiplier> corpus{heat_multiplier(0.5), heat_multiplier(1.0), resolvent_multiplier(1.0),
                                       band_multiplier(1.0, 0.25)};
  const BallFamily family = enumerate_balls(s, cfg.b);
  Json ops = Json::array();
  std::ostringstream ocsv;
  ocsv << "operator,l2_norm,nu,upsilon,h1_l1_estimate,linf_bmo_estimate,h1_ratio,bmo_ratio,provenance\n";
  double fitted = 0.0;
  std::vector<KernelOperator> kernels;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    KernelOperator op = spectral_multiplier(s, corpus[i]);
    const double l2 = l2_norm(s, op);
    const HormanderConstants h = hormander_constants(s, op, family);
    const bool sa = is_self_adjoint(op);
    if (sa) out.check(h.nu == h.upsilon, "operators.nu_equals_upsilon", op.name);
    const NormEstimate e1 = h1_to_l1_estimate(s, op, cfg.b, cfg.operator_samples, sh.seed + i);
    const NormEstimate e2 = linf_to_bmo_estimate(s, op, cfg.b, cfg.operator_samples, sh.seed + i);
    const double r1 = e1.estimate / (h.nu + l2), r2 = e2.estimate / (h.upsilon + l2);
    fitted = std::max({fitted, r1, r2});
    ops.push_back({{"name", op.name},
                   {"self_adjoint", sa},
                   {"l2_norm", exact(l2)},
                   {"nu", exact(h.nu)},
                   {"upsilon", exact(h.upsilon)},
                   {"h1_l1_estimate", estimate(e1.estimate)},
                   {"linf_bmo_estimate", estimate(e2.estimate)},
                   {"samples", e1.samples},
                   {"h1_ratio", estimate(r1)},
                   {"bmo_ratio", estimate(r2)}});
    ocsv << op.name << ',' << fmt(l2) << ',' << fmt(h.nu) << ',' << fmt(h.upsilon) << ',' << fmt(e1.estimate) << ','
         << fmt(e2.estimate) << ',' << fmt(r1) << ',' << fmt(r2) << ",estimate\n";
    kernels.push_back(std::move(op));
  }
  out.csv.emplace_back("operators.csv", ocsv.str());

  // heat(0.5) heat(1) = heat(1.5) as operator matrices
  const std::size_t n = s.size();
  const auto a = operator_matrix(s, kernels[0]), b = operator_matrix(s, kernels[1]);
  const auto c = operator_matrix(s, spectral_multiplier(s, heat_multiplier(1.5)));
  double err = 0.0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      double v = 0.0;
      for (std::size_t z = 0; z < n; ++z) v += a[x * n + z] * b[z * n + y];
      err = std::max(err, std::fabs(v - c[x * n + y]));
    }
  out.check(err <= 1e-9, "operators.functional_calculus", "error " + fmt(err));
  out.json["operators"] = std::move(ops);
  out.json["functional_calculus_error"] = exact(err);
  out.json["fitted_c"] = estimate(fitted);
  return out;
}

}  // namespace

ExperimentConfig parse_config(const Json& j, bool use_environment) {
  if (!j.is_object()) usage("<root>", "expected an object");
  static const std::set<std::string> known{"space", "delta", "tie_break", "scales", "suites", "seed", "samples", "output"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) usage(k, "unknown field");

  ExperimentConfig c;
  if (!j.contains("space") || !j["space"].is_object()) usage("space", "a generator spec or {\"file\": path} is required");
  c.space = j["space"];
  if (j.contains("delta")) {
    c.delta = positive(j["delta"], "delta");
    if (c.delta >= 1.0) usage("delta", "must lie in (0, 1)");
  }
  if (j.contains("tie_break")) {
    const Json& t = j["tie_break"];
    if (!t.is_string() || (t != "id" && t != "random")) usage("tie_break", "expected \"id\" or \"random\"");
    c.random_tie_break = t == "random";
  }
  if (j.contains("scales")) {
    const Json& s = j["scales"];
    if (!s.is_object()) usage("scales", "expected an object");
    static const std::set<std::string> scale_keys{"b", "c", "b0", "q", "r", "r0", "beta"};
    for (const auto& [k, v] : s.items())
      if (!scale_keys.count(k)) usage("scales." + k, "unknown field");
    if (s.contains("b")) c.b = positive(s["b"], "scales.b");
    if (s.contains("c")) c.c = positive(s["c"], "scales.c");
    if (s.contains("b0")) c.b0 = positive(s["b0"], "scales.b0");
    if (s.contains("q")) {
      c.q = positive(s["q"], "scales.q");
      if (c.q < 1.0) usage("scales.q", "must be at least 1");
    }
    if (s.contains("r0")) c.r0 = positive(s["r0"], "scales.r0");
    if (s.contains("beta")) {
      c.beta = positive(s["beta"], "scales.beta");
      if (c.beta <= 0.5 || c.beta >= 1.0) usage("scales.beta", "must lie in (1/2, 1)");
    }
    if (s.contains("r") && !(s["r"].is_string() && s["r"] == "inf"))
      usage("scales.r", "only \"inf\" is supported");
  }
  if (c.c >= c.b) usage("scales.c", "must be smaller than scales.b");

  if (j.contains("suites")) {
    if (!j["suites"].is_array()) usage("suites", "expected an array");
    std::set<std::string> wanted;
    for (const Json& s : j["suites"]) {
      if (!s.is_string() || std::find(kSuiteOrder.begin(), kSuiteOrder.end(), s.get<std::string>()) == kSuiteOrder.end())
        usage("suites", "unknown suite " + s.dump());
      wanted.insert(s.get<std::string>());
    }
    for (const auto& name : kSuiteOrder)
      if (wanted.count(name)) c.suites.push_back(name);
  }
  const bool hardy = std::find(c.suites.begin(), c.suites.end(), "hardy_bmo") != c.suites.end();
  if (hardy && !(c.r0 / (1.0 - c.beta) < c.c))
    usage("scales.c", "must exceed r0 / (1 - beta) = " + format_decimal(c.r0 / (1.0 - c.beta)));

  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) usage("seed", "expected an unsigned integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (use_environment)
    if (const char* env = std::getenv("HBL_SEED"); env && *env) c.seed = parse_seed(env, "HBL_SEED");
  if (!c.suites.empty() && !c.seed) usage("seed", "required when any suite is requested");

  if (j.contains("samples")) {
    const Json& s = j["samples"];
    if (!s.is_object()) usage("samples", "expected an object");
    static const std::set<std::string> sample_keys{"functions", "atoms", "operator", "triviality"};
    for (const auto& [k, v] : s.items())
      if (!sample_keys.count(k)) usage("samples." + k, "unknown field");
    if (s.contains("functions")) c.functions = count(s["functions"], "samples.functions");
    if (s.contains("atoms")) c.atoms = count(s["atoms"], "samples.atoms");
    if (s.contains("operator")) c.operator_samples = count(s["operator"], "samples.operator");
    if (s.contains("triviality")) c.triviality = count(s["triviality"], "samples.triviality");
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) usage("output", "expected a path");
    c.output = j["output"].get<std::string>();
  }

  c.echo = {{"space", c.space},
            {"delta", c.delta},
            {"tie_break", c.random_tie_break ? "random" : "id"},
            {"scales", {{"b", c.b}, {"c", c.c}, {"q", c.q}, {"r", "inf"}, {"r0", c.r0}, {"beta", c.beta}}},
            {"suites", c.suites},
            {"samples",
             {{"functions", c.functions}, {"atoms", c.atoms}, {"operator", c.operator_samples},
              {"triviality", c.triviality}}}};
  if (c.b0) c.echo["scales"]["b0"] = *c.b0;
  if (c.seed) c.echo["seed"] = *c.seed;
  return c;
}

RunReport run(const ExperimentConfig& config, bool parallel) {
  using Clock = std::chrono::steady_clock;
  RunReport rr;
  rr.report["tool"] = {{"name", "hbl"}, {"version", kToolVersion}};
  rr.report["config"] = config.echo;
  rr.timing["suites"] = Json::object();
  auto seconds = [](Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); };

  if (config.suites.empty()) {
    rr.report["status"] = "pass";
    return rr;
  }

  const auto t_space = Clock::now();
  const FiniteSpace space = space_from_spec(config.space);
  Shared sh;
  sh.config = &config;
  sh.space = &space;
  sh.seed = *config.seed;
  rr.report["space"] = {{"points", space.size()},
                        {"graph", space.has_adjacency()},
                        {"total_mass", exact(space.total_mass())},
                        {"diameter", exact(space.diameter())},
                        {"min_distance", exact(space.min_distance())}};
  auto wants = [&](const char* s) { return std::find(config.suites.begin(), config.suites.end(), s) != config.suites.end(); };
  if (wants("dyadic") || wants("maximal") || wants("hardy_bmo"))
    sh.forest = build_forest(space, config.delta,
                             tie_break_order(space.size(), config.random_tie_break, make_rng(sh.seed, kTieBreak)()));
  if (wants("geometry") || wants("dyadic") || wants("maximal")) {
    IsoperimetricOptions io;
    io.seed = make_rng(sh.seed, kIso)();
    sh.iso = isoperimetric_profile(space, io);
  }
  rr.timing["setup"] = seconds(t_space);

  const std::map<std::string, std::function<SuiteOutput(const Shared&)>> suites{
      {"geometry", geometry_suite}, {"dyadic", dyadic_suite},     {"maximal", maximal_suite},
      {"hardy_bmo", hardy_suite},   {"operators", operators_suite}};
  std::vector<SuiteOutput> outputs(config.suites.size());
  std::vector<double> times(config.suites.size());
  auto run_one = [&](std::size_t i) {
    const auto t0 = Clock::now();
    outputs[i] = suites.at(config.suites[i])(sh);
    times[i] = seconds(t0);
  };
  if (parallel) {
    std::vector<std::future<void>> jobs;
    for (std::size_t i = 0; i < config.suites.size(); ++i) jobs.push_back(std::async(std::launch::async, run_one, i));
    for (auto& j : jobs) j.get();
  } else {
    for (std::size_t i = 0; i < config.suites.size(); ++i) run_one(i);
  }

  rr.report["suites"] = Json::object();
  for (std::size_t i = 0; i < config.suites.size(); ++i) {
    SuiteOutput& o = outputs[i];
    rr.report["suites"][config.suites[i]] = std::move(o.json);
    rr.timing["suites"][config.suites[i]] = times[i];
    for (auto& c : o.csv) rr.csv.push_back(std::move(c));
    rr.hard_failures.insert(rr.hard_failures.end(), o.hard.begin(), o.hard.end());
    rr.warnings.insert(rr.warnings.end(), o.warnings.begin(), o.warnings.end());
  }
  rr.report["hard_failures"] = rr.hard_failures;
  rr.report["warnings"] = rr.warnings;
  rr.report["status"] = rr.hard_failures.empty() ? "pass" : "fail";
  return rr;
}

void write_outputs(const RunReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "report.json", canonical_dump(report.report));
  write_text_file(dir / "timing.json", canonical_dump(report.timing));
  for (const auto& [name, text] : report.csv) write_text_file(dir / name, text);
}

}  // namespace hbl
