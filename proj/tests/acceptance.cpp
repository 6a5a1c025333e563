// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "hbl/corpus.hpp"
#include "hbl/dyadic.hpp"
#include "hbl/hardy_bmo.hpp"
#include "hbl/io.hpp"
#include "hbl/maximal.hpp"
#include "hbl/operators.hpp"
#include "hbl/runner.hpp"
#include "hbl/space.hpp"
#include "oracles.hpp"

using namespace hbl;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

struct Named {
  std::string name;
  FiniteSpace space;
};

std::vector<Named> unit_graphs() {
  std::vector<Named> out;
  for (int q : {3, 4})
    for (int depth = 2; depth <= (q == 3 ? 5 : 4); ++depth)
      out.push_back({"tree(" + std::to_string(q) + "," + std::to_string(depth) + ")", gen_tree(q, depth)});
  for (int n : {8, 16, 32, 64}) out.push_back({"path(" + std::to_string(n) + ")", gen_path(n)});
  for (int n : {3, 5, 8}) out.push_back({"grid(" + std::to_string(n) + ")", gen_grid(2, n)});
  return out;
}

// Random connected graph: a random spanning tree plus a few chords.
FiniteSpace random_graph(std::size_t n, std::mt19937_64& rng, bool weighted) {
  std::vector<Edge> edges;
  std::set<std::pair<PointIndex, PointIndex>> seen;
  for (PointIndex v = 1; v < n; ++v) {
    const PointIndex u = rng() % v;
    edges.push_back({u, v});
    seen.insert({u, v});
  }
  for (std::size_t extra = rng() % (n / 2 + 1); extra > 0; --extra) {
    PointIndex a = rng() % n, b = rng() % n;
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (seen.insert({a, b}).second) edges.push_back({a, b});
  }
  std::vector<std::string> ids;
  std::vector<double> w;
  std::uniform_real_distribution<double> u(0.5, 3.0);
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("v" + std::to_string(i));
    w.push_back(weighted ? u(rng) : 1.0);
  }
  return FiniteSpace::from_edges(ids, w, edges);
}

std::vector<Named> small_spaces() {
  std::mt19937_64 rng(2024);
  std::vector<Named> out{{"path(8)", gen_path(8)},       {"path(30)", gen_path(30)},
                         {"tree(3,2)", gen_tree(3, 2)},  {"tree(4,2)", gen_tree(4, 2)},
                         {"tree(3,3)", gen_tree(3, 3)},  {"grid(5)", gen_grid(2, 5)},
                         {"hyperbolic(28)", gen_hyperbolic_disk(28, 1.8, 3)}};
  for (int i = 0; i < 3; ++i) out.push_back({"random(" + std::to_string(i) + ")", random_graph(14 + 4 * i, rng, true)});
  return out;
}

std::vector<double> random_values(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

// Every h1_norm solve in this harness goes through here so criterion 6 sees
// all of them.
struct GapLog {
  std::size_t solves = 0;
  double worst = 0.0;
} gap_log;

H1Result logged_h1(const FiniteSpace& s, std::span<const double> g, double b) {
  H1Result r = h1_norm(s, g, b);
  if (r.feasible) {
    ++gap_log.solves;
    gap_log.worst = std::max(gap_log.worst, std::fabs(r.gap));
  }
  return r;
}

// ---------------------------------------------------------------- criteria

void dyadic_structure(Outcome& o) {
  const auto t0 = Clock::now();
  std::vector<Named> corpus;
  for (int q : {3, 4})
    for (int depth = 1; depth <= 6; ++depth)
      corpus.push_back({"tree(" + std::to_string(q) + "," + std::to_string(depth) + ")", gen_tree(q, depth)});
  for (int n : {2, 8, 16, 32, 64}) corpus.push_back({"path(" + std::to_string(n) + ")", gen_path(n)});
  for (int n : {2, 4, 6, 8}) corpus.push_back({"grid(" + std::to_string(n) + ")", gen_grid(2, n)});
  for (int cells : {50, 200, 480})
    corpus.push_back({"hyperbolic(" + std::to_string(cells) + ")", gen_hyperbolic_disk(cells, 3.0, 11)});
  std::size_t forests = 0, largest = 0;
  for (const auto& [name, s] : corpus) {
    o.expect(s.size() <= 1500, name + " too large");
    largest = std::max(largest, s.size());
    for (double delta : {0.4, 0.5, 0.6}) {
      const auto v = verify_forest(s, build_forest(s, delta));
      o.expect(v.ok && v.violations.empty(),
               name + " delta " + format_decimal(delta) + (v.violations.empty() ? "" : ": " + v.violations.front()));
      ++forests;
    }
  }
  const double t = seconds_since(t0);
  o.expect(t <= 60.0, "runtime " + format_decimal(t) + " s");
  o.detail << forests << " forests, up to " << largest << " points, " << format_decimal(t) << " s";
}

void cube_ball_oracle(Outcome& o) {
  std::size_t pairs = 0, contained = 0;
  for (const auto& [name, s] : small_spaces()) {
    o.expect(s.size() <= 30, name + " exceeds 30 points");
    const auto f = build_forest(s, 0.5);
    // the recorded constants must describe the cubes
    for (int k = f.k_min; k <= f.k_max; ++k)
      for (const auto& q : f.level(k)) {
        for (PointIndex x : q.members)
          o.expect(s.distance(x, q.center) < f.realized_c1 * f.scale(k), name + " cube exceeds C1 ball");
        o.expect(oracle::subset(oracle::members_within(s, q.center, f.realized_a0 * f.scale(k)), q.members),
                 name + " a0 ball leaves its cube");
      }
    std::map<std::pair<double, double>, double> dcache;
    for (int k = f.k_min; k <= f.k_max; ++k) {
      const double tau = std::max(2.0, f.realized_c1 / (f.realized_a0 * f.delta));
      const double bk = f.realized_a0 * f.scale(k);
      auto key = std::make_pair(tau, bk);
      if (!dcache.count(key)) dcache[key] = oracle::doubling(s, tau, bk);
      const double d_oracle = dcache[key];
      for (PointIndex x = 0; x < s.size(); ++x) {
        const auto& q = f.cube(k, x);
        for (double r : oracle::radii_up_to(s, s.diameter() + 1.0)) {
          const auto members = oracle::members_within(s, x, r);
          std::vector<PointIndex> both;
          std::set_intersection(members.begin(), members.end(), q.members.begin(), q.members.end(),
                                std::back_inserter(both));
          const double m_both = oracle::mass(s, both), m_ball = oracle::mass(s, members), m_cube = oracle::mass(s, q.members);
          const auto res = cube_ball_interaction(s, f, ball(s, x, r), k, f.cube_index(k, x));
          ++pairs;
          const bool big = r >= f.realized_c1 * f.scale(k);
          o.expect(res.contained_case == big, name + " case split");
          if (big) {
            ++contained;
            o.expect(both == q.members, name + " contained case: cube not inside ball");
            o.expect(res.holds && res.mu_ball_cube == res.mu_cube, name + " equality case");
          } else {
            o.expect(std::fabs(res.constant - d_oracle) <= 1e-12 * d_oracle, name + " doubling constant");
            o.expect(m_both * d_oracle >= m_ball * (1 - 1e-12), name + " lower bound");
            o.expect(res.holds, name + " library verdict");
          }
          o.expect(std::fabs(res.mu_ball_cube - m_both) <= 1e-12 * m_cube, name + " intersection measure");
        }
      }
    }
  }
  o.detail << pairs << " (ball, cube) pairs, " << contained << " in the equality case";
}

void tree_triviality(Outcome& o) {
  std::size_t spaces = 0;
  std::mt19937_64 seeder(77);
  for (const auto& [name, s] : unit_graphs()) {
    Rng rng = make_rng(seeder(), 0);
    std::size_t infeasible = 0, feasible = 0;
    for (int i = 0; i < 50; ++i) {
      const auto g = global_mean_zero(s, rng);
      if (!logged_h1(s, g, 1.0).feasible) ++infeasible;
      const auto local = local_mean_zero(s, ball(s, rng() % s.size(), 2.0), rng);
      if (logged_h1(s, local, 2.0).feasible) ++feasible;
    }
    o.expect(infeasible == 50, name + ": " + std::to_string(infeasible) + "/50 infeasible at b = 1");
    o.expect(feasible >= 50, name + ": " + std::to_string(feasible) + "/50 feasible at b = 2");
    ++spaces;
  }
  o.detail << spaces << " unit-distance graphs, 50 + 50 functions each";
}

void atom_splitting(Outcome& o) {
  const auto t0 = Clock::now();
  const auto s = gen_tree(3, 5);
  Rng rng = make_rng(4, 4);
  SplitOptions opt;
  opt.c = 2.5;
  opt.b_big = 3.5;
  opt.r0 = 1.0;
  opt.beta = 0.75;
  opt.discrete = true;
  double worst_res = 0.0;
  std::size_t terms = 0;
  for (int i = 0; i < 100; ++i) {
    const auto b = ball(s, rng() % s.size(), 3.0);
    auto v = local_mean_zero(s, b, rng);
    double mx = 0.0;
    for (double x : v) mx = std::max(mx, std::fabs(x));
    for (double& x : v) x /= mx * b.mass;
    const Atom a{b, v};
    o.expect(validate_atom(s, a).ok, "input atom");
    const auto r = split_atom(s, a, opt);
    // reconstruction from the terms alone
    std::vector<double> sum(s.size(), 0.0);
    for (const auto& t : r.terms) {
      o.expect(validate_atom(s, t.atom).ok, "output atom fails validation");
      o.expect(t.atom.ball.radius <= opt.c, "output atom radius above c");
      for (PointIndex x = 0; x < s.size(); ++x) sum[x] += t.lambda * t.atom.values[x];
    }
    double err = 0.0, norm = 0.0;
    for (PointIndex x = 0; x < s.size(); ++x) {
      err += s.weight(x) * std::fabs(sum[x] - v[x]);
      norm += s.weight(x) * std::fabs(v[x]);
    }
    worst_res = std::max(worst_res, err / norm);
    o.expect(r.max_pass_coefficient <= r.coefficient_bound, "coefficient above the computed constant");
    o.expect(static_cast<double>(r.max_pass_count) <= r.count_bound, "term count above the computed N");
    terms += r.terms.size();
  }
  o.expect(worst_res <= 1e-9, "relative L1 residual " + format_decimal(worst_res));
  const double t = seconds_since(t0);
  o.expect(t <= 30.0, "runtime " + format_decimal(t) + " s");
  o.detail << "100 atoms, " << terms << " output terms, residual " << format_decimal(worst_res) << ", "
           << format_decimal(t) << " s";
}

void scale_equivalence(Outcome& o) {
  std::size_t instances = 0;
  double h_ratio = 0.0, b_ratio = 0.0;
  for (auto [q, depth] : {std::pair{3, 3}, {3, 4}, {4, 3}, {3, 5}}) {
    const auto s = gen_tree(q, depth);
    Rng rng = make_rng(static_cast<std::uint64_t>(q * 10 + depth), 5);
    std::vector<std::vector<double>> corpus;
    for (int i = 0; i < 5; ++i) corpus.push_back(global_mean_zero(s, rng));
    corpus.push_back(centered(s, log_distance(s, 0)));
    const auto h = h1_scale_equivalence(s, corpus, 5.0, 3.5, 1.0, 0.7);
    const auto m = bmo_scale_equivalence(s, corpus, 1.0, 5.0, 3.5, 1.0, 0.7);
    const std::string name = "tree(" + std::to_string(q) + "," + std::to_string(depth) + ")";
    o.expect(h.instances > 0 && std::isfinite(h.max_ratio), name + " H1 constant");
    o.expect(m.instances > 0 && std::isfinite(m.max_ratio), name + " BMO constant");
    o.expect(h.ordering_violations == 0, name + " H1 ordering");
    o.expect(m.ordering_violations == 0, name + " BMO ordering");
    o.expect(h.max_gap <= 1e-6, name + " LP gap");
    gap_log.worst = std::max(gap_log.worst, h.max_gap);
    instances += h.instances + m.instances;
    h_ratio = std::max(h_ratio, h.max_ratio);
    b_ratio = std::max(b_ratio, m.max_ratio);
  }
  o.detail << instances << " instances at (b, c) = (5, 3.5); max ratios H1 " << format_decimal(h_ratio) << ", BMO "
           << format_decimal(b_ratio);
}

void lp_duality(Outcome& o) {
  std::vector<Named> corpus{{"tree(3,3)", gen_tree(3, 3)},
                            {"tree(4,2)", gen_tree(4, 2)},
                            {"path(20)", gen_path(20)},
                            {"grid(4)", gen_grid(2, 4)},
                            {"hyperbolic(40)", gen_hyperbolic_disk(40, 2.0, 5)}};
  std::mt19937_64 rng(99);
  std::size_t pairs = 0, skipped = 0;
  while (pairs < 200) {
    const auto& [name, s] = corpus[(pairs + skipped) % corpus.size()];
    const double b = name.rfind("hyperbolic", 0) == 0 ? 1.5 : (rng() % 2 ? 2.0 : 3.0);
    const auto f = random_values(s.size(), rng);
    const auto g = centered(s, random_values(s.size(), rng));
    const auto p = duality_pairing_check(s, f, g, b);
    if (p.skipped) {
      ++skipped;
      o.expect(skipped < 50, "too many skipped pairings");
      if (skipped >= 50) break;
      continue;
    }
    ++gap_log.solves;
    gap_log.worst = std::max(gap_log.worst, std::fabs(p.gap));
    o.expect(std::fabs(pairing(s, f, g)) <= oracle::bmo1(s, f, b) * p.h1 * (1 + 1e-9) + 1e-12,
             name + " pairing bound");
    o.expect(p.holds, name + " library verdict");
    ++pairs;
  }
  o.expect(gap_log.worst <= 1e-6, "worst gap " + format_decimal(gap_log.worst));
  o.detail << pairs << " pairings; " << gap_log.solves << " H1 solves with worst gap " << format_decimal(gap_log.worst);
}

void john_nirenberg(Outcome& o) {
  std::vector<Named> corpus{{"tree(3,5)", gen_tree(3, 5)},
                            {"hyperbolic(150)", gen_hyperbolic_disk(150, 3.0, 7)},
                            {"grid(8)", gen_grid(2, 8)}};
  for (const auto& [name, s] : corpus) {
    // origin: the point nearest the center of the space
    PointIndex origin = 0;
    double best = kInfinity;
    for (PointIndex x = 0; x < s.size(); ++x) {
      double ecc = 0.0;
      for (PointIndex y = 0; y < s.size(); ++y) ecc = std::max(ecc, s.distance(x, y));
      if (ecc < best) {
        best = ecc;
        origin = x;
      }
    }
    const auto f = log_distance(s, origin);
    const auto forest = build_forest(s, 0.5);
    const auto r = jn_experiment(s, forest, f, default_b0(s, 1.0, 0.75));
    o.expect(!r.degenerate, name + " degenerate");
    o.expect(r.eta > 0.0, name + " eta");
    o.expect(r.covered, name + " envelope");
    for (const auto& row : r.rows)
      o.expect(row.ratio <= r.j * std::exp(-r.eta * row.s / r.n) * (1 + 1e-12), name + " row above envelope");
    o.detail << name << " eta " << format_decimal(r.eta) << " J " << format_decimal(r.j) << " (" << r.rows.size()
             << " rows); ";
  }
}

void good_lambda(Outcome& o) {
  std::vector<Named> corpus{{"tree(3,4)", gen_tree(3, 4)},
                            {"tree(3,5)", gen_tree(3, 5)},
                            {"tree(4,3)", gen_tree(4, 3)},
                            {"path(32)", gen_path(32)},
                            {"grid(8)", gen_grid(2, 8)},
                            {"hyperbolic(100)", gen_hyperbolic_disk(100, 2.5, 2)}};
  std::size_t passed = 0, failed = 0, na = 0;
  double min_sharp = kInfinity;
  for (const auto& [name, s] : corpus) {
    const auto forest = build_forest(s, 0.5);
    const auto iso = isoperimetric_profile(s);
    Rng rng = make_rng(8, s.size());
    std::vector<std::vector<double>> fs{log_distance(s, 0)};
    for (int i = 0; i < 3; ++i) fs.push_back(gaussian_function(s, rng));
    for (const auto& f : fs) {
      const auto rep = good_lambda_check(s, forest, f, iso);
      passed += rep.passed;
      failed += rep.failed;
      na += rep.not_applicable;
    }
    const std::vector<double> ps{2.0};
    const auto lb = sharp_lower_bound(s, fs, ps, 3.0);
    min_sharp = std::min(min_sharp, lb.front().min_ratio);
  }
  const double rate = passed + failed ? static_cast<double>(passed) / static_cast<double>(passed + failed) : 0.0;
  o.expect(passed + failed > 0, "no applicable rows");
  o.expect(rate >= 0.8, "pass rate " + format_decimal(rate));
  o.expect(min_sharp > 0.0 && std::isfinite(min_sharp), "sharp lower bound " + format_decimal(min_sharp));
  o.detail << passed << " passed, " << failed << " failed, " << na << " not applicable (rate "
           << format_decimal(rate) << "); sharp lower bound p=2 " << format_decimal(min_sharp);
}

void maximal_operator(Outcome& o) {
  std::mt19937_64 rng(31);
  std::size_t checks = 0;
  double worst_weak = 0.0;
  auto domination = [&](const FiniteSpace& s, const DyadicForest& f, const std::vector<double>& g) {
    for (int k = f.k_min; k <= f.k_max; ++k) {
      const auto m = maximal_function(s, f, g, k);
      for (PointIndex x = 0; x < s.size(); ++x) o.expect(m[x] >= std::fabs(g[x]), "domination");
    }
  };
  for (const auto& [name, s] : unit_graphs()) {
    const auto f = build_forest(s, 0.5);
    domination(s, f, random_values(s.size(), rng));
  }
  for (const auto& [name, s] : small_spaces()) {
    const auto f = build_forest(s, 0.5);
    for (int rep = 0; rep < 4; ++rep) {
      auto g = random_values(s.size(), rng);
      if (rep == 3)
        for (double& v : g) v = v > 0.8 ? 1.0 : 0.0;  // indicator with ties
      if (lp_norm(s, g, 1.0) == 0.0) g[0] = 1.0;
      domination(s, f, g);
      for (int k = f.k_min; k <= f.k_max; ++k) {
        const auto w = weak_type_constant(s, f, g, k);
        const double want = oracle::weak_type(s, oracle::maximal(s, f, g, k), g);
        const auto pack = static_cast<double>(oracle::packing(s, f, g, k));
        o.expect(std::fabs(w.constant - want) <= 1e-12 * std::max(1.0, want), name + " weak type vs oracle");
        o.expect(w.constant <= pack + 1e-12, name + " weak type above packing");
        worst_weak = std::max(worst_weak, w.constant);
        ++checks;
      }
    }
  }
  o.detail << checks << " weak-type checks, worst constant " << format_decimal(worst_weak);
}

void hormander(Outcome& o) {
  std::mt19937_64 rng(5);
  std::size_t compared = 0;
  for (const auto& [name, s] : small_spaces()) {
    const std::size_t n = s.size();
    for (int rep = 0; rep < 2; ++rep) {
      auto k = random_values(n * n, rng);
      const auto op = make_kernel(n, k, "random");
      for (double b : {1.0, 2.0, 3.0}) {
        const auto h = hormander_constants(s, op, b);
        const double nu = oracle::hormander_nu(s, op.kernel, b, false);
        const double up = oracle::hormander_nu(s, op.kernel, b, true);
        o.expect(std::fabs(h.nu - nu) <= 1e-12 * std::max(1.0, nu), name + " nu vs brute force");
        o.expect(std::fabs(h.upsilon - up) <= 1e-12 * std::max(1.0, up), name + " upsilon vs brute force");
        ++compared;
      }
      // symmetrized kernel
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < x; ++y) k[x * n + y] = k[y * n + x];
      const auto sym = hormander_constants(s, make_kernel(n, k), 2.0);
      o.expect(sym.nu == sym.upsilon, name + " symmetric kernel nu != upsilon");
    }
  }

  // multiplier corpus: fit C on half the spaces, check it on the other half
  const std::vector<Multiplier> mult{heat_multiplier(0.5), heat_multiplier(2.0), resolvent_multiplier(1.0),
                                     band_multiplier(1.0, 0.25)};
  std::vector<Named> train{{"tree(3,3)", gen_tree(3, 3)}, {"path(24)", gen_path(24)}, {"grid(5)", gen_grid(2, 5)}};
  std::vector<Named> holdout{{"tree(3,5)", gen_tree(3, 5)}, {"tree(4,3)", gen_tree(4, 3)}, {"grid(7)", gen_grid(2, 7)}};
  const double b = 3.0;
  auto ratios = [&](const FiniteSpace& s) {
    std::vector<double> out;
    for (std::size_t i = 0; i < mult.size(); ++i) {
      const auto op = spectral_multiplier(s, mult[i]);
      const double l2 = l2_norm(s, op);
      const auto h = hormander_constants(s, op, b);
      o.expect(h.nu == h.upsilon, "self-adjoint multiplier nu != upsilon");
      out.push_back(h1_to_l1_estimate(s, op, b, 64, 100 + i).estimate / (h.nu + l2));
      out.push_back(linf_to_bmo_estimate(s, op, b, 64, 200 + i).estimate / (h.upsilon + l2));
    }
    return out;
  };
  double c_fit = 0.0, c_hold = 0.0;
  for (const auto& [name, s] : train)
    for (double r : ratios(s)) c_fit = std::max(c_fit, r);
  for (const auto& [name, s] : holdout)
    for (double r : ratios(s)) c_hold = std::max(c_hold, r);
  o.expect(std::isfinite(c_fit) && c_fit > 0.0, "fitted C");
  o.expect(c_hold <= c_fit, "holdout ratio " + format_decimal(c_hold) + " exceeds fitted C " + format_decimal(c_fit));
  o.detail << compared << " brute-force comparisons; fitted C " << format_decimal(c_fit) << ", holdout max ratio "
           << format_decimal(c_hold);
}

void isoperimetric(Outcome& o) {
  double tree_min = kInfinity;
  for (auto [q, depth] : {std::pair{3, 3}, {3, 4}, {3, 5}, {4, 3}, {4, 4}})
    tree_min = std::min(tree_min, isoperimetric_profile(gen_tree(q, depth)).ihat);
  o.expect(tree_min > 0.0, "tree isoperimetric constant " + format_decimal(tree_min));
  std::vector<double> path;
  for (int n : {8, 16, 32, 64}) path.push_back(isoperimetric_profile(gen_path(n)).ihat);
  for (std::size_t i = 1; i < path.size(); ++i) o.expect(path[i] < path[i - 1], "path sequence not decreasing");

  std::mt19937_64 rng(12);
  std::vector<Named> small{{"path(10)", gen_path(10)}, {"tree(3,2)", gen_tree(3, 2)}, {"grid(3)", gen_grid(2, 3)},
                           {"K2", gen_path(2)}};
  for (int i = 0; i < 20; ++i) small.push_back({"random", random_graph(3 + i % 8, rng, false)});
  std::size_t exact = 0;
  for (const auto& [name, s] : small) {
    const auto c = cheeger_constant(s);
    o.expect(c.exact && std::fabs(c.h - oracle::cheeger(s)) <= 1e-12, name + " Cheeger vs brute force");
    ++exact;
  }
  std::size_t gaps = 0;
  auto gap_check = [&](const std::string& name, const FiniteSpace& s) {
    const double h = cheeger_constant(s).h;
    o.expect(spectral_gap(s) >= h * h / (2.0 * max_degree(s)) - 1e-12, name + " spectral gap below h^2/2D");
    ++gaps;
  };
  for (const auto& [name, s] : small) gap_check(name, s);
  for (const auto& [name, s] : unit_graphs()) gap_check(name, s);
  o.detail << "tree min " << format_decimal(tree_min) << "; paths";
  for (double v : path) o.detail << ' ' << format_decimal(v);
  o.detail << "; " << exact << " exact Cheeger checks, " << gaps << " spectral-gap checks";
}

void determinism(Outcome& o) {
  const std::vector<std::string> configs{
      R"({"space": {"generator": "tree", "q": 3, "depth": 4}, "seed": 11, "tie_break": "random",
          "suites": ["geometry", "dyadic", "maximal", "hardy_bmo", "operators"],
          "samples": {"functions": 3, "atoms": 4, "operator": 16, "triviality": 4}})",
      R"({"space": {"generator": "hyperbolic", "cells": 60, "max_radius": 2.0, "seed": 4}, "seed": 3,
          "suites": ["geometry", "dyadic", "maximal"], "samples": {"functions": 3}})",
      R"({"space": {"generator": "grid", "d": 2, "n": 5}, "seed": 8,
          "suites": ["geometry", "dyadic", "maximal", "operators"], "samples": {"functions": 3, "operator": 16}})"};
  for (const auto& text : configs) {
    const auto c = parse_config(Json::parse(text), false);
    const auto a = run(c, false), b = run(c, false), p = run(c, true);
    const std::string da = canonical_dump(a.report);
    o.expect(da == canonical_dump(b.report), "serial runs differ");
    o.expect(da == canonical_dump(p.report), "parallel run differs");
    o.expect(a.csv == b.csv && a.csv == p.csv, "CSV outputs differ");
    o.expect(untagged_values(a.report).empty(), "untagged constant in report");
  }
  o.detail << configs.size() << " configurations, serial x2 and parallel";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"dyadic structure", dyadic_structure},
      {"cube/ball oracle", cube_ball_oracle},
      {"tree triviality", tree_triviality},
      {"atom splitting", atom_splitting},
      {"scale equivalence", scale_equivalence},
      {"LP duality", lp_duality},
      {"John-Nirenberg", john_nirenberg},
      {"good lambda", good_lambda},
      {"maximal operator", maximal_operator},
      {"Hormander oracle", hormander},
      {"isoperimetric contrast", isoperimetric},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failures;
    std::printf("%s %2zu %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                seconds_since(t0), o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
