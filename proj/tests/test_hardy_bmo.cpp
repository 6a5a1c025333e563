#include "doctest.h"

#include <random>

#include "hbl/corpus.hpp"
#include "hbl/hardy_bmo.hpp"
#include "hbl/maximal.hpp"
#include "oracles.hpp"

using namespace hbl;

namespace {

FiniteSpace two_points() { return FiniteSpace::from_edges({"a", "b"}, {1.0, 1.0}, {{0, 1}}); }

std::vector<double> random_values(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

// Sum of lambda * atom must reproduce g, and every atom must be legal.
void check_terms(const FiniteSpace& s, const std::vector<DecompositionTerm>& terms, std::span<const double> g,
                 double b) {
  std::vector<double> sum(s.size(), 0.0);
  for (const auto& t : terms) {
    CHECK(t.lambda >= 0.0);
    CHECK(t.atom.ball.radius <= b + 1e-12);
    CHECK(validate_atom(s, t.atom).ok);
    for (PointIndex x = 0; x < s.size(); ++x) sum[x] += t.lambda * t.atom.values[x];
  }
  for (PointIndex x = 0; x < s.size(); ++x) CHECK(sum[x] == doctest::Approx(g[x]).epsilon(1e-9));
}

}  // namespace

TEST_CASE("atoms on two points") {
  const auto s = two_points();
  Atom a{ball(s, 0, 1.5), {0.5, -0.5}};
  CHECK(validate_atom(s, a).ok);
  a.values = {0.6, -0.6};
  const auto bad = validate_atom(s, a);
  CHECK_FALSE(bad.ok);
  CHECK(bad.size_excess == doctest::Approx(0.2));
  a.values = {0.5, 0.0};
  CHECK_FALSE(validate_atom(s, a).ok);
  Atom outside{ball(s, 0, 0.5), {0.0, 0.1}};
  CHECK_FALSE(validate_atom(s, outside).ok);
}

TEST_CASE("vertex atoms are atoms") {
  const auto s = gen_tree(3, 3);
  const auto scores = random_values(s.size(), 8);
  for (PointIndex c = 0; c < s.size(); c += 3) {
    const auto a = vertex_atom(s, ball(s, c, 2.5), scores);
    CHECK(validate_atom(s, a).ok);
  }
}

TEST_CASE("H1 norm of a second difference on a path") {
  const auto s = gen_path(3);
  const std::vector<double> g{1.0, -2.0, 1.0};
  const auto r = h1_norm(s, g, 1.5);
  REQUIRE(r.feasible);
  // two-point atoms give 4; f = (0, -2, 0) has oscillation <= 1 and pairs to 4
  CHECK(r.value == doctest::Approx(4.0));
  CHECK(oracle::bmo1(s, {0.0, -2.0, 0.0}, 1.5) <= 1.0);
  CHECK(r.gap <= 1e-9);
  CHECK(h1_norm_explicit(s, g, 1.5).value == doctest::Approx(4.0));
  check_terms(s, r.terms, g, 1.5);
}

TEST_CASE("H1 norm agrees with the explicit formulation") {
  for (const auto& s : {gen_path(6), gen_tree(3, 2), gen_grid(2, 3)}) {
    for (unsigned seed = 1; seed <= 3; ++seed) {
      const auto g = centered(s, random_values(s.size(), seed));
      for (double b : {1.5, 2.5}) {
        const auto r = h1_norm(s, g, b);
        const auto e = h1_norm_explicit(s, g, b);
        REQUIRE(r.feasible);
        REQUIRE(e.feasible);
        CHECK(r.value == doctest::Approx(e.value).epsilon(1e-7));
        CHECK(r.gap <= 1e-6);
        CHECK(r.residual_l1 <= 1e-9);
        check_terms(s, r.terms, g, b);
        // dual certificate: distance to constants at most 1 on every ball
        CHECK(oracle::bmo1(s, r.dual, b) <= 2.0 + 1e-7);
        CHECK(pairing(s, r.dual, g) == doctest::Approx(r.dual_value));
      }
    }
  }
}

TEST_CASE("H1 is trivial on unit graphs at scale one") {
  const auto s = gen_tree(3, 3);
  const auto g = centered(s, random_values(s.size(), 4));
  const auto r = h1_norm(s, g, 1.0);
  CHECK_FALSE(r.feasible);
  CHECK_FALSE(r.reason.empty());
  std::string why;
  CHECK_FALSE(h1_feasible(s, enumerate_balls(s, 1.0), g, &why));
  CHECK(h1_feasible(s, enumerate_balls(s, 2.0), g, &why));
}

TEST_CASE("BMO norm on two points and against brute force") {
  const auto s = two_points();
  const auto v = bmo_norm(s, std::vector<double>{1.0, 0.0}, 1.0, 1.5);
  CHECK(v.value == doctest::Approx(0.5));
  for (const auto& sp : {gen_path(7), gen_tree(3, 2), gen_hyperbolic_disk(20, 1.5, 5)}) {
    const auto f = random_values(sp.size(), 2);
    for (double b : {1.0, 2.0}) CHECK(bmo_norm(sp, f, 1.0, b).value == doctest::Approx(oracle::bmo1(sp, f, b)));
    CHECK(bmo_norm(sp, f, 2.0, 2.0).value >= bmo_norm(sp, f, 1.0, 2.0).value - 1e-12);
  }
}

TEST_CASE("pairing is bounded by the product of norms") {
  const auto s = gen_tree(3, 3);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const auto f = random_values(s.size(), seed);
    const auto g = centered(s, random_values(s.size(), seed + 100));
    const auto p = duality_pairing_check(s, f, g, 2.0);
    REQUIRE_FALSE(p.skipped);
    CHECK(p.holds);
    CHECK(p.gap <= 1e-6);
    CHECK(std::fabs(p.pairing) <= p.n1 * p.h1 * (1 + 1e-9));
    CHECK(p.n1 == doctest::Approx(oracle::bmo1(s, f, 2.0)));
  }
  const auto s2 = two_points();
  CHECK(pairing(s2, std::vector<double>{1.0, 2.0}, std::vector<double>{3.0, -1.0}) == doctest::Approx(1.0));
}

TEST_CASE("splitting an atom into smaller atoms") {
  const auto s = gen_tree(3, 5);
  Rng rng = make_rng(5, 1);
  SplitOptions o;
  o.c = 2.5;
  o.b_big = 3.5;
  o.beta = 0.75;
  o.r0 = 1.0;
  o.discrete = true;
  for (PointIndex c : {PointIndex{0}, PointIndex{2}, PointIndex{7}}) {
    const auto b = ball(s, c, 3.0);
    auto vals = local_mean_zero(s, b, rng);
    double mx = 0.0;
    for (double v : vals) mx = std::max(mx, std::fabs(v));
    for (double& v : vals) v /= mx * b.mass;
    const Atom a{b, vals};
    REQUIRE(validate_atom(s, a).ok);
    const auto r = split_atom(s, a, o);
    CHECK(r.residual_relative <= 1e-9);
    CHECK(r.max_pass_coefficient <= r.coefficient_bound + 1e-9);
    check_terms(s, r.terms, vals, o.c);
  }
}

TEST_CASE("scale equivalence on a tree keeps the norms ordered") {
  const auto s = gen_tree(3, 4);
  Rng rng = make_rng(2, 3);
  std::vector<std::vector<double>> corpus;
  for (int i = 0; i < 4; ++i) corpus.push_back(global_mean_zero(s, rng));
  const auto h = h1_scale_equivalence(s, corpus, 5.0, 3.5, 1.0, 0.7);
  CHECK(h.instances > 0);
  CHECK(h.ordering_violations == 0);
  CHECK(std::isfinite(h.max_ratio));
  CHECK(h.max_ratio >= 1.0 - 1e-9);
  const auto m = bmo_scale_equivalence(s, corpus, 2.0, 5.0, 3.5, 1.0, 0.7);
  CHECK(m.ordering_violations == 0);
  CHECK(std::isfinite(m.max_ratio));
  CHECK_THROWS_AS(h1_scale_equivalence(s, corpus, 4.0, 2.5, 1.0, 0.75), Error);
}

TEST_CASE("John-Nirenberg decay on a tree") {
  const auto s = gen_tree(3, 5);
  const auto f = build_forest(s, 0.5);
  const auto g = log_distance(s, 0);
  const double b0 = default_b0(s, 1.0, 0.75);
  CHECK(b0 >= 1.1 / 0.25 - 1e-12);
  const auto r = jn_experiment(s, f, g, b0);
  CHECK_FALSE(r.degenerate);
  CHECK(r.eta > 0.0);
  CHECK(r.covered);
  for (const auto& row : r.rows) CHECK(row.ratio <= r.j * std::exp(-r.eta * row.s / r.n) * (1 + 1e-9));
  const auto cor = jn_corollary(s, g, r, 2.0);
  CHECK(cor.holds);
  CHECK(cor.nq <= cor.bound);
}

TEST_CASE("John-Nirenberg on a constant is degenerate") {
  const auto s = gen_path(10);
  const auto f = build_forest(s, 0.5);
  const auto r = jn_experiment(s, f, std::vector<double>(s.size(), 1.0), 3.0);
  CHECK(r.degenerate);
}
