#include "doctest.h"

#include <random>

#include "hbl/corpus.hpp"
#include "hbl/maximal.hpp"
#include "oracles.hpp"

using namespace hbl;

namespace {

std::vector<double> random_values(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

FiniteSpace two_points() { return FiniteSpace::from_edges({"a", "b"}, {1.0, 1.0}, {{0, 1}}); }

}  // namespace

TEST_CASE("norms and averages") {
  const auto s = FiniteSpace::from_edges({"a", "b", "c"}, {1.0, 2.0, 3.0}, {{0, 1}, {1, 2}});
  const std::vector<double> f{1.0, -1.0, 2.0};
  CHECK(lp_norm(s, f, 1.0) == doctest::Approx(9.0));
  CHECK(lp_norm(s, f, 2.0) == doctest::Approx(std::sqrt(15.0)));
  CHECK(lp_norm(s, f, kInfinity) == 2.0);
  const std::vector<PointIndex> all{0, 1, 2};
  CHECK(set_average(s, all, f) == doctest::Approx(5.0 / 6.0));
  const auto c = centered(s, f);
  CHECK(set_average(s, all, c) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(lp_norm(s, f, 0.5), Error);
}

TEST_CASE("maximal function of a constant is its modulus") {
  const auto s = gen_tree(3, 3);
  const auto f = build_forest(s, 0.5);
  const std::vector<double> c(s.size(), -2.5);
  for (int k = f.k_min; k <= f.k_max; ++k)
    for (double v : maximal_function(s, f, c, k)) CHECK(v == doctest::Approx(2.5));
}

TEST_CASE("maximal function matches the cube scan") {
  for (const auto& s : {gen_path(4), gen_tree(3, 3), gen_grid(2, 4), gen_hyperbolic_disk(30, 1.5, 2)}) {
    const auto f = build_forest(s, 0.5);
    const auto g = random_values(s.size(), 5);
    for (int k = f.k_min; k <= f.k_max; ++k) {
      const auto got = maximal_function(s, f, g, k);
      const auto want = oracle::maximal(s, f, g, k);
      for (PointIndex x = 0; x < s.size(); ++x) CHECK(got[x] == doctest::Approx(want[x]).epsilon(1e-12));
    }
  }
}

TEST_CASE("maximal function is sublinear and homogeneous") {
  const auto s = gen_grid(2, 5);
  const auto f = build_forest(s, 0.5);
  const auto a = random_values(s.size(), 1), b = random_values(s.size(), 2);
  std::vector<double> sum(s.size()), scaled(s.size());
  for (PointIndex x = 0; x < s.size(); ++x) {
    sum[x] = a[x] + b[x];
    scaled[x] = -3.0 * a[x];
  }
  const int k = f.k_min;
  const auto ma = maximal_function(s, f, a, k), mb = maximal_function(s, f, b, k);
  const auto ms = maximal_function(s, f, sum, k), mc = maximal_function(s, f, scaled, k);
  for (PointIndex x = 0; x < s.size(); ++x) {
    CHECK(ms[x] <= ma[x] + mb[x] + 1e-12);
    CHECK(mc[x] == doctest::Approx(3.0 * ma[x]));
  }
}

TEST_CASE("dyadic weak type agrees with brute force and stays below packing") {
  for (const auto& s : {gen_path(9), gen_tree(3, 2), gen_grid(2, 4), gen_tree(3, 3)}) {
    const auto f = build_forest(s, 0.5);
    for (unsigned seed = 1; seed <= 3; ++seed) {
      const auto g = random_values(s.size(), seed);
      for (int k : {f.k_min, (f.k_min + f.k_max) / 2}) {
        const auto w = weak_type_constant(s, f, g, k);
        const double want = oracle::weak_type(s, oracle::maximal(s, f, g, k), g);
        CHECK(w.constant == doctest::Approx(want).epsilon(1e-12));
        CHECK(w.constant <= static_cast<double>(oracle::packing(s, f, g, k)) + 1e-12);
      }
    }
  }
}

TEST_CASE("sharp function of a constant vanishes") {
  const auto s = gen_tree(3, 3);
  for (double v : sharp_function(s, std::vector<double>(s.size(), 4.0), 2.0)) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("sharp function on two points") {
  const auto s = two_points();
  const auto sh = sharp_function(s, std::vector<double>{1.0, 0.0}, 1.5);
  CHECK(sh[0] == doctest::Approx(0.5));
  CHECK(sh[1] == doctest::Approx(0.5));
}

TEST_CASE("sharp function matches the definition") {
  for (const auto& s : {gen_path(7), gen_tree(3, 2), gen_grid(2, 3), gen_hyperbolic_disk(25, 1.5, 9)}) {
    const auto g = random_values(s.size(), 3);
    for (double b : {1.0, 1.5, 2.5}) {
      const auto got = sharp_function(s, g, b);
      const auto want = oracle::sharp(s, g, b);
      for (PointIndex x = 0; x < s.size(); ++x) CHECK(got[x] == doctest::Approx(want[x]).epsilon(1e-12));
    }
  }
}

TEST_CASE("good lambda inequality on a tree") {
  const auto s = gen_tree(3, 5);
  const auto f = build_forest(s, 0.5);
  const auto iso = isoperimetric_profile(s);
  const auto g = log_distance(s, 0);
  const auto rep = good_lambda_check(s, f, g, iso);
  CHECK(rep.constants.eps > 0.0);
  CHECK(rep.constants.eta > 0.0);
  CHECK(rep.failed == 0);
  CHECK(rep.pass);
  CHECK(rep.passed + rep.failed + rep.not_applicable == rep.rows.size());
  for (const auto& row : rep.rows)
    if (row.status == RowStatus::Pass) CHECK(row.lhs <= rep.constants.eta * row.rhs + 1e-12);
}

TEST_CASE("good lambda rejects out-of-range parameters") {
  const auto s = gen_tree(3, 3);
  const auto f = build_forest(s, 0.5);
  const auto iso = isoperimetric_profile(s);
  const std::vector<double> g(s.size(), 1.0);
  GoodLambdaOptions o;
  o.eta_prime = 1.0;
  CHECK_THROWS_AS(good_lambda_check(s, f, g, iso, o), Error);
  o.eta_prime = 0.5;
  o.eps = 10.0;
  CHECK_THROWS_AS(good_lambda_check(s, f, g, iso, o), Error);
}

TEST_CASE("sharp lower bound is positive on a tree") {
  const auto s = gen_tree(3, 4);
  Rng rng = make_rng(3, 0);
  std::vector<std::vector<double>> corpus;
  for (int i = 0; i < 6; ++i) corpus.push_back(gaussian_function(s, rng));
  const std::vector<double> ps{2.0, 4.0};
  const auto lb = sharp_lower_bound(s, corpus, ps, 3.0);
  REQUIRE(lb.size() == 2);
  for (const auto& r : lb) {
    CHECK(r.min_ratio > 0.0);
    CHECK(r.evaluated == corpus.size());
  }
  const std::vector<double> bad{1.0};
  CHECK_THROWS_AS(sharp_lower_bound(s, corpus, bad, 3.0), Error);
}
