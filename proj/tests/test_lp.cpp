#include "doctest.h"

#include <random>

#include "hbl/lp.hpp"

using namespace hbl;

namespace {

SparseColumn col(std::vector<std::pair<std::size_t, double>> e, double c) { return {std::move(e), c}; }

double reduced(const SparseColumn& c, const std::vector<double>& y) {
  double r = c.cost;
  for (auto [i, a] : c.entries) r -= y[i] * a;
  return r;
}

}  // namespace

TEST_CASE("unique vertex of a two-row system") {
  RevisedSimplex lp({4.0, 6.0});
  lp.add_column(col({{0, 1.0}, {1, 3.0}}, 1.0));
  lp.add_column(col({{0, 2.0}, {1, 1.0}}, 1.0));
  REQUIRE(lp.solve() == LpStatus::Optimal);
  const auto x = lp.primal();
  CHECK(x[0] == doctest::Approx(1.6));
  CHECK(x[1] == doctest::Approx(1.2));
  CHECK(lp.objective() == doctest::Approx(2.8));
}

TEST_CASE("optimum picks the cheap column and duals certify it") {
  // min x + 2y + 3z with x + y + z = 1, x - z = 0
  RevisedSimplex lp({1.0, 0.0});
  lp.add_column(col({{0, 1.0}, {1, 1.0}}, 1.0));
  lp.add_column(col({{0, 1.0}}, 2.0));
  lp.add_column(col({{0, 1.0}, {1, -1.0}}, 3.0));
  REQUIRE(lp.solve() == LpStatus::Optimal);
  CHECK(lp.objective() == doctest::Approx(2.0));
  const auto y = lp.duals();
  CHECK(y[0] * 1.0 + y[1] * 0.0 == doctest::Approx(lp.objective()));
  for (std::size_t j = 0; j < lp.columns(); ++j) CHECK(reduced(lp.column(j), y) >= -1e-9);
}

TEST_CASE("infeasible and unbounded programs") {
  RevisedSimplex inf({1.0});
  inf.add_column(col({{0, -1.0}}, 1.0));
  CHECK(inf.solve() == LpStatus::Infeasible);
  CHECK(inf.infeasibility() > 0.5);

  RevisedSimplex unb({1.0});
  unb.add_column(col({{0, 1.0}}, 0.0));
  unb.add_column(col({{0, 1.0}}, -1.0));
  unb.add_column(col({{0, -1.0}}, -1.0));
  CHECK(unb.solve() == LpStatus::Unbounded);
}

TEST_CASE("negative right-hand sides") {
  RevisedSimplex lp({-2.0});
  lp.add_column(col({{0, -1.0}}, 3.0));
  lp.add_column(col({{0, -4.0}}, 4.0));
  REQUIRE(lp.solve() == LpStatus::Optimal);
  CHECK(lp.objective() == doctest::Approx(2.0));
  CHECK(lp.primal()[1] == doctest::Approx(0.5));
}

TEST_CASE("degenerate vertex does not stall") {
  // many ties at zero rhs
  RevisedSimplex lp({0.0, 0.0, 1.0});
  lp.add_column(col({{0, 1.0}, {1, -1.0}}, -1.0));
  lp.add_column(col({{1, 1.0}, {0, -1.0}}, -1.0));
  lp.add_column(col({{0, 1.0}, {2, 1.0}}, 1.0));
  lp.add_column(col({{1, 1.0}, {2, 1.0}}, 1.0));
  lp.add_column(col({{2, 1.0}}, 5.0));
  lp.add_column(col({{0, -1.0}, {1, -1.0}, {2, 1.0}}, 0.5));
  const auto st = lp.solve();
  CHECK(st != LpStatus::IterationLimit);
}

TEST_CASE("column generation reaches the full-LP optimum") {
  // Transportation-like random instance: equality rows, nonnegative columns.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  const std::size_t m = 6, n = 60;
  std::vector<SparseColumn> pool;
  for (std::size_t j = 0; j < n; ++j) {
    SparseColumn c;
    for (std::size_t i = 0; i < m; ++i)
      if (u(rng) < 0.5) c.entries.emplace_back(i, u(rng));
    if (c.entries.empty()) c.entries.emplace_back(j % m, 1.0);
    c.cost = u(rng);
    pool.push_back(c);
  }
  for (std::size_t i = 0; i < m; ++i) pool.push_back(col({{i, 1.0}}, 10.0));
  std::vector<double> rhs(m, 1.0);

  RevisedSimplex full(rhs);
  for (const auto& c : pool) full.add_column(c);
  REQUIRE(full.solve() == LpStatus::Optimal);

  RevisedSimplex cg(rhs);
  for (std::size_t i = 0; i < m; ++i) cg.add_column(pool[n + i]);
  std::vector<char> used(pool.size(), 0);
  for (std::size_t i = 0; i < m; ++i) used[n + i] = 1;
  auto pricer = [&](std::span<const double> y, bool) {
    std::vector<SparseColumn> out;
    const std::vector<double> yv(y.begin(), y.end());
    for (std::size_t j = 0; j < pool.size(); ++j)
      if (!used[j] && reduced(pool[j], yv) < -1e-9) {
        used[j] = 1;
        out.push_back(pool[j]);
        if (out.size() == 3) break;
      }
    return out;
  };
  REQUIRE(cg.solve(pricer) == LpStatus::Optimal);
  CHECK(cg.objective() == doctest::Approx(full.objective()).epsilon(1e-10));
  CHECK(cg.columns() < pool.size());
}
