#include "hbl/maximal.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace hbl {

double set_average(const FiniteSpace& space, std::span<const PointIndex> set, std::span<const double> f) {
  if (set.size() == 1) return f[set.front()];
  CompensatedSum num, den;
  for (PointIndex x : set) {
    num += space.weight(x) * f[x];
    den += space.weight(x);
  }
  return num.value() / den.value();
}

double mean_oscillation(const FiniteSpace& space, const Ball& b, std::span<const double> f, double q) {
  const double avg = set_average(space, b.members, f);
  CompensatedSum s;
  for (PointIndex x : b.members) s += space.weight(x) * std::pow(std::fabs(f[x] - avg), q);
  const double mean = s.value() / b.mass;
  return q == 1.0 ? mean : std::pow(mean, 1.0 / q);
}

double lp_norm(const FiniteSpace& space, std::span<const double> f, double p) {
  require(p >= 1.0, "L^p exponent must be at least 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::fabs(v));
    return m;
  }
  CompensatedSum s;
  for (PointIndex x = 0; x < f.size(); ++x) s += space.weight(x) * std::pow(std::fabs(f[x]), p);
  return p == 1.0 ? s.value() : std::pow(s.value(), 1.0 / p);
}

std::vector<double> centered(const FiniteSpace& space, std::span<const double> f) {
  CompensatedSum s;
  for (PointIndex x = 0; x < f.size(); ++x) s += space.weight(x) * f[x];
  const double mean = s.value() / space.total_mass();
  std::vector<double> out(f.begin(), f.end());
  for (double& v : out) v -= mean;
  return out;
}

std::vector<double> maximal_function(const FiniteSpace& space, const DyadicForest& forest, std::span<const double> f,
                                     int k) {
  require(f.size() == space.size(), "function length differs from the space size");
  require(k >= forest.k_min && k <= forest.k_max, "resolution floor outside the forest range");
  std::vector<double> out(space.size(), 0.0);
  for (int l = k; l <= forest.k_max; ++l) {
    for (const Cube& c : forest.level(l)) {
      if (c.members.size() == 1) {
        const PointIndex x = c.members.front();
        out[x] = std::max(out[x], std::fabs(f[x]));
        continue;
      }
      CompensatedSum s;
      for (PointIndex x : c.members) s += space.weight(x) * std::fabs(f[x]);
      const double avg = s.value() / c.mass;
      for (PointIndex x : c.members) out[x] = std::max(out[x], avg);
    }
  }
  return out;
}

WeakTypeResult weak_type_constant(const FiniteSpace& space, const DyadicForest& forest, std::span<const double> f,
                                  int k) {
  const double norm1 = lp_norm(space, f, 1.0);
  require(norm1 > 0.0, "weak-type check needs a nonzero function");
  const auto mf = maximal_function(space, forest, f, k);
  // sup over alpha of alpha mu({Mf > alpha}) is approached from below at each level v
  std::vector<PointIndex> order(space.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](PointIndex a, PointIndex b) { return mf[a] > mf[b]; });
  WeakTypeResult res;
  CompensatedSum mass;
  for (std::size_t i = 0; i < order.size(); ++i) {
    mass += space.weight(order[i]);
    const double v = mf[order[i]];
    if (i + 1 < order.size() && mf[order[i + 1]] == v) continue;
    const double c = v * mass.value() / norm1;
    if (c > res.constant) res = {c, v};
  }
  return res;
}

std::vector<double> sharp_function(const FiniteSpace& space, const BallFamily& family, std::span<const double> f) {
  require(f.size() == space.size(), "function length differs from the space size");
  std::vector<double> osc(family.balls.size());
  for (std::size_t i = 0; i < family.balls.size(); ++i) osc[i] = mean_oscillation(space, family.balls[i], f);
  std::vector<double> out(space.size(), 0.0);
  for (PointIndex p = 0; p < space.size(); ++p)
    for (std::size_t i : family.containing[p]) out[p] = std::max(out[p], osc[i]);
  return out;
}

std::vector<double> sharp_function(const FiniteSpace& space, std::span<const double> f, double b) {
  return sharp_function(space, enumerate_balls(space, b), f);
}

int base_resolution(const DyadicForest& forest) {
  const double diam = forest.levels.front().front().diameter;
  for (int k = forest.k_min; k <= forest.k_max; ++k) {
    const auto& cubes = forest.level(k);
    if (std::all_of(cubes.begin(), cubes.end(), [&](const Cube& c) { return c.diameter <= diam / 4.0; })) return k;
  }
  return forest.k_max;
}

std::string_view row_status_name(RowStatus s) noexcept {
  switch (s) {
    case RowStatus::Pass: return "pass";
    case RowStatus::Fail: return "fail";
    case RowStatus::NotApplicable: return "not-applicable";
  }
  return "not-applicable";
}

GoodLambdaConstants good_lambda_constants(const FiniteSpace& space, const DyadicForest& forest,
                                          const IsoperimetricProfile& iso, const GoodLambdaOptions& options) {
  require(options.eta_prime > 0.0 && options.eta_prime < 1.0, "eta' must lie in (0, 1)");
  GoodLambdaConstants c;
  c.base_resolution = base_resolution(forest);
  const double base = forest.scale(c.base_resolution);
  const double c1 = forest.realized_c1, a0 = forest.realized_a0, delta = forest.delta;
  c.kappa = base * delta;
  c.ihat = iso.ihat;
  c.ihat_provenance = iso.provenance;
  c.c0 = std::max(c1 / delta, delta);
  c.b_prime = std::max(options.b0, (2.0 * c1 + c.c0) * base);
  c.sigma = (1.0 - std::exp(-c.ihat * c.kappa)) / 2.0;
  c.d = doubling_constant(space, std::max(2.0, c.b_prime / (a0 * base)), a0 * base);
  c.eta_prime = options.eta_prime;
  const double limit = (1.0 - c.eta_prime) / (2.0 * c.d);
  c.eps = options.eps ? *options.eps : c.sigma * c.sigma * (1.0 - c.eta_prime) / (4.0 * c.d);
  require(c.eps > 0.0 && c.eps < limit, "eps must lie in (0, (1 - eta') / (2 D))");
  c.eta = c.sigma > 0.0 ? 1.0 - c.sigma + 2.0 * c.eps * c.d / (c.sigma * (1.0 - c.eta_prime)) : kInfinity;
  c.vacuous = !(c.eta < 1.0);
  return c;
}

GoodLambdaReport good_lambda_check(const FiniteSpace& space, const DyadicForest& forest, std::span<const double> f,
                                   const IsoperimetricProfile& iso, const GoodLambdaOptions& options) {
  GoodLambdaReport rep;
  rep.constants = good_lambda_constants(space, forest, iso, options);
  const auto& c = rep.constants;
  const std::size_t n = space.size();
  const auto mf = maximal_function(space, forest, f, c.base_resolution);
  const auto sharp = sharp_function(space, f, c.b_prime);

  std::vector<double> alphas = options.alphas;
  if (alphas.empty()) {
    std::set<double> levels(mf.begin(), mf.end());
    std::vector<double> v(levels.begin(), levels.end());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] > 0.0) alphas.push_back(v[i]);
      if (i + 1 < v.size()) alphas.push_back((v[i] + v[i + 1]) / 2.0);
    }
  }
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());

  std::vector<char> in_a(n);
  for (double alpha : alphas) {
    if (!(alpha > 0.0)) continue;
    GoodLambdaRow row;
    row.alpha = alpha;
    CompensatedSum lhs, rhs;
    std::size_t count = 0;
    for (PointIndex x = 0; x < n; ++x) {
      in_a[x] = mf[x] > c.eta_prime * alpha ? 1 : 0;
      if (in_a[x]) {
        rhs += space.weight(x);
        ++count;
      }
      if (mf[x] > alpha && sharp[x] <= c.eps * alpha) lhs += space.weight(x);
    }
    row.lhs = lhs.value();
    row.rhs = rhs.value();
    row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : 0.0;
    const bool proper = count > 0 && count < n;
    const bool band = proper && boundary_band_measure(space, in_a, c.kappa) > 0.0;
    if (c.vacuous || !band) {
      row.status = RowStatus::NotApplicable;
      ++rep.not_applicable;
    } else if (row.lhs <= c.eta * row.rhs * (1.0 + 1e-12)) {
      row.status = RowStatus::Pass;
      ++rep.passed;
    } else {
      row.status = RowStatus::Fail;
      ++rep.failed;
    }
    rep.rows.push_back(row);
  }
  rep.pass = rep.failed == 0;
  return rep;
}

std::vector<SharpLowerBound> sharp_lower_bound(const FiniteSpace& space, const std::vector<std::vector<double>>& corpus,
                                               std::span<const double> ps, double b_prime) {
  for (double p : ps) require(p > 1.0 && std::isfinite(p), "p must lie in (1, infinity)");
  const BallFamily family = enumerate_balls(space, b_prime);
  std::vector<SharpLowerBound> out;
  for (double p : ps) out.push_back({p, kInfinity, 0, 0});
  for (const auto& f : corpus) {
    const auto g = centered(space, f);
    const double scale = std::max(1.0, lp_norm(space, f, kInfinity));
    if (lp_norm(space, g, kInfinity) <= 1e-12 * scale) {
      for (auto& o : out) ++o.skipped;
      continue;
    }
    const auto sharp = sharp_function(space, family, g);
    for (auto& o : out) {
      o.min_ratio = std::min(o.min_ratio, lp_norm(space, sharp, o.p) / lp_norm(space, g, o.p));
      ++o.evaluated;
    }
  }
  return out;
}

}  // namespace hbl
