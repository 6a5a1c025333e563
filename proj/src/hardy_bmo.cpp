#include "hbl/hardy_bmo.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "hbl/lp.hpp"
#include "hbl/maximal.hpp"

namespace hbl {

namespace {

constexpr double kPriceTol = 1e-9;
constexpr std::size_t kColumnsPerRound = 32;

// Best vertex of the atom polytope on `b` against duals y: maximizes
// sum y_x s_x / mu(B) over s in [-1,1]^B with sum w s = 0.
double price_ball(const FiniteSpace& space, const Ball& b, std::span<const double> y, std::vector<double>* s_out) {
  std::vector<PointIndex> order = b.members;
  std::stable_sort(order.begin(), order.end(), [&](PointIndex p, PointIndex q) {
    return y[p] / space.weight(p) > y[q] / space.weight(q);
  });
  const double half = b.mass / 2.0;
  std::vector<double> s(order.size(), -1.0);
  double cum = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double w = space.weight(order[i]);
    if (cum + w <= half) {
      s[i] = 1.0;
      cum += w;
    } else {
      s[i] = std::clamp((b.mass - 2.0 * cum - w) / w, -1.0, 1.0);
      break;
    }
  }
  CompensatedSum v;
  for (std::size_t i = 0; i < order.size(); ++i) v += y[order[i]] * s[i];
  if (s_out) {
    s_out->assign(space.size(), 0.0);
    for (std::size_t i = 0; i < order.size(); ++i) (*s_out)[order[i]] = s[i];
  }
  return v.value() / b.mass;
}

// Columns are stored as the +-1 vertex pattern of the atom; the coefficient of
// the atom itself is the LP variable times mu(B), which is also its cost.
struct PooledColumn {
  std::size_t ball;
  std::vector<std::pair<PointIndex, double>> entries;
};

std::vector<std::size_t> components(const FiniteSpace& space, const BallFamily& family) {
  std::vector<std::size_t> parent(space.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Ball& b : family.balls)
    for (std::size_t i = 1; i < b.members.size(); ++i) {
      const std::size_t a = root(b.members[0]), c = root(b.members[i]);
      if (a != c) parent[std::max(a, c)] = std::min(a, c);
    }
  for (std::size_t x = 0; x < space.size(); ++x) parent[x] = root(x);
  return parent;
}

}  // namespace

double pairing(const FiniteSpace& space, std::span<const double> f, std::span<const double> g) {
  CompensatedSum s;
  for (PointIndex x = 0; x < space.size(); ++x) s += space.weight(x) * f[x] * g[x];
  return s.value();
}

AtomCheck validate_atom(const FiniteSpace& space, const Atom& atom) {
  AtomCheck chk;
  require(atom.values.size() == space.size(), "atom values length differs from the space size");
  CompensatedSum mean;
  double l1 = 0.0, peak = 0.0;
  for (PointIndex x = 0; x < space.size(); ++x) {
    const double v = atom.values[x];
    if (v != 0.0 && !atom.ball.contains(x)) {
      chk.ok = false;
      chk.violations.push_back("support: nonzero value at " + space.id(x) + " outside the ball");
    }
    mean += space.weight(x) * v;
    l1 += space.weight(x) * std::fabs(v);
    peak = std::max(peak, std::fabs(v));
  }
  chk.mean = std::fabs(mean.value());
  if (chk.mean > 1e-10 * l1) {
    chk.ok = false;
    chk.violations.push_back("cancellation: |integral| = " + format_decimal(chk.mean));
  }
  const double scaled = peak * atom.ball.mass;
  chk.size_excess = std::max(0.0, scaled - 1.0);
  if (scaled > 1.0 + 1e-12) {
    chk.ok = false;
    chk.violations.push_back("size: max|a| mu(B) = " + format_decimal(scaled));
  }
  return chk;
}

Atom vertex_atom(const FiniteSpace& space, const Ball& b, std::span<const double> scores) {
  require(scores.size() == space.size(), "score length differs from the space size");
  std::vector<double> y(space.size());
  for (PointIndex x = 0; x < space.size(); ++x) y[x] = scores[x] * space.weight(x);
  Atom a;
  a.ball = b;
  price_ball(space, b, y, &a.values);
  for (double& v : a.values) v /= b.mass;
  return a;
}

bool h1_feasible(const FiniteSpace& space, const BallFamily& family, std::span<const double> g, std::string* reason) {
  const auto comp = components(space, family);
  const std::size_t n = space.size();
  std::vector<CompensatedSum> sum(n);
  std::vector<double> mag(n, 0.0);
  for (PointIndex x = 0; x < n; ++x) {
    sum[comp[x]] += space.weight(x) * g[x];
    mag[comp[x]] += space.weight(x) * std::fabs(g[x]);
  }
  for (PointIndex x = 0; x < n; ++x) {
    if (comp[x] != x || mag[x] == 0.0) continue;
    if (std::fabs(sum[x].value()) > 1e-10 * mag[x]) {
      if (reason) {
        const bool alone = std::count(comp.begin(), comp.end(), x) == 1;
        *reason = alone ? "point " + space.id(x) + " lies only in singleton balls"
                        : "g does not integrate to zero over the ball-linked class of point " + space.id(x);
      }
      return false;
    }
  }
  return true;
}

H1Result h1_norm(const FiniteSpace& space, std::span<const double> g, double b, const H1Options& options) {
  return h1_norm(space, enumerate_balls(space, b), g, options);
}

H1Result h1_norm(const FiniteSpace& space, const BallFamily& family, std::span<const double> g,
                 const H1Options& options) {
  const std::size_t n = space.size();
  require(g.size() == n, "function length differs from the space size");
  if (!std::isinf(options.r))
    fail(ErrorCode::Unsupported, "finite-r atoms need per-ball cone constraints; only r = infinity is supported");
  H1Result res;
  res.dual.assign(n, 0.0);
  double g_l1 = 0.0;
  for (PointIndex x = 0; x < n; ++x) g_l1 += space.weight(x) * std::fabs(g[x]);
  if (g_l1 == 0.0) {
    res.feasible = true;
    return res;
  }
  if (!h1_feasible(space, family, g, &res.reason)) return res;

  std::vector<char> active(n, 0);
  for (PointIndex x = 0; x < n; ++x)
    if (g[x] != 0.0)
      for (std::size_t bi : family.containing[x])
        for (PointIndex p : family.balls[bi].members) active[p] = 1;
  auto inside = [&](const Ball& b) {
    return std::all_of(b.members.begin(), b.members.end(), [&](PointIndex p) { return active[p] != 0; });
  };
  auto grow = [&]() {
    std::vector<char> next = active;
    for (const Ball& b : family.balls)
      if (std::any_of(b.members.begin(), b.members.end(), [&](PointIndex p) { return active[p] != 0; }))
        for (PointIndex p : b.members) next[p] = 1;
    const bool changed = next != active;
    active = std::move(next);
    return changed;
  };

  std::vector<PooledColumn> pool;
  std::set<std::vector<std::pair<PointIndex, double>>> pooled;  // balls with equal members give equal columns
  std::vector<double> y_full(n, 0.0);
  std::vector<double> lambda;
  std::vector<std::size_t> pool_index;  // LP column -> pool entry
  std::size_t total_iterations = 0;
  while (true) {
    std::vector<PointIndex> rows;
    std::vector<std::size_t> row_of(n, n);
    for (PointIndex x = 0; x < n; ++x)
      if (active[x]) {
        row_of[x] = rows.size();
        rows.push_back(x);
      }
    std::vector<double> rhs(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rhs[i] = g[rows[i]];
    RevisedSimplex lp(rhs);
    pool_index.clear();
    auto to_column = [&](const PooledColumn& pc) {
      SparseColumn col;
      col.cost = family.balls[pc.ball].mass;
      for (const auto& [p, v] : pc.entries) col.entries.emplace_back(row_of[p], v);
      return col;
    };
    for (std::size_t i = 0; i < pool.size(); ++i) {
      lp.add_column(to_column(pool[i]));
      pool_index.push_back(i);
    }
    std::vector<double> y(n, 0.0), s;
    auto pricer = [&](std::span<const double> duals, bool phase_one) {
      std::fill(y.begin(), y.end(), 0.0);
      for (std::size_t i = 0; i < rows.size(); ++i) y[rows[i]] = duals[i];
      const double threshold = phase_one ? kPriceTol : 1.0 + kPriceTol;
      std::vector<std::pair<double, std::size_t>> found;
      for (std::size_t bi = 0; bi < family.balls.size(); ++bi) {
        const Ball& b = family.balls[bi];
        if (b.members.size() < 2 || !inside(b)) continue;
        const double v = price_ball(space, b, y, nullptr);
        if (v > threshold) found.emplace_back(v, bi);
      }
      std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& c) { return a.first > c.first; });
      std::vector<SparseColumn> out;
      for (const auto& [v, bi] : found) {
        if (out.size() == kColumnsPerRound) break;
        const Ball& b = family.balls[bi];
        price_ball(space, b, y, &s);
        PooledColumn pc{bi, {}};
        for (PointIndex p : b.members)
          if (s[p] != 0.0) pc.entries.emplace_back(p, s[p]);
        if (!pooled.insert(pc.entries).second) continue;
        out.push_back(to_column(pc));
        pool.push_back(std::move(pc));
        pool_index.push_back(pool.size() - 1);
      }
      return out;
    };
    const LpStatus status = lp.solve(pricer, options.max_iterations);
    total_iterations += lp.iterations();
    if (status == LpStatus::IterationLimit) fail(ErrorCode::Internal, "H1 linear program hit the iteration limit");
    if (status == LpStatus::Unbounded) fail(ErrorCode::Internal, "H1 linear program reported unbounded");
    if (status == LpStatus::Infeasible) {
      if (grow()) continue;
      res.reason = "linear program phase one found no decomposition";
      return res;
    }
    const auto duals = lp.duals();
    std::fill(y_full.begin(), y_full.end(), 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) y_full[rows[i]] = duals[i];
    bool expanded = false;
    for (const Ball& b : family.balls) {
      if (b.members.size() < 2 || inside(b)) continue;
      if (price_ball(space, b, y_full, nullptr) > 1.0 + kPriceTol) {
        for (PointIndex p : b.members) active[p] = 1;
        expanded = true;
      }
    }
    if (expanded) continue;

    res.feasible = true;
    res.value = lp.objective();
    res.columns = lp.columns();
    res.active_rows = rows.size();
    lambda = lp.primal();
    for (std::size_t j = 0; j < lambda.size(); ++j) lambda[j] *= family.balls[pool[pool_index[j]].ball].mass;
    break;
  }
  res.iterations = total_iterations;

  double max_osc = 0.0;
  for (const Ball& b : family.balls)
    if (b.members.size() >= 2) max_osc = std::max(max_osc, price_ball(space, b, y_full, nullptr));
  res.dual_scale = std::max(1.0, max_osc);
  CompensatedSum dv;
  for (PointIndex x = 0; x < n; ++x) {
    dv += y_full[x] * g[x];
    res.dual[x] = y_full[x] / space.weight(x) / res.dual_scale;
  }
  res.dual_value = dv.value() / res.dual_scale;
  res.gap = res.value - res.dual_value;

  std::vector<CompensatedSum> recon(n);
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    if (!(lambda[j] > 0.0)) continue;
    const PooledColumn& pc = pool[pool_index[j]];
    const double mass = family.balls[pc.ball].mass;
    for (const auto& [p, v] : pc.entries) recon[p] += lambda[j] * v / mass;
    if (options.keep_terms) {
      DecompositionTerm t;
      t.lambda = lambda[j];
      t.atom.ball = family.balls[pc.ball];
      t.atom.values.assign(n, 0.0);
      for (const auto& [p, v] : pc.entries) t.atom.values[p] = v / mass;
      res.terms.push_back(std::move(t));
    }
  }
  CompensatedSum resid;
  for (PointIndex x = 0; x < n; ++x) resid += space.weight(x) * std::fabs(recon[x].value() - g[x]);
  res.residual_l1 = resid.value();
  return res;
}

ExplicitLpResult h1_norm_explicit(const FiniteSpace& space, std::span<const double> g, double b) {
  const std::size_t n = space.size();
  require(n <= 40, "the explicit H1 program is limited to 40 points");
  require(g.size() == n, "function length differs from the space size");
  const BallFamily family = enumerate_balls(space, b);
  const std::size_t nb = family.balls.size();
  std::size_t bound_rows = 0;
  std::vector<std::size_t> first_bound(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    first_bound[i] = n + nb + bound_rows;
    bound_rows += family.balls[i].members.size();
  }
  std::vector<double> rhs(n + nb + bound_rows, 0.0);
  for (PointIndex x = 0; x < n; ++x) rhs[x] = g[x];
  RevisedSimplex lp(rhs);
  for (std::size_t i = 0; i < nb; ++i) {
    const Ball& ball = family.balls[i];
    SparseColumn t;
    t.cost = 1.0;
    for (std::size_t k = 0; k < ball.members.size(); ++k) {
      const PointIndex x = ball.members[k];
      const std::size_t br = first_bound[i] + k;
      lp.add_column({{{x, 1.0}, {n + i, space.weight(x)}, {br, 1.0}}, 0.0});
      lp.add_column({{{x, -1.0}, {n + i, -space.weight(x)}, {br, 1.0}}, 0.0});
      lp.add_column({{{br, 1.0}}, 0.0});
      t.entries.emplace_back(br, -1.0 / ball.mass);
    }
    lp.add_column(std::move(t));
  }
  ExplicitLpResult res;
  const LpStatus status = lp.solve();
  if (status == LpStatus::Optimal) {
    res.feasible = true;
    res.value = lp.objective();
  } else if (status != LpStatus::Infeasible) {
    fail(ErrorCode::Internal, "explicit H1 program did not terminate");
  }
  return res;
}

BmoValue bmo_norm(const FiniteSpace& space, std::span<const double> f, double q, double b) {
  return bmo_norm(space, enumerate_balls(space, b), f, q);
}

BmoValue bmo_norm(const FiniteSpace& space, const BallFamily& family, std::span<const double> f, double q) {
  require(q >= 1.0 && std::isfinite(q), "q must lie in [1, infinity)");
  require(f.size() == space.size(), "function length differs from the space size");
  BmoValue v;
  v.q = q;
  v.b = family.bound;
  std::size_t best = 0;
  for (std::size_t i = 0; i < family.balls.size(); ++i) {
    const double o = mean_oscillation(space, family.balls[i], f, q);
    if (o > v.value) {
      v.value = o;
      best = i;
    }
  }
  if (!family.balls.empty()) v.ball = family.balls[best];
  return v;
}

SplitResult split_atom(const FiniteSpace& space, const Atom& atom, const SplitOptions& o) {
  const std::size_t n = space.size();
  require(atom.values.size() == n, "atom values length differs from the space size");
  require(o.beta > 0.5 && o.beta < 1.0, "beta must lie in (1/2, 1)");
  require(o.r0 >= 0.0, "R0 must be nonnegative");
  require(o.c > 0.0 && o.c < o.b_big, "scales must satisfy 0 < c < b");
  require(atom.ball.radius <= o.b_big, "atom support radius exceeds b");
  if (!o.discrete) require(o.r0 / (1.0 - o.beta) < o.c, "c must exceed R0 / (1 - beta)");
  const AtomCheck input = validate_atom(space, atom);
  require(input.ok, "input is not an atom: " + (input.violations.empty() ? std::string() : input.violations.front()));

  SplitResult res;
  double bp = (1.0 - o.beta) / 2.0;
  if (!o.discrete && !(o.r0 / bp < o.c)) bp = (o.r0 / o.c + (1.0 - o.beta)) / 2.0;
  res.beta_prime = bp;

  const BallFamily family = enumerate_balls(space, o.b_big);
  const double d1 = doubling_constant(space, family, 1.0 / bp);
  const double tau2 = std::max(o.beta / bp, o.r0 / (bp * o.c)) + 1.0;
  const double d2 = doubling_constant(space, family, std::max(2.0, tau2));
  res.coefficient_bound = 2.0 * d1 * d2;
  res.count_bound = doubling_constant(space, family, (4.0 + bp) / bp);

  const std::size_t cap =
      static_cast<std::size_t>(std::ceil(std::log(o.c / o.b_big) / std::log(o.beta + bp))) + 2;
  std::vector<DecompositionTerm> current{{1.0, atom}};
  auto too_big = [&](const DecompositionTerm& t) { return t.atom.ball.radius > o.c; };
  while (std::any_of(current.begin(), current.end(), too_big)) {
    if (++res.passes > cap)
      fail(ErrorCode::NonContraction, "support radii did not fall below c within " + std::to_string(cap) + " passes");
    std::vector<DecompositionTerm> next;
    for (auto& term : current) {
      if (!too_big(term)) {
        next.push_back(std::move(term));
        continue;
      }
      const Ball& b = term.atom.ball;
      const std::vector<double>& a = term.atom.values;
      const double rp = bp * b.radius;
      std::vector<PointIndex> centers;
      for (PointIndex x : b.members) {
        bool far = true;
        for (PointIndex z : centers) far = far && space.distance(x, z) >= rp;
        if (far) centers.push_back(x);
      }
      std::vector<int> cover(n, 0);
      for (PointIndex z : centers)
        for (PointIndex x : b.members)
          if (space.distance(z, x) < rp) ++cover[x];
      const Ball b0 = ball(space, b.center, rp);
      std::size_t produced = 0;
      for (PointIndex z : centers) {
        std::vector<double> phi(n, 0.0);
        CompensatedSum integral;
        for (PointIndex x : b.members)
          if (space.distance(z, x) < rp) {
            phi[x] = a[x] / cover[x];
            integral += space.weight(x) * phi[x];
          }
        const double aj = integral.value() / b0.mass;
        for (PointIndex x : b0.members) phi[x] -= aj;

        Ball support;
        const double dz = space.distance(b.center, z);
        if (dz < rp) {
          support = ball(space, b.center, 2.0 * rp);
        } else {
          const PairCover cov = cover_pair(space, b.center, z);
          if (dz > o.r0 && !(cov.reach < o.beta * dz))
            fail(ErrorCode::AmpFailure, "no ball of radius < beta d contains the pair (" + space.id(b.center) + ", " +
                                            space.id(z) + ")");
          support = ball(space, cov.center, cov.reach + rp);
        }
        double peak = 0.0;
        for (PointIndex x = 0; x < n; ++x) {
          if (phi[x] != 0.0 && !support.contains(x))
            fail(ErrorCode::Internal, "split piece escapes its support ball");
          peak = std::max(peak, std::fabs(phi[x]));
        }
        if (peak == 0.0) continue;
        const double lambda = support.mass * peak;
        res.max_pass_coefficient = std::max(res.max_pass_coefficient, lambda);
        for (double& v : phi) v /= lambda;
        next.push_back({term.lambda * lambda, {std::move(support), std::move(phi)}});
        ++produced;
      }
      res.max_pass_count = std::max(res.max_pass_count, produced);
    }
    current = std::move(next);
  }
  res.terms = std::move(current);

  std::vector<CompensatedSum> recon(n);
  for (const auto& t : res.terms)
    for (PointIndex x = 0; x < n; ++x)
      if (t.atom.values[x] != 0.0) recon[x] += t.lambda * t.atom.values[x];
  CompensatedSum err, norm;
  for (PointIndex x = 0; x < n; ++x) {
    err += space.weight(x) * std::fabs(recon[x].value() - atom.values[x]);
    norm += space.weight(x) * std::fabs(atom.values[x]);
  }
  res.residual_relative = norm.value() > 0.0 ? err.value() / norm.value() : err.value();
  return res;
}

namespace {

void require_scales(const FiniteSpace& space, double b, double c, double r0, double beta) {
  require(beta > 0.5 && beta < 1.0, "beta must lie in (1/2, 1)");
  require(r0 >= 0.0, "R0 must be nonnegative");
  require(r0 / (1.0 - beta) < c && c < b, "scales must satisfy R0/(1-beta) < c < b");
  const AmpResult amp = amp_check(space, r0, beta, 1);
  if (!amp.pass) {
    const auto& v = amp.violations.front();
    fail(ErrorCode::AmpFailure, "space fails (AMP) at pair (" + space.id(v.x) + ", " + space.id(v.y) + ")");
  }
}

}  // namespace

ScaleEquivalence h1_scale_equivalence(const FiniteSpace& space, const std::vector<std::vector<double>>& corpus, double b,
                                      double c, double r0, double beta) {
  require_scales(space, b, c, r0, beta);
  const BallFamily fb = enumerate_balls(space, b), fc = enumerate_balls(space, c);
  H1Options opt;
  opt.keep_terms = false;
  ScaleEquivalence eq;
  for (const auto& g : corpus) {
    const H1Result hb = h1_norm(space, fb, g, opt);
    if (!hb.feasible || hb.value == 0.0) {
      ++eq.skipped;
      continue;
    }
    const H1Result hc = h1_norm(space, fc, g, opt);
    eq.max_gap = std::max({eq.max_gap, std::fabs(hb.gap), hc.feasible ? std::fabs(hc.gap) : 0.0});
    if (!hc.feasible) {
      ++eq.infeasible_at_c;
      continue;
    }
    ++eq.instances;
    if (hb.value > hc.value * (1.0 + 1e-9)) ++eq.ordering_violations;
    eq.max_ratio = std::max(eq.max_ratio, hc.value / hb.value);
  }
  return eq;
}

ScaleEquivalence bmo_scale_equivalence(const FiniteSpace& space, const std::vector<std::vector<double>>& corpus, double q,
                                       double b, double c, double r0, double beta) {
  require_scales(space, b, c, r0, beta);
  const BallFamily fb = enumerate_balls(space, b), fc = enumerate_balls(space, c);
  ScaleEquivalence eq;
  for (const auto& f : corpus) {
    const double nb = bmo_norm(space, fb, f, q).value;
    const double nc = bmo_norm(space, fc, f, q).value;
    if (nc == 0.0) {
      ++eq.skipped;
      if (nb > 0.0) ++eq.ordering_violations;
      continue;
    }
    ++eq.instances;
    if (nc > nb) ++eq.ordering_violations;
    eq.max_ratio = std::max(eq.max_ratio, nb / nc);
  }
  return eq;
}

double default_b0(const FiniteSpace& space, double r0, double beta) {
  require(beta > 0.5 && beta < 1.0, "beta must lie in (1/2, 1)");
  const double target = 1.1 * r0 / (1.0 - beta);
  double best = kInfinity;
  for (PointIndex x = 0; x < space.size(); ++x)
    for (PointIndex y = x + 1; y < space.size(); ++y) {
      const double d = space.distance(x, y);
      if (d >= target && d < best) best = d;
    }
  return std::isfinite(best) ? best : target;
}

JnReport jn_experiment(const FiniteSpace& space, const DyadicForest& forest, std::span<const double> f, double b0,
                       std::size_t max_rows) {
  require(b0 > 0.0, "b0 must be positive");
  require(max_rows >= 2, "the s grid needs at least two rows");
  JnReport rep;
  rep.b0 = b0;
  rep.norm_scale = 2.0 * std::max(forest.realized_c1, b0);
  rep.n = bmo_norm(space, f, 1.0, rep.norm_scale).value;

  const BallFamily family = enumerate_balls(space, b0);
  // per ball: deviations sorted descending with the mass at or above each
  struct Trace {
    std::vector<double> dev;
    std::vector<double> mass;
    double total;
  };
  std::vector<Trace> traces;
  std::vector<double> all;
  for (const Ball& b : family.balls) {
    const double avg = set_average(space, b.members, f);
    std::vector<std::pair<double, double>> dw;
    for (PointIndex x : b.members) dw.emplace_back(std::fabs(f[x] - avg), space.weight(x));
    std::sort(dw.begin(), dw.end(), [](const auto& p, const auto& q) { return p.first > q.first; });
    Trace t{{}, {}, b.mass};
    CompensatedSum m;
    for (const auto& [d, w] : dw) {
      m += w;
      t.dev.push_back(d);
      t.mass.push_back(m.value());
      all.push_back(d);
    }
    traces.push_back(std::move(t));
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<double> grid{0.0};
  for (double d : all)
    if (d > 0.0) grid.push_back(d);
  if (grid.size() > max_rows) {
    std::vector<double> thin;
    for (std::size_t i = 0; i < max_rows - 1; ++i) thin.push_back(grid[i * (grid.size() - 1) / (max_rows - 1)]);
    thin.push_back(grid.back());
    thin.erase(std::unique(thin.begin(), thin.end()), thin.end());
    grid = std::move(thin);
  }
  for (double s : grid) {
    JnRow row{s, 0.0, 0};
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const Trace& t = traces[i];
      // number of deviations strictly above s
      const auto it = std::partition_point(t.dev.begin(), t.dev.end(), [s](double d) { return d > s; });
      const std::size_t k = static_cast<std::size_t>(it - t.dev.begin());
      const double r = k == 0 ? 0.0 : t.mass[k - 1] / t.total;
      if (r > row.ratio) {
        row.ratio = r;
        row.ball = i;
      }
    }
    rep.rows.push_back(row);
  }

  double s_last = 0.0;
  for (const auto& r : rep.rows)
    if (r.ratio > 0.0) s_last = std::max(s_last, r.s);
  if (!(rep.n > 0.0) || !(s_last > 0.0)) {
    rep.degenerate = true;
    return rep;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (const auto& r : rep.rows) {
    if (!(r.ratio > 1e-6 && r.ratio < 1.0)) continue;
    const double ly = std::log(r.ratio);
    sx += r.s;
    sy += ly;
    sxx += r.s * r.s;
    sxy += r.s * ly;
    ++m;
  }
  const double den = static_cast<double>(m) * sxx - sx * sx;
  const double slope = (m >= 2 && den > 0.0) ? (static_cast<double>(m) * sxy - sx * sy) / den : 0.0;
  if (slope < 0.0) {
    rep.eta = -slope * rep.n;
    rep.fitted = true;
  } else {
    rep.eta = rep.n / s_last;
  }
  // ratio is nonincreasing in s, so row i bounds the whole gap up to row i+1
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const double upper = i + 1 < rep.rows.size() ? rep.rows[i + 1].s : rep.rows[i].s;
    rep.j = std::max(rep.j, rep.rows[i].ratio * std::exp(rep.eta * upper / rep.n));
  }
  rep.covered = std::all_of(rep.rows.begin(), rep.rows.end(), [&](const JnRow& r) {
    return r.ratio <= rep.j * std::exp(-rep.eta * r.s / rep.n) * (1.0 + 1e-12);
  });
  return rep;
}

JnCorollary jn_corollary(const FiniteSpace& space, std::span<const double> f, const JnReport& report, double q) {
  require(q > 1.0 && std::isfinite(q), "q must lie in (1, infinity)");
  JnCorollary c;
  c.q = q;
  c.nq = bmo_norm(space, f, q, report.b0).value;
  if (report.degenerate) {
    c.holds = c.nq == 0.0;
    return c;
  }
  c.bound = std::pow(report.j * q * std::tgamma(q), 1.0 / q) * report.n / report.eta;
  c.holds = c.nq <= c.bound * (1.0 + 1e-12);
  return c;
}

PairingCheck duality_pairing_check(const FiniteSpace& space, std::span<const double> f, std::span<const double> g,
                                   double b) {
  require(f.size() == space.size() && g.size() == space.size(), "function length differs from the space size");
  const BallFamily family = enumerate_balls(space, b);
  PairingCheck pc;
  H1Options opt;
  opt.keep_terms = false;
  const H1Result h = h1_norm(space, family, g, opt);
  if (!h.feasible) {
    pc.skipped = true;
    return pc;
  }
  pc.h1 = h.value;
  pc.gap = h.gap;
  pc.n1 = bmo_norm(space, family, f, 1.0).value;
  pc.pairing = pairing(space, f, g);
  pc.bound = pc.n1 * pc.h1;
  pc.holds = std::fabs(pc.pairing) <= pc.bound * (1.0 + 1e-9) + 1e-12;
  return pc;
}

}  // namespace hbl
