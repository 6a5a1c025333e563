#include "hbl/dyadic.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace hbl {

double DyadicForest::scale(int k) const { return std::pow(delta, k); }

std::vector<PointIndex> tie_break_order(std::size_t n, bool random, std::uint64_t seed) {
  std::vector<PointIndex> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (random) {
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  return order;
}

namespace {

double cube_diameter(const FiniteSpace& space, const std::vector<PointIndex>& members) {
  double d = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j) d = std::max(d, space.distance(members[i], members[j]));
  return d;
}

// distance from z to the complement of a sorted member list; infinite when
// the list is the whole space
double distance_out(const FiniteSpace& space, PointIndex z, const std::vector<PointIndex>& members) {
  for (std::uint32_t y : space.by_distance(z))
    if (!std::binary_search(members.begin(), members.end(), static_cast<PointIndex>(y)))
      return space.distance(z, y);
  return kInfinity;
}

}  // namespace

DyadicForest build_forest(const FiniteSpace& space, double delta) {
  return build_forest(space, delta, tie_break_order(space.size(), false, 0));
}

DyadicForest build_forest(const FiniteSpace& space, double delta, std::vector<PointIndex> order) {
  require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  const std::size_t n = space.size();
  {
    std::vector<PointIndex> check = order;
    std::sort(check.begin(), check.end());
    std::vector<PointIndex> ident(n);
    std::iota(ident.begin(), ident.end(), 0);
    require(check == ident, "tie-break order must be a permutation of the points");
  }
  DyadicForest f;
  f.delta = delta;
  f.n_points = n;
  f.order = std::move(order);
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[f.order[i]] = i;

  if (n == 1) {
    f.k_min = f.k_max = 0;
    Cube c;
    c.center = 0;
    c.members = {0};
    c.mass = space.weight(0);
    f.levels = {{c}};
    f.cube_of = {{0}};
    return f;
  }

  const double diam = space.diameter();
  const double sep = space.min_distance();
  int k = static_cast<int>(std::floor(std::log(diam) / std::log(delta)));
  while (!(std::pow(delta, k) > diam)) --k;
  while (std::pow(delta, k + 1) > diam) ++k;
  f.k_min = k;
  k = static_cast<int>(std::ceil(std::log(sep) / std::log(delta)));
  while (!(std::pow(delta, k) <= sep)) ++k;
  while (std::pow(delta, k - 1) <= sep) --k;
  f.k_max = k;
  const std::size_t levels = static_cast<std::size_t>(f.k_max - f.k_min + 1);

  // nested greedy nets; parent_center[l][z] for every net member z
  std::vector<char> in_net(n, 0);
  std::vector<PointIndex> net;
  std::vector<std::vector<PointIndex>> parent_center(levels, std::vector<PointIndex>(n, n));
  for (std::size_t l = 0; l < levels; ++l) {
    const double r = f.scale(f.k_min + static_cast<int>(l));
    const std::vector<PointIndex> previous = net;
    for (PointIndex x : f.order) {
      if (in_net[x]) continue;
      bool separated = true;
      for (PointIndex z : net) {
        if (space.distance(x, z) < r) {
          separated = false;
          break;
        }
      }
      if (separated) {
        in_net[x] = 1;
        net.push_back(x);
      }
    }
    for (PointIndex z : net) {
      if (l == 0 || std::find(previous.begin(), previous.end(), z) != previous.end()) {
        parent_center[l][z] = z;
        continue;
      }
      PointIndex best = previous.front();
      for (PointIndex p : previous) {
        const double dp = space.distance(z, p), db = space.distance(z, best);
        if (dp < db || (dp == db && rank[p] < rank[best])) best = p;
      }
      parent_center[l][z] = best;
    }
  }
  if (net.size() != n) fail(ErrorCode::Internal, "finest net is not the whole space");

  // ancestors: at the finest level every point is its own center
  std::vector<std::vector<PointIndex>> anc(levels, std::vector<PointIndex>(n));
  std::iota(anc[levels - 1].begin(), anc[levels - 1].end(), 0);
  for (std::size_t l = levels - 1; l > 0; --l)
    for (PointIndex x = 0; x < n; ++x) anc[l - 1][x] = parent_center[l][anc[l][x]];

  f.levels.assign(levels, {});
  f.cube_of.assign(levels, std::vector<std::size_t>(n, 0));
  for (std::size_t l = 0; l < levels; ++l) {
    std::vector<std::size_t> slot(n, n);
    std::vector<PointIndex> centers(anc[l].begin(), anc[l].end());
    std::sort(centers.begin(), centers.end());
    centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
    auto& cubes = f.levels[l];
    cubes.resize(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) {
      slot[centers[i]] = i;
      cubes[i].center = centers[i];
    }
    for (PointIndex x = 0; x < n; ++x) {
      const std::size_t c = slot[anc[l][x]];
      cubes[c].members.push_back(x);
      f.cube_of[l][x] = c;
    }
    for (auto& c : cubes) {
      c.mass = space.measure(c.members);
      c.diameter = cube_diameter(space, c.members);
    }
    if (l > 0) {
      for (std::size_t i = 0; i < cubes.size(); ++i) {
        const std::size_t p = f.cube_of[l - 1][cubes[i].center];
        cubes[i].parent = p;
        f.levels[l - 1][p].children.push_back(i);
      }
    }
  }

  double a0 = kInfinity, c1 = 0.0;
  for (std::size_t l = 0; l < levels; ++l) {
    const double s = f.scale(f.k_min + static_cast<int>(l));
    for (const Cube& c : f.levels[l]) {
      c1 = std::max(c1, c.diameter / s);
      if (c.members.size() < n) a0 = std::min(a0, distance_out(space, c.center, c.members) / s);
    }
  }
  f.realized_a0 = std::isfinite(a0) ? a0 : 1.0;
  // inflated so that r >= C1 delta^k forces Q into the open ball B(c, r)
  f.realized_c1 = c1 > 0.0 ? c1 * (1.0 + 1e-12) : 1.0;
  return f;
}

ForestVerification verify_forest(const FiniteSpace& space, const DyadicForest& f) {
  ForestVerification v;
  const std::size_t n = space.size();
  auto note = [&](const std::string& what) {
    v.ok = false;
    if (v.violations.size() < 64) v.violations.push_back(what);
  };
  auto name = [&](int k, std::size_t i) { return "cube (" + std::to_string(k) + "," + std::to_string(i) + ")"; };

  if (f.n_points != n) {
    note("forest was built for " + std::to_string(f.n_points) + " points, space has " + std::to_string(n));
    return v;
  }
  if (!(f.delta > 0.0 && f.delta < 1.0)) note("delta outside (0,1)");
  if (f.k_max < f.k_min || f.levels.size() != static_cast<std::size_t>(f.k_max - f.k_min + 1) ||
      f.cube_of.size() != f.levels.size()) {
    note("resolution range does not match the stored levels");
    return v;
  }
  double a0 = kInfinity, c1 = 0.0;
  for (std::size_t l = 0; l < f.levels.size(); ++l) {
    const int k = f.k_min + static_cast<int>(l);
    const double s = f.scale(k);
    const auto& cubes = f.levels[l];
    std::vector<std::size_t> owner(n, cubes.size());
    for (std::size_t i = 0; i < cubes.size(); ++i) {
      const Cube& c = cubes[i];
      if (c.members.empty()) note("partition: " + name(k, i) + " is empty");
      if (!std::is_sorted(c.members.begin(), c.members.end())) note(name(k, i) + " members are not sorted");
      for (PointIndex x : c.members) {
        if (x >= n) {
          note("partition: " + name(k, i) + " has an out-of-range member");
          continue;
        }
        if (owner[x] != cubes.size()) note("partition: point " + space.id(x) + " lies in two cubes at resolution " + std::to_string(k));
        owner[x] = i;
        if (f.cube_of[l].size() != n || f.cube_of[l][x] != i) note("cube lookup of point " + space.id(x) + " is stale at resolution " + std::to_string(k));
      }
      if (!std::binary_search(c.members.begin(), c.members.end(), c.center)) note(name(k, i) + " does not contain its center");
      const double diam = cube_diameter(space, c.members);
      c1 = std::max(c1, diam / s);
      if (diam > f.realized_c1 * s) note("diameter: " + name(k, i) + " exceeds C1 delta^k");
      if (c.members.size() < n && !c.members.empty()) {
        const double out = distance_out(space, c.center, c.members);
        a0 = std::min(a0, out / s);
        if (!(f.realized_a0 * s <= out)) note("inner ball: B(z, a0 delta^k) escapes " + name(k, i));
      }
      if (l > 0) {
        if (c.parent >= f.levels[l - 1].size()) {
          note("nesting: " + name(k, i) + " has no parent");
        } else {
          const Cube& p = f.levels[l - 1][c.parent];
          if (!std::includes(p.members.begin(), p.members.end(), c.members.begin(), c.members.end()))
            note("nesting: " + name(k, i) + " is not inside its parent");
          if (std::find(p.children.begin(), p.children.end(), i) == p.children.end())
            note("nesting: parent of " + name(k, i) + " does not list it as a child");
        }
      }
      if (l + 1 < f.levels.size()) {
        std::vector<PointIndex> uni;
        for (std::size_t ch : c.children) {
          if (ch >= f.levels[l + 1].size()) {
            note("nesting: " + name(k, i) + " lists a missing child");
            continue;
          }
          const auto& m = f.levels[l + 1][ch].members;
          uni.insert(uni.end(), m.begin(), m.end());
        }
        std::sort(uni.begin(), uni.end());
        if (uni != c.members) note("partition: " + name(k, i) + " is not the disjoint union of its children");
      }
    }
    for (PointIndex x = 0; x < n; ++x)
      if (owner[x] == cubes.size()) note("partition: point " + space.id(x) + " is uncovered at resolution " + std::to_string(k));
  }
  if (f.levels.front().size() != 1) note("coarsest level is not a single cube");
  for (const Cube& c : f.levels.back())
    if (c.members.size() != 1) note("finest level is not all singletons");
  v.a0 = std::isfinite(a0) ? a0 : 1.0;
  v.c1 = c1 > 0.0 ? c1 : 1.0;
  return v;
}

int resolution_for_radius(const DyadicForest& f, double r) {
  require(r > 0.0, "radius must be positive");
  int k = static_cast<int>(std::floor(std::log(r) / std::log(f.delta)));
  while (f.scale(k) > r) ++k;
  while (f.scale(k - 1) <= r) --k;
  return std::clamp(k, f.k_min, f.k_max);
}

std::vector<std::size_t> cubes_meeting(const DyadicForest& f, int k, const Ball& b) {
  std::vector<std::size_t> out;
  for (PointIndex x : b.members) out.push_back(f.cube_index(k, x));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CubeBallInteraction cube_ball_interaction(const FiniteSpace& space, const DyadicForest& f, const Ball& b,
                                          int k, std::size_t cube) {
  require(k >= f.k_min && k <= f.k_max, "resolution outside the forest range");
  const auto& cubes = f.level(k);
  require(cube < cubes.size(), "cube index out of range");
  const Cube& q = cubes[cube];
  require(std::binary_search(q.members.begin(), q.members.end(), b.center), "ball center lies outside the cube");
  CubeBallInteraction res;
  std::vector<PointIndex> both;
  std::set_intersection(b.members.begin(), b.members.end(), q.members.begin(), q.members.end(),
                        std::back_inserter(both));
  res.mu_ball_cube = space.measure(both);
  res.mu_cube = q.mass;
  res.mu_ball = b.mass;
  res.contained_case = b.radius >= f.realized_c1 * f.scale(k);
  if (res.contained_case) {
    res.holds = res.mu_ball_cube == res.mu_cube;
    return res;
  }
  const double tau = std::max(2.0, f.realized_c1 / (f.realized_a0 * f.delta));
  res.constant = doubling_constant(space, tau, f.realized_a0 * f.scale(k));
  res.holds = res.mu_ball_cube * res.constant >= res.mu_ball * (1.0 - 1e-12);
  return res;
}

CoveringSelection covering_select(const FiniteSpace& space, const DyadicForest& f, std::span<const char> in_a,
                                  double kappa, int nu_min, double ihat) {
  const std::size_t n = space.size();
  require(in_a.size() == n, "set mask length differs from the space size");
  require(kappa > 0.0, "kappa must be positive");
  require(ihat >= 0.0, "isoperimetric constant must be nonnegative");
  std::vector<PointIndex> a;
  for (PointIndex x = 0; x < n; ++x)
    if (in_a[x]) a.push_back(x);
  require(!a.empty() && a.size() < n, "A must be a nonempty proper subset");

  CoveringSelection sel;
  sel.kappa = kappa;
  sel.mass_a = space.measure(a);
  sel.target_fraction = (1.0 - std::exp(-ihat * kappa)) / 2.0;

  std::vector<double> to_c(n, 0.0);
  for (PointIndex x : a) {
    double d = kInfinity;
    for (PointIndex y = 0; y < n; ++y)
      if (!in_a[y]) d = std::min(d, space.distance(x, y));
    to_c[x] = d;
  }
  const int floor_level = std::clamp(nu_min, f.k_min, f.k_max);
  auto inside = [&](const Cube& c) {
    return std::all_of(c.members.begin(), c.members.end(), [&](PointIndex x) { return in_a[x] != 0; });
  };
  // maximal cubes of C (finest level is singletons, so they cover A)
  std::vector<SelectedCube> candidates;
  std::vector<char> covered(n, 0);
  for (int k = floor_level; k <= f.k_max; ++k) {
    const auto& cubes = f.level(k);
    for (std::size_t i = 0; i < cubes.size(); ++i) {
      const Cube& c = cubes[i];
      if (covered[c.center] || !inside(c)) continue;
      for (PointIndex x : c.members) covered[x] = 1;
      double d = kInfinity;
      for (PointIndex x : c.members) d = std::min(d, to_c[x]);
      if (d <= kappa) candidates.push_back({k, i, c.mass, d});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const SelectedCube& x, const SelectedCube& y) { return x.mass > y.mass; });
  const double target = sel.target_fraction * sel.mass_a;
  CompensatedSum got;
  for (const auto& c : candidates) {
    if (got.value() >= target) break;
    sel.selected.push_back(c);
    got += c.mass;
  }
  sel.achieved_fraction = got.value() / sel.mass_a;
  sel.feasible = got.value() >= target;
  return sel;
}

}  // namespace hbl
