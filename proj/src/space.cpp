#include "hbl/space.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>
#include <sstream>

namespace hbl {

namespace {

constexpr std::size_t kMaxPoints = 100000;

std::vector<std::string> numbered_ids(std::size_t n) {
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
  return ids;
}

std::vector<double> bfs_distances(std::size_t n, const std::vector<std::vector<PointIndex>>& adj) {
  std::vector<double> dist(n * n, kInfinity);
  std::vector<PointIndex> queue(n);
  for (PointIndex s = 0; s < n; ++s) {
    double* row = dist.data() + s * n;
    row[s] = 0.0;
    std::size_t head = 0, tail = 0;
    queue[tail++] = s;
    while (head < tail) {
      const PointIndex u = queue[head++];
      for (PointIndex v : adj[u]) {
        if (row[v] == kInfinity) {
          row[v] = row[u] + 1.0;
          queue[tail++] = v;
        }
      }
    }
  }
  return dist;
}

std::vector<std::vector<PointIndex>> build_adjacency(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::vector<PointIndex>> adj(n);
  for (const auto& e : edges) {
    if (e.a >= n || e.b >= n) fail(ErrorCode::DataError, "edge endpoint out of range");
    if (e.a == e.b) fail(ErrorCode::DataError, "self-loop at point " + std::to_string(e.a));
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  for (auto& nbrs : adj) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  return adj;
}

}  // namespace

FiniteSpace::FiniteSpace(std::vector<std::string> ids, std::vector<double> weights,
                         std::vector<double> distances, std::vector<Edge> edges,
                         std::vector<char> interior)
    : ids_(std::move(ids)),
      weights_(std::move(weights)),
      dist_(std::move(distances)),
      edges_(std::move(edges)),
      interior_(std::move(interior)) {
  const std::size_t n = ids_.size();
  if (n == 0) fail(ErrorCode::DataError, "space has no points");
  if (n > kMaxPoints) fail(ErrorCode::InvalidParameter, "space exceeds the point budget");
  if (weights_.size() != n) fail(ErrorCode::DataError, "weights length differs from points length");
  if (dist_.size() != n * n) fail(ErrorCode::DataError, "distance matrix is not |points| x |points|");
  if (!interior_.empty() && interior_.size() != n)
    fail(ErrorCode::DataError, "interior mask length differs from points length");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
      fail(ErrorCode::DataError, "weight of point " + ids_[i] + " is not a positive finite number");
  }
  for (double d : dist_) {
    if (!std::isfinite(d)) fail(ErrorCode::DataError, "distance matrix has a non-finite entry (disconnected graph?)");
  }
  graph_ = !edges_.empty();
  adjacency_ = build_adjacency(n, edges_);
  index();
}

FiniteSpace FiniteSpace::from_edges(std::vector<std::string> ids, std::vector<double> weights,
                                    std::vector<Edge> edges, std::vector<char> interior) {
  const std::size_t n = ids.size();
  if (n == 0) fail(ErrorCode::DataError, "space has no points");
  if (n > kMaxPoints) fail(ErrorCode::InvalidParameter, "space exceeds the point budget");
  auto adj = build_adjacency(n, edges);
  auto dist = bfs_distances(n, adj);
  FiniteSpace s(std::move(ids), std::move(weights), std::move(dist), std::move(edges), std::move(interior));
  s.graph_ = true;
  return s;
}

void FiniteSpace::index() {
  const std::size_t n = size();
  lookup_.clear();
  for (std::size_t i = 0; i < n; ++i) {
    if (!lookup_.emplace(ids_[i], i).second) fail(ErrorCode::DataError, "duplicate point id " + ids_[i]);
  }
  order_.resize(n * n);
  sorted_dist_.resize(n * n);
  prefix_mass_.resize(n * n);
  diameter_ = 0.0;
  min_distance_ = kInfinity;
  for (std::size_t c = 0; c < n; ++c) {
    std::uint32_t* ord = order_.data() + c * n;
    const double* row = dist_.data() + c * n;
    std::iota(ord, ord + n, 0u);
    std::stable_sort(ord, ord + n, [row](std::uint32_t a, std::uint32_t b) { return row[a] < row[b]; });
    CompensatedSum mass;
    for (std::size_t k = 0; k < n; ++k) {
      sorted_dist_[c * n + k] = row[ord[k]];
      mass += weights_[ord[k]];
      prefix_mass_[c * n + k] = mass.value();
    }
    diameter_ = std::max(diameter_, sorted_dist_[c * n + n - 1]);
    if (n > 1) min_distance_ = std::min(min_distance_, sorted_dist_[c * n + 1]);
  }
  if (n == 1) min_distance_ = 0.0;
  CompensatedSum total;
  for (double w : weights_) total += w;
  total_mass_ = total.value();
}

std::optional<PointIndex> FiniteSpace::find(const std::string& id) const {
  auto it = lookup_.find(id);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t FiniteSpace::ball_count(PointIndex center, double radius) const noexcept {
  const double* first = sorted_dist_.data() + center * size();
  return static_cast<std::size_t>(std::lower_bound(first, first + size(), radius) - first);
}

double FiniteSpace::ball_measure(PointIndex center, double radius) const noexcept {
  const std::size_t k = ball_count(center, radius);
  return k == 0 ? 0.0 : prefix_mass_[center * size() + k - 1];
}

double FiniteSpace::measure(std::span<const PointIndex> points) const noexcept {
  CompensatedSum s;
  for (PointIndex p : points) s += weights_[p];
  return s.value();
}

std::vector<std::string> FiniteSpace::metric_violations(double tol, std::size_t limit) const {
  std::vector<std::string> out;
  const std::size_t n = size();
  auto note = [&](std::string msg) {
    if (out.size() < limit) out.push_back(std::move(msg));
  };
  for (std::size_t i = 0; i < n && out.size() < limit; ++i) {
    if (distance(i, i) != 0.0) note("d(" + ids_[i] + "," + ids_[i] + ") != 0");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::fabs(distance(i, j) - distance(j, i)) > tol)
        note("asymmetric distance between (" + ids_[i] + ", " + ids_[j] + ")");
      if (!(distance(i, j) > 0.0)) note("nonpositive distance between (" + ids_[i] + ", " + ids_[j] + ")");
    }
  }
  if (!out.empty()) return out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dij = distance(i, j);
      for (std::size_t k = 0; k < n; ++k) {
        if (dij > distance(i, k) + distance(k, j) + tol) {
          note("triangle inequality fails for (" + ids_[i] + ", " + ids_[k] + ", " + ids_[j] + ")");
          if (out.size() >= limit) return out;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- generators

FiniteSpace gen_tree(int q, int depth) {
  require(q >= 2, "tree degree must be at least 2");
  require(depth >= 0, "tree depth must be nonnegative");
  // 1 + q * sum_{i<depth} (q-1)^i nodes
  double count = 1.0, layer = static_cast<double>(q);
  for (int d = 1; d <= depth; ++d) {
    count += layer;
    layer *= (q - 1);
    require(count <= static_cast<double>(kMaxPoints), "tree size exceeds the point budget");
  }
  std::vector<Edge> edges;
  std::vector<int> level{0};
  std::vector<PointIndex> frontier{0};
  std::size_t next = 1;
  for (int d = 1; d <= depth; ++d) {
    std::vector<PointIndex> grown;
    for (PointIndex parent : frontier) {
      const int children = parent == 0 ? q : q - 1;
      for (int c = 0; c < children; ++c) {
        edges.push_back({parent, next});
        level.push_back(d);
        grown.push_back(next++);
      }
    }
    frontier = std::move(grown);
  }
  std::vector<char> interior(next);
  for (std::size_t i = 0; i < next; ++i) interior[i] = level[i] < depth ? 1 : 0;
  return FiniteSpace::from_edges(numbered_ids(next), std::vector<double>(next, 1.0), std::move(edges),
                                 std::move(interior));
}

FiniteSpace gen_path(int n) {
  require(n >= 1, "path length must be at least 1");
  require(static_cast<std::size_t>(n) <= kMaxPoints, "path size exceeds the point budget");
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({static_cast<PointIndex>(i), static_cast<PointIndex>(i + 1)});
  std::vector<char> interior(n);
  for (int i = 0; i < n; ++i) interior[i] = (i > 0 && i + 1 < n) ? 1 : 0;
  return FiniteSpace::from_edges(numbered_ids(n), std::vector<double>(n, 1.0), std::move(edges),
                                 std::move(interior));
}

FiniteSpace gen_grid(int d, int n) {
  require(d == 1 || d == 2, "grid dimension must be 1 or 2");
  require(n >= 1, "grid side must be at least 1");
  if (d == 1) return gen_path(n);
  require(static_cast<double>(n) * n <= static_cast<double>(kMaxPoints), "grid size exceeds the point budget");
  const std::size_t side = static_cast<std::size_t>(n);
  std::vector<Edge> edges;
  std::vector<char> interior(side * side);
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      const PointIndex p = r * side + c;
      if (c + 1 < side) edges.push_back({p, p + 1});
      if (r + 1 < side) edges.push_back({p, p + side});
      interior[p] = (r > 0 && c > 0 && r + 1 < side && c + 1 < side) ? 1 : 0;
    }
  }
  return FiniteSpace::from_edges(numbered_ids(side * side), std::vector<double>(side * side, 1.0),
                                 std::move(edges), std::move(interior));
}

double hyperbolic_distance(double zx, double zy, double wx, double wy) {
  const double dx = zx - wx, dy = zy - wy;
  const double num = 2.0 * (dx * dx + dy * dy);
  const double den = (1.0 - (zx * zx + zy * zy)) * (1.0 - (wx * wx + wy * wy));
  // arccosh(1 + x) = 2 asinh(sqrt(x / 2)), stable for small x
  return 2.0 * std::asinh(std::sqrt(num / den / 2.0));
}

FiniteSpace gen_hyperbolic_disk(int n_cells, double max_radius, std::uint64_t seed) {
  require(n_cells >= 1, "nCells must be at least 1");
  require(max_radius > 0.0 && std::isfinite(max_radius), "maxRadius must be positive");
  require(static_cast<std::size_t>(n_cells) <= 20000, "nCells exceeds the dense-metric budget");
  const double euclid_radius = std::tanh(max_radius / 2.0);
  std::vector<std::pair<double, double>> pts;
  std::vector<double> weights;
  if (n_cells == 1) {
    pts.emplace_back(0.0, 0.0);
    const double s = std::sinh(max_radius / 2.0);
    weights.push_back(4.0 * M_PI * s * s);
  } else {
    const double h = std::sqrt(M_PI * euclid_radius * euclid_radius / n_cells);
    const int cells = static_cast<int>(std::ceil(2.0 * euclid_radius / h));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    for (int i = 0; i < cells; ++i) {
      for (int j = 0; j < cells; ++j) {
        const double x = -euclid_radius + (i + jitter(rng)) * h;
        const double y = -euclid_radius + (j + jitter(rng)) * h;
        const double r2 = x * x + y * y;
        if (r2 >= euclid_radius * euclid_radius) continue;
        const double density = 4.0 / ((1.0 - r2) * (1.0 - r2));
        pts.emplace_back(x, y);
        weights.push_back(density * h * h);
      }
    }
    if (pts.empty()) {
      pts.emplace_back(0.0, 0.0);
      weights.push_back(4.0 * h * h);
    }
  }
  // reject exact duplicates (distance 0 would break metric positivity)
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dup = false;
    for (std::size_t j : keep) dup = dup || (pts[i] == pts[j]);
    if (!dup) keep.push_back(i);
  }
  const std::size_t n = keep.size();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto& p = pts[keep[a]];
      const auto& q = pts[keep[b]];
      dist[a * n + b] = dist[b * n + a] = hyperbolic_distance(p.first, p.second, q.first, q.second);
    }
  }
  const double interior_radius = max_radius - std::min(1.0, max_radius / 4.0);
  std::vector<double> w(n);
  std::vector<char> interior(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto& p = pts[keep[a]];
    w[a] = weights[keep[a]];
    interior[a] = hyperbolic_distance(0.0, 0.0, p.first, p.second) <= interior_radius ? 1 : 0;
  }
  std::vector<std::string> ids(n);
  for (std::size_t a = 0; a < n; ++a) ids[a] = "h" + std::to_string(a);
  return FiniteSpace(std::move(ids), std::move(w), std::move(dist), {}, std::move(interior));
}

// ---------------------------------------------------------------- balls

bool Ball::contains(PointIndex p) const { return std::binary_search(members.begin(), members.end(), p); }

Ball ball(const FiniteSpace& space, PointIndex center, double radius) {
  require(radius > 0.0, "ball radius must be positive");
  require(center < space.size(), "ball center is not a point of the space");
  Ball b;
  b.center = center;
  b.radius = radius;
  const auto order = space.by_distance(center);
  const std::size_t k = space.ball_count(center, radius);
  b.members.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(b.members.begin(), b.members.end());
  b.mass = space.measure(b.members);
  return b;
}

Ball dilate(const FiniteSpace& space, const Ball& b, double factor) {
  return ball(space, b.center, b.radius * factor);
}

BallFamily enumerate_balls(const FiniteSpace& space, double b) {
  require(b > 0.0, "ball-family bound must be positive");
  BallFamily family;
  family.bound = b;
  const std::size_t n = space.size();
  std::map<std::pair<double, std::vector<PointIndex>>, std::size_t> seen;
  for (PointIndex c = 0; c < n; ++c) {
    const auto order = space.by_distance(c);
    std::size_t k = 0;
    while (k < n) {
      const double dk = space.distance(c, order[k]);
      if (!(dk < b)) break;
      std::size_t end = k;
      while (end < n && space.distance(c, order[end]) == dk) ++end;
      const double next = end < n ? space.distance(c, order[end]) : kInfinity;
      Ball ball;
      ball.center = c;
      ball.radius = std::min(b, next);
      ball.members.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(end));
      std::sort(ball.members.begin(), ball.members.end());
      auto key = std::make_pair(ball.radius, ball.members);
      if (seen.emplace(std::move(key), family.balls.size()).second) {
        ball.mass = space.measure(ball.members);
        family.balls.push_back(std::move(ball));
      }
      k = end;
    }
  }
  family.containing.assign(n, {});
  for (std::size_t i = 0; i < family.balls.size(); ++i)
    for (PointIndex p : family.balls[i].members) family.containing[p].push_back(i);
  return family;
}

// ---------------------------------------------------------------- geometry

double doubling_constant(const FiniteSpace& space, const BallFamily& family, double tau) {
  require(tau >= 2.0, "doubling dilation tau must be at least 2");
  double best = 1.0;
  const std::size_t n = space.size();
  for (const Ball& b : family.balls) {
    const double reach = tau * b.radius;
    double extent = 0.0;
    for (PointIndex y : b.members) extent = std::max(extent, space.distance(b.center, y));
    for (PointIndex c = 0; c < n; ++c) {
      const double dc = space.distance(c, b.center);
      if (!(dc < reach)) continue;
      bool inside = true;
      if (!(dc + extent < reach))
        for (PointIndex y : b.members) {
          if (!(space.distance(c, y) < reach)) {
            inside = false;
            break;
          }
        }
      if (!inside) continue;
      best = std::max(best, space.ball_measure(c, reach) / b.mass);
    }
  }
  return best;
}

double doubling_constant(const FiniteSpace& space, double tau, double b) {
  return doubling_constant(space, enumerate_balls(space, b), tau);
}

std::vector<DoublingEntry> doubling_constants(const FiniteSpace& space, std::span<const double> taus,
                                              std::span<const double> bs) {
  std::vector<DoublingEntry> out;
  for (double b : bs) {
    const BallFamily family = enumerate_balls(space, b);
    for (double tau : taus) out.push_back({tau, b, doubling_constant(space, family, tau)});
  }
  return out;
}

namespace {

// distance from each member of A to the complement, written into `out`
void distance_to_complement(const FiniteSpace& space, std::span<const char> in_a, std::vector<double>& out) {
  const std::size_t n = space.size();
  out.assign(n, kInfinity);
  if (space.has_adjacency()) {
    std::deque<PointIndex> queue;
    for (PointIndex x = 0; x < n; ++x) {
      if (!in_a[x]) {
        out[x] = 0.0;
        queue.push_back(x);
      }
    }
    while (!queue.empty()) {
      const PointIndex u = queue.front();
      queue.pop_front();
      for (PointIndex v : space.adjacency()[u]) {
        if (out[v] == kInfinity) {
          out[v] = out[u] + 1.0;
          queue.push_back(v);
        }
      }
    }
    return;
  }
  std::vector<PointIndex> outside;
  for (PointIndex x = 0; x < n; ++x)
    if (!in_a[x]) outside.push_back(x);
  for (PointIndex x = 0; x < n; ++x) {
    if (!in_a[x]) {
      out[x] = 0.0;
      continue;
    }
    double d = kInfinity;
    for (PointIndex y : outside) d = std::min(d, space.distance(x, y));
    out[x] = d;
  }
}

}  // namespace

double boundary_band_measure(const FiniteSpace& space, std::span<const char> in_a, double kappa) {
  std::vector<double> to_c;
  distance_to_complement(space, in_a, to_c);
  CompensatedSum s;
  for (PointIndex x = 0; x < space.size(); ++x)
    if (in_a[x] && to_c[x] <= kappa) s += space.weight(x);
  return s.value();
}

IsoperimetricProfile isoperimetric_profile(const FiniteSpace& space, const IsoperimetricOptions& options) {
  const std::size_t n = space.size();
  if (n < 2) fail(ErrorCode::DegenerateSpace, "a one-point space has no proper subsets");
  require(!options.kappas.empty(), "kappa grid is empty");
  require(options.n_samples >= 1, "nSamples must be at least 1");
  for (double k : options.kappas) require(k > 0.0, "kappa must be positive");

  IsoperimetricProfile prof;
  prof.kappas = options.kappas;
  std::sort(prof.kappas.begin(), prof.kappas.end());
  prof.kappas.erase(std::unique(prof.kappas.begin(), prof.kappas.end()), prof.kappas.end());
  const std::size_t nk = prof.kappas.size();
  prof.raw.assign(nk, kInfinity);

  std::vector<PointIndex> domain;
  for (PointIndex x = 0; x < n; ++x)
    if (space.is_interior(x)) domain.push_back(x);
  if (domain.empty()) fail(ErrorCode::DegenerateSpace, "space has no interior points");

  std::vector<char> in_a(n, 0);
  std::vector<double> to_c;
  auto evaluate = [&]() {
    double mass_a = 0.0;
    std::size_t count = 0;
    {
      CompensatedSum s;
      for (PointIndex x = 0; x < n; ++x)
        if (in_a[x]) {
          s += space.weight(x);
          ++count;
        }
      mass_a = s.value();
    }
    if (count == 0 || count == n) return;
    ++prof.subsets_examined;
    distance_to_complement(space, in_a, to_c);
    for (std::size_t i = 0; i < nk; ++i) {
      CompensatedSum band;
      for (PointIndex x = 0; x < n; ++x)
        if (in_a[x] && to_c[x] <= prof.kappas[i]) band += space.weight(x);
      const double ratio = band.value() / (prof.kappas[i] * mass_a);
      if (ratio < prof.raw[i]) {
        prof.raw[i] = ratio;
        if (i == 0) {
          prof.witness.clear();
          for (PointIndex x = 0; x < n; ++x)
            if (in_a[x]) prof.witness.push_back(x);
        }
      }
    }
  };

  if (domain.size() <= options.exhaustive_limit) {
    prof.provenance = Provenance::Exact;
    const std::uint64_t limit = std::uint64_t{1} << domain.size();
    for (std::uint64_t mask = 1; mask < limit; ++mask) {
      std::fill(in_a.begin(), in_a.end(), 0);
      for (std::size_t i = 0; i < domain.size(); ++i)
        if (mask >> i & 1u) in_a[domain[i]] = 1;
      evaluate();
    }
  } else {
    prof.provenance = Provenance::Estimate;
    std::vector<char> in_domain(n, 0);
    for (PointIndex x : domain) in_domain[x] = 1;
    std::mt19937_64 rng(options.seed);
    auto emit = [&](const std::vector<char>& set) {
      in_a = set;
      evaluate();
      // complement within the domain
      for (PointIndex x = 0; x < n; ++x) in_a[x] = in_domain[x] && !set[x];
      evaluate();
    };
    // the whole domain
    emit(in_domain);
    // balls intersected with the domain
    std::vector<std::pair<PointIndex, double>> balls;
    for (PointIndex c = 0; c < n; ++c) {
      const auto order = space.by_distance(c);
      double last = -1.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double d = space.distance(c, order[k]);
        if (d != last) {
          balls.emplace_back(c, d);
          last = d;
        }
      }
    }
    const std::size_t ball_budget = 8 * options.n_samples;
    if (balls.size() > ball_budget) {
      std::shuffle(balls.begin(), balls.end(), rng);
      balls.resize(ball_budget);
      std::sort(balls.begin(), balls.end());
    }
    std::vector<char> set(n);
    for (const auto& [c, d] : balls) {
      for (PointIndex x = 0; x < n; ++x) set[x] = in_domain[x] && space.distance(c, x) <= d;
      emit(set);
    }
    // random connected pieces of the domain grown from a random seed point
    std::uniform_int_distribution<std::size_t> pick(0, domain.size() - 1);
    for (std::size_t s = 0; s < options.n_samples; ++s) {
      std::fill(set.begin(), set.end(), 0);
      const std::size_t target = 1 + pick(rng);
      std::vector<PointIndex> frontier{domain[pick(rng)]};
      set[frontier[0]] = 1;
      std::size_t size = 1;
      while (size < target && !frontier.empty()) {
        std::uniform_int_distribution<std::size_t> fpick(0, frontier.size() - 1);
        const std::size_t fi = fpick(rng);
        const PointIndex u = frontier[fi];
        std::vector<PointIndex> options_out;
        if (space.has_adjacency()) {
          for (PointIndex v : space.adjacency()[u])
            if (in_domain[v] && !set[v]) options_out.push_back(v);
        } else {
          const auto order = space.by_distance(u);
          for (std::size_t k = 1; k < std::min<std::size_t>(n, 7); ++k)
            if (in_domain[order[k]] && !set[order[k]]) options_out.push_back(order[k]);
        }
        if (options_out.empty()) {
          frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(fi));
          continue;
        }
        std::uniform_int_distribution<std::size_t> opick(0, options_out.size() - 1);
        const PointIndex v = options_out[opick(rng)];
        set[v] = 1;
        frontier.push_back(v);
        ++size;
      }
      emit(set);
    }
  }

  prof.constants.resize(nk);
  double running = kInfinity;
  for (std::size_t i = 0; i < nk; ++i) {
    running = std::min(running, prof.raw[i]);
    prof.constants[i] = running;
  }
  prof.ihat = *std::max_element(prof.constants.begin(), prof.constants.end());
  return prof;
}

PairCover cover_pair(const FiniteSpace& space, PointIndex x, PointIndex y) {
  PairCover best{x, space.distance(x, y)};
  for (PointIndex c = 0; c < space.size(); ++c) {
    const double reach = std::max(space.distance(c, x), space.distance(c, y));
    if (reach < best.reach) best = {c, reach};
  }
  return best;
}

AmpResult amp_check(const FiniteSpace& space, double r0, double beta, std::size_t max_violations) {
  require(r0 >= 0.0, "R0 must be nonnegative");
  require(beta > 0.5 && beta < 1.0, "beta must lie in (1/2, 1)");
  AmpResult res;
  res.r0 = r0;
  res.beta = beta;
  const std::size_t n = space.size();
  for (PointIndex x = 0; x < n; ++x) {
    for (PointIndex y = x + 1; y < n; ++y) {
      const double d = space.distance(x, y);
      if (!(d > r0)) continue;
      ++res.pairs_checked;
      const PairCover cov = cover_pair(space, x, y);
      if (!(cov.reach < beta * d)) {
        res.pass = false;
        if (res.violations.size() < max_violations) res.violations.push_back({x, y, d, cov.reach});
      }
    }
  }
  return res;
}

std::size_t connected_components(const FiniteSpace& space, std::vector<std::size_t>* labels) {
  const std::size_t n = space.size();
  std::vector<std::size_t> lab(n, n);
  std::size_t count = 0;
  if (!space.has_adjacency()) {
    std::fill(lab.begin(), lab.end(), 0);
    count = 1;
  } else {
    for (PointIndex s = 0; s < n; ++s) {
      if (lab[s] != n) continue;
      std::vector<PointIndex> stack{s};
      lab[s] = count;
      while (!stack.empty()) {
        const PointIndex u = stack.back();
        stack.pop_back();
        for (PointIndex v : space.adjacency()[u])
          if (lab[v] == n) {
            lab[v] = count;
            stack.push_back(v);
          }
      }
      ++count;
    }
  }
  if (labels) *labels = std::move(lab);
  return count;
}

std::size_t max_degree(const FiniteSpace& space) {
  std::size_t d = 0;
  for (const auto& nbrs : space.adjacency()) d = std::max(d, nbrs.size());
  return d;
}

namespace {

Eigen::MatrixXd combinatorial_laplacian(const FiniteSpace& space) {
  const std::size_t n = space.size();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (PointIndex u = 0; u < n; ++u) {
    for (PointIndex v : space.adjacency()[u]) lap(u, v) = -1.0;
    lap(u, u) = static_cast<double>(space.adjacency()[u].size());
  }
  return lap;
}

}  // namespace

CheegerResult cheeger_constant(const FiniteSpace& space, std::size_t exact_limit) {
  require(space.has_adjacency(), "Cheeger constant needs a graph space");
  CheegerResult res;
  const std::size_t n = space.size();
  if (n < 2) {
    res.exact = true;
    return res;
  }
  if (connected_components(space) > 1) {
    res.disconnected = true;
    res.exact = true;
    return res;
  }
  const double half = space.total_mass() / 2.0;
  res.h = kInfinity;
  if (n <= exact_limit) {
    res.exact = true;
    const std::uint64_t limit = std::uint64_t{1} << n;
    for (std::uint64_t mask = 1; mask + 1 < limit; ++mask) {
      CompensatedSum mass;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1u) mass += space.weight(i);
      if (mass.value() > half * (1.0 + 1e-12)) continue;
      std::size_t cut = 0;
      for (const Edge& e : space.edges())
        if (((mask >> e.a) ^ (mask >> e.b)) & 1u) ++cut;
      const double ratio = static_cast<double>(cut) / mass.value();
      if (ratio < res.h) {
        res.h = ratio;
        res.witness.clear();
        for (std::size_t i = 0; i < n; ++i)
          if (mask >> i & 1u) res.witness.push_back(i);
      }
    }
    return res;
  }
  require(n <= 2000, "Fiedler sweep needs a dense eigensolve (at most 2000 vertices)");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(combinatorial_laplacian(space));
  const Eigen::VectorXd fiedler = eig.eigenvectors().col(1);
  std::vector<PointIndex> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](PointIndex a, PointIndex b) { return fiedler(a) < fiedler(b); });
  std::vector<char> in_s(n, 0);
  long cut = 0;
  CompensatedSum mass;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const PointIndex v = order[k];
    for (PointIndex u : space.adjacency()[v]) cut += in_s[u] ? -1 : 1;
    in_s[v] = 1;
    mass += space.weight(v);
    const double small = std::min(mass.value(), space.total_mass() - mass.value());
    const double ratio = static_cast<double>(cut) / small;
    if (ratio < res.h) {
      res.h = ratio;
      best_k = k;
    }
  }
  std::vector<PointIndex> side(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_k + 1));
  if (space.measure(side) > half) side.assign(order.begin() + static_cast<std::ptrdiff_t>(best_k + 1), order.end());
  std::sort(side.begin(), side.end());
  res.witness = std::move(side);
  return res;
}

double spectral_gap(const FiniteSpace& space) {
  require(space.has_adjacency(), "spectral gap needs a graph space");
  require(space.size() <= 2000, "spectral gap needs a dense eigensolve (at most 2000 vertices)");
  if (space.size() < 2 || connected_components(space) > 1) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(combinatorial_laplacian(space), Eigen::EigenvaluesOnly);
  return std::max(0.0, eig.eigenvalues()(1));
}

std::vector<std::pair<double, double>> volume_growth(const FiniteSpace& space, PointIndex origin) {
  require(origin < space.size(), "origin is not a point of the space");
  std::vector<std::pair<double, double>> out;
  const auto order = space.by_distance(origin);
  const std::size_t n = space.size();
  for (std::size_t k = 0; k < n;) {
    const double d = space.distance(origin, order[k]);
    std::size_t end = k;
    while (end < n && space.distance(origin, order[end]) == d) ++end;
    const double r = end < n ? space.distance(origin, order[end]) : d + std::max(space.min_distance(), 1.0);
    out.emplace_back(r, space.ball_measure(origin, r));
    k = end;
  }
  return out;
}

}  // namespace hbl
