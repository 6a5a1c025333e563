#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hbl/common.hpp"

namespace hbl {

struct Edge {
  PointIndex a;
  PointIndex b;
};

/// Finite metric measure space: exact pairwise distances and positive point
/// masses. Immutable after construction.
///
/// Spaces produced by the generators are finite truncations of infinite
/// models; points whose model neighbourhood was cut away are flagged as
/// truncation boundary (`is_interior() == false`).
class FiniteSpace {
 public:
  FiniteSpace(std::vector<std::string> ids, std::vector<double> weights,
              std::vector<double> distances, std::vector<Edge> edges = {},
              std::vector<char> interior = {});

  /// Graph space: unit edge lengths, shortest-path metric.
  static FiniteSpace from_edges(std::vector<std::string> ids, std::vector<double> weights,
                                std::vector<Edge> edges, std::vector<char> interior = {});

  std::size_t size() const noexcept { return ids_.size(); }
  double distance(PointIndex x, PointIndex y) const noexcept { return dist_[x * size() + y]; }
  double weight(PointIndex x) const noexcept { return weights_[x]; }
  std::span<const double> weights() const noexcept { return weights_; }
  const std::string& id(PointIndex x) const noexcept { return ids_[x]; }
  std::span<const std::string> ids() const noexcept { return ids_; }
  std::optional<PointIndex> find(const std::string& id) const;

  double total_mass() const noexcept { return total_mass_; }
  double diameter() const noexcept { return diameter_; }
  /// Smallest positive distance; 0 for a one-point space.
  double min_distance() const noexcept { return min_distance_; }

  bool has_adjacency() const noexcept { return !edges_.empty() || graph_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const std::vector<std::vector<PointIndex>>& adjacency() const noexcept { return adjacency_; }

  bool is_interior(PointIndex x) const noexcept { return interior_.empty() || interior_[x] != 0; }
  bool has_truncation_boundary() const noexcept { return !interior_.empty(); }
  std::span<const char> interior_mask() const noexcept { return interior_; }

  /// Points ordered by distance from `center` (ties by index).
  std::span<const std::uint32_t> by_distance(PointIndex center) const noexcept {
    return {order_.data() + center * size(), size()};
  }
  /// Number of members of the open ball B(center, radius).
  std::size_t ball_count(PointIndex center, double radius) const noexcept;
  /// mu(B(center, radius)) for the open ball.
  double ball_measure(PointIndex center, double radius) const noexcept;
  double measure(std::span<const PointIndex> points) const noexcept;

  /// Metric-axiom violations, each naming the points involved; empty when the
  /// space is a genuine metric space within `tol`.
  std::vector<std::string> metric_violations(double tol, std::size_t limit = 16) const;

 private:
  void index();

  std::vector<std::string> ids_;
  std::vector<double> weights_;
  std::vector<double> dist_;
  std::vector<Edge> edges_;
  std::vector<char> interior_;
  bool graph_ = false;
  std::vector<std::vector<PointIndex>> adjacency_;
  std::map<std::string, PointIndex> lookup_;
  std::vector<std::uint32_t> order_;
  std::vector<double> sorted_dist_;
  std::vector<double> prefix_mass_;
  double total_mass_ = 0.0;
  double diameter_ = 0.0;
  double min_distance_ = 0.0;
};

// ---------------------------------------------------------------- generators

FiniteSpace gen_tree(int q, int depth);
FiniteSpace gen_path(int n);
FiniteSpace gen_grid(int d, int n);
/// Jittered-grid sample of the Poincare disk, truncated at hyperbolic radius
/// `max_radius`, with hyperbolic-area weights.
FiniteSpace gen_hyperbolic_disk(int n_cells, double max_radius, std::uint64_t seed);

/// Poincare-disk distance between two points of the open unit disk.
double hyperbolic_distance(double zx, double zy, double wx, double wy);

// ---------------------------------------------------------------- balls

/// Open ball {y : d(center, y) < radius}; members sorted by index.
struct Ball {
  PointIndex center = 0;
  double radius = 0.0;
  std::vector<PointIndex> members;
  double mass = 0.0;

  bool contains(PointIndex p) const;
};

Ball ball(const FiniteSpace& space, PointIndex center, double radius);

/// Same center, radius scaled by `factor`.
Ball dilate(const FiniteSpace& space, const Ball& b, double factor);

/// One representative per distinguishable open ball of radius <= bound,
/// carrying its canonical radius min(bound, next distinct distance).
struct BallFamily {
  double bound = 0.0;
  std::vector<Ball> balls;
  /// containing[p] lists the family balls that contain p.
  std::vector<std::vector<std::size_t>> containing;
};

BallFamily enumerate_balls(const FiniteSpace& space, double b);

// ---------------------------------------------------------------- geometry

/// D_{tau,b}: largest mu(B')/mu(B) over B in the family and balls B' (any
/// center) with B subset of B' and r_{B'} <= tau * r_B.
double doubling_constant(const FiniteSpace& space, const BallFamily& family, double tau);
double doubling_constant(const FiniteSpace& space, double tau, double b);

struct DoublingEntry {
  double tau;
  double b;
  double value;
};
std::vector<DoublingEntry> doubling_constants(const FiniteSpace& space,
                                              std::span<const double> taus,
                                              std::span<const double> bs);

struct IsoperimetricOptions {
  std::vector<double> kappas{1.0, 2.0, 3.0};
  std::size_t n_samples = 256;
  std::uint64_t seed = 1;
  /// Subset enumeration is exhaustive when the candidate domain is this small.
  std::size_t exhaustive_limit = 18;
};

struct IsoperimetricProfile {
  std::vector<double> kappas;
  /// min over sampled A of mu(A_kappa) / (kappa mu(A)) at each kappa.
  std::vector<double> raw;
  /// Running minimum of `raw` over the grid (nonincreasing in kappa).
  std::vector<double> constants;
  double ihat = 0.0;
  Provenance provenance = Provenance::Estimate;
  std::size_t subsets_examined = 0;
  std::vector<PointIndex> witness;
};

/// Isoperimetric constants C_kappa and the estimate of I_M. Candidate sets are
/// nonempty proper subsets of the interior (the whole space when the space has
/// no truncation boundary).
IsoperimetricProfile isoperimetric_profile(const FiniteSpace& space,
                                           const IsoperimetricOptions& options = {});

/// mu(A_kappa) where A_kappa = {x in A : d(x, A^c) <= kappa}.
double boundary_band_measure(const FiniteSpace& space, std::span<const char> in_a, double kappa);

struct AmpViolation {
  PointIndex x;
  PointIndex y;
  double distance;
  double best_radius;  ///< smallest radius any ball containing both must exceed
};

struct AmpResult {
  bool pass = true;
  double r0 = 0.0;
  double beta = 0.0;
  std::size_t pairs_checked = 0;
  std::vector<AmpViolation> violations;
};

/// Smallest enclosing-ball data for a pair: the center minimizing
/// max(d(c,x), d(c,y)) and that maximum. Any open ball around `center` with
/// radius above `reach` contains both points.
struct PairCover {
  PointIndex center;
  double reach;
};
PairCover cover_pair(const FiniteSpace& space, PointIndex x, PointIndex y);

AmpResult amp_check(const FiniteSpace& space, double r0, double beta, std::size_t max_violations = 64);

struct CheegerResult {
  double h = 0.0;
  bool exact = false;
  bool disconnected = false;
  std::vector<PointIndex> witness;
};

/// Edge-boundary Cheeger constant min |dA| / mu(A) over mu(A) <= mu(M)/2.
/// Exhaustive up to `exact_limit` vertices, Fiedler sweep cut above.
CheegerResult cheeger_constant(const FiniteSpace& space, std::size_t exact_limit = 20);

/// Smallest nonzero eigenvalue of the combinatorial Laplacian D - A; 0 when
/// the graph is disconnected.
double spectral_gap(const FiniteSpace& space);

std::size_t connected_components(const FiniteSpace& space, std::vector<std::size_t>* labels = nullptr);
std::size_t max_degree(const FiniteSpace& space);

std::vector<std::pair<double, double>> volume_growth(const FiniteSpace& space, PointIndex origin);

}  // namespace hbl
