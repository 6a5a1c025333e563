#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hbl/common.hpp"
#include "hbl/space.hpp"

namespace hbl {

struct Cube {
  PointIndex center = 0;
  std::vector<PointIndex> members;  // sorted
  std::size_t parent = 0;           // index into the previous (coarser) level
  std::vector<std::size_t> children;
  double mass = 0.0;
  double diameter = 0.0;
};

/// Nested partitions Q^k, k = k_min..k_max, at scales delta^k. Level k_min is
/// the whole space; level k_max is all singletons.
struct DyadicForest {
  double delta = 0.5;
  int k_min = 0;
  int k_max = 0;
  std::size_t n_points = 0;
  std::vector<std::vector<Cube>> levels;
  /// cube_of[k - k_min][x] = index of the level-k cube containing x.
  std::vector<std::vector<std::size_t>> cube_of;
  /// Net scan order used for construction (and tie breaks).
  std::vector<PointIndex> order;
  double realized_a0 = 1.0;
  double realized_c1 = 1.0;

  double scale(int k) const;
  const std::vector<Cube>& level(int k) const { return levels.at(static_cast<std::size_t>(k - k_min)); }
  std::size_t cube_index(int k, PointIndex x) const { return cube_of.at(static_cast<std::size_t>(k - k_min))[x]; }
  const Cube& cube(int k, PointIndex x) const { return level(k)[cube_index(k, x)]; }
};

/// Scan order for the greedy nets: index order, or a seeded shuffle.
std::vector<PointIndex> tie_break_order(std::size_t n, bool random, std::uint64_t seed);

DyadicForest build_forest(const FiniteSpace& space, double delta, std::vector<PointIndex> order);
DyadicForest build_forest(const FiniteSpace& space, double delta);

struct ForestVerification {
  bool ok = true;
  std::vector<std::string> violations;
  double a0 = 0.0;  // recomputed
  double c1 = 0.0;  // recomputed
};

/// Recomputes every structural property from the member lists alone and
/// compares against the recorded constants.
ForestVerification verify_forest(const FiniteSpace& space, const DyadicForest& forest);

struct CubeBallInteraction {
  double mu_ball_cube = 0.0;
  double mu_cube = 0.0;
  double mu_ball = 0.0;
  bool contained_case = false;  // r_B >= C1 delta^k
  double constant = 1.0;        // D used in the lower bound
  bool holds = false;
};

/// mu(B cap Q) for the cube Q of resolution k containing the center of B,
/// checked against the equality case or the lower bound mu(B)/D.
CubeBallInteraction cube_ball_interaction(const FiniteSpace& space, const DyadicForest& forest,
                                          const Ball& b, int k, std::size_t cube);

/// Resolution k with delta^k <= r < delta^(k-1), clamped to the forest range.
int resolution_for_radius(const DyadicForest& forest, double r);

/// Indices of the level-k cubes that meet the ball.
std::vector<std::size_t> cubes_meeting(const DyadicForest& forest, int k, const Ball& b);

struct SelectedCube {
  int level;
  std::size_t index;
  double mass;
  double distance_to_complement;
};

struct CoveringSelection {
  std::vector<SelectedCube> selected;
  double kappa = 0.0;
  double mass_a = 0.0;
  double target_fraction = 0.0;
  double achieved_fraction = 0.0;
  bool feasible = true;
};

/// Maximal cubes of resolution >= nu_min inside A, restricted to those meeting
/// the band A_kappa, taken greedily by mass until (1 - e^{-I kappa})/2 of mu(A).
CoveringSelection covering_select(const FiniteSpace& space, const DyadicForest& forest,
                                  std::span<const char> in_a, double kappa, int nu_min, double ihat);

}  // namespace hbl
