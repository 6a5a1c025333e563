#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hbl/common.hpp"
#include "hbl/dyadic.hpp"
#include "hbl/space.hpp"

namespace hbl {

/// Weighted average of f over a point set.
double set_average(const FiniteSpace& space, std::span<const PointIndex> set, std::span<const double> f);

/// ((1/mu(B)) sum_B w |f - f_B|^q)^(1/q).
double mean_oscillation(const FiniteSpace& space, const Ball& b, std::span<const double> f, double q = 1.0);

/// (sum w |f|^p)^(1/p); p = infinity gives the max norm.
double lp_norm(const FiniteSpace& space, std::span<const double> f, double p);

/// f minus its weighted mean over the whole space.
std::vector<double> centered(const FiniteSpace& space, std::span<const double> f);

/// M_k f(x): largest cube average of |f| over cubes of resolution >= k
/// containing x.
std::vector<double> maximal_function(const FiniteSpace& space, const DyadicForest& forest,
                                     std::span<const double> f, int k);

struct WeakTypeResult {
  double constant = 0.0;  // sup_alpha alpha mu({Mf > alpha}) / ||f||_1
  double alpha = 0.0;     // level where the sup is approached
};

/// Exact over the finite set of levels of M_k f.
WeakTypeResult weak_type_constant(const FiniteSpace& space, const DyadicForest& forest,
                                  std::span<const double> f, int k);

std::vector<double> sharp_function(const FiniteSpace& space, const BallFamily& family, std::span<const double> f);
std::vector<double> sharp_function(const FiniteSpace& space, std::span<const double> f, double b);

/// Coarsest resolution whose cubes all have diameter <= diam / 4.
int base_resolution(const DyadicForest& forest);

struct GoodLambdaConstants {
  int base_resolution = 0;
  double kappa = 0.0;
  double ihat = 0.0;
  Provenance ihat_provenance = Provenance::Estimate;
  double c0 = 0.0;
  double b_prime = 0.0;
  double sigma = 0.0;
  double d = 0.0;
  double eta_prime = 0.5;
  double eps = 0.0;
  double eta = 1.0;
  bool vacuous = false;
};

struct GoodLambdaOptions {
  double eta_prime = 0.5;
  std::optional<double> eps;
  std::vector<double> alphas;  // empty: levels of M f and their midpoints
  double b0 = 0.0;             // lower bound on b'
};

enum class RowStatus { Pass, Fail, NotApplicable };
std::string_view row_status_name(RowStatus s) noexcept;

struct GoodLambdaRow {
  double alpha = 0.0;
  double lhs = 0.0;  // mu({M f > alpha, f^sharp <= eps alpha})
  double rhs = 0.0;  // mu({M f > eta' alpha})
  double ratio = 0.0;
  RowStatus status = RowStatus::NotApplicable;
};

struct GoodLambdaReport {
  GoodLambdaConstants constants;
  std::vector<GoodLambdaRow> rows;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t not_applicable = 0;
  bool pass = false;
};

GoodLambdaConstants good_lambda_constants(const FiniteSpace& space, const DyadicForest& forest,
                                          const IsoperimetricProfile& iso, const GoodLambdaOptions& options);

GoodLambdaReport good_lambda_check(const FiniteSpace& space, const DyadicForest& forest, std::span<const double> f,
                                   const IsoperimetricProfile& iso, const GoodLambdaOptions& options = {});

struct SharpLowerBound {
  double p = 2.0;
  double min_ratio = kInfinity;  // min over the corpus of ||f^sharp||_p / ||f - mean||_p
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};

std::vector<SharpLowerBound> sharp_lower_bound(const FiniteSpace& space, const std::vector<std::vector<double>>& corpus,
                                               std::span<const double> ps, double b_prime);

}  // namespace hbl
