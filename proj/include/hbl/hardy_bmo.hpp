#pragma once

#include <span>
#include <string>
#include <vector>

#include "hbl/common.hpp"
#include "hbl/dyadic.hpp"
#include "hbl/space.hpp"

namespace hbl {

/// An (1, infinity)-atom: `values` has one entry per point of the space and
/// vanishes off `ball`.
struct Atom {
  Ball ball;
  std::vector<double> values;
};

struct AtomCheck {
  bool ok = true;
  double mean = 0.0;         // |sum w a|
  double size_excess = 0.0;  // max(0, max|a| mu(B) - 1)
  std::vector<std::string> violations;
};

AtomCheck validate_atom(const FiniteSpace& space, const Atom& atom);

/// Extreme atom on `b` aligned with `scores`: +1/mu(B) on the upper half of
/// the mass, -1/mu(B) on the lower half, one fractional point at the median.
Atom vertex_atom(const FiniteSpace& space, const Ball& b, std::span<const double> scores);

struct DecompositionTerm {
  double lambda = 0.0;
  Atom atom;
};

struct H1Result {
  bool feasible = false;
  std::string reason;  // why infeasible
  double value = 0.0;       // primal optimum, sum of coefficients
  double dual_value = 0.0;  // <g, y> for the rescaled dual-feasible y
  double gap = 0.0;
  /// Dual certificate as a function f = y / w; every ball has median
  /// oscillation at most 1 after rescaling.
  std::vector<double> dual;
  double dual_scale = 1.0;
  double residual_l1 = 0.0;  // ||sum lambda a - g||_1
  std::vector<DecompositionTerm> terms;
  std::size_t columns = 0;
  std::size_t iterations = 0;
  std::size_t active_rows = 0;
};

struct H1Options {
  double r = kInfinity;  // only r = infinity is supported
  std::size_t max_iterations = 2000000;
  bool keep_terms = true;
};

/// ||g||_{H^{1,r}_b}: exact LP optimum over atoms supported in balls of the
/// family B_b, solved by column generation with a dual certificate.
H1Result h1_norm(const FiniteSpace& space, std::span<const double> g, double b, const H1Options& options = {});
H1Result h1_norm(const FiniteSpace& space, const BallFamily& family, std::span<const double> g,
                 const H1Options& options = {});

/// The same norm from an explicit LP in per-ball pieces g_B = p_B - n_B with
/// |g_B| <= t_B / mu(B). Dense, for small spaces only.
struct ExplicitLpResult {
  bool feasible = false;
  double value = 0.0;
};
ExplicitLpResult h1_norm_explicit(const FiniteSpace& space, std::span<const double> g, double b);

/// Exact feasibility: g must integrate to zero over every class of points
/// linked by non-singleton balls of the family.
bool h1_feasible(const FiniteSpace& space, const BallFamily& family, std::span<const double> g, std::string* reason);

struct BmoValue {
  double value = 0.0;
  double q = 1.0;
  double b = 0.0;
  Ball ball;
};

BmoValue bmo_norm(const FiniteSpace& space, std::span<const double> f, double q, double b);
BmoValue bmo_norm(const FiniteSpace& space, const BallFamily& family, std::span<const double> f, double q);

struct SplitOptions {
  double c = 0.0;
  double b_big = 0.0;
  double beta = 0.75;
  double r0 = 1.0;
  /// Allow c <= R0/(1-beta): beta' = (1-beta)/2 and pairs within R0 use their
  /// smallest enclosing ball instead of the (AMP) ball.
  bool discrete = false;
};

struct SplitResult {
  std::vector<DecompositionTerm> terms;
  std::size_t passes = 0;
  double beta_prime = 0.0;
  double coefficient_bound = 0.0;  // K = 2 D_{1/beta',b} D_{tau,b} per pass
  double count_bound = 0.0;        // N_1 per pass
  double max_pass_coefficient = 0.0;
  std::size_t max_pass_count = 0;
  double residual_relative = 0.0;
};

SplitResult split_atom(const FiniteSpace& space, const Atom& atom, const SplitOptions& options);

struct ScaleEquivalence {
  double max_ratio = 0.0;
  std::size_t instances = 0;
  std::size_t skipped = 0;
  std::size_t ordering_violations = 0;
  std::size_t infeasible_at_c = 0;
  double max_gap = 0.0;
};

/// Checks the (R0, beta, b, c) preconditions and (AMP) before computing.
ScaleEquivalence h1_scale_equivalence(const FiniteSpace& space, const std::vector<std::vector<double>>& corpus, double b,
                                      double c, double r0, double beta);
ScaleEquivalence bmo_scale_equivalence(const FiniteSpace& space, const std::vector<std::vector<double>>& corpus, double q,
                                       double b, double c, double r0, double beta);

/// Smallest distinct distance of the space at or above 1.1 R0 / (1 - beta).
double default_b0(const FiniteSpace& space, double r0, double beta);

struct JnRow {
  double s = 0.0;
  double ratio = 0.0;  // worst-ball mu({x in B : |f - f_B| > s}) / mu(B)
  std::size_t ball = 0;
};

struct JnReport {
  double b0 = 0.0;
  double norm_scale = 0.0;  // 2 max(C1, b0)
  double n = 0.0;           // N^1 at norm_scale
  std::vector<JnRow> rows;
  double eta = 0.0;
  double j = 0.0;
  bool fitted = false;  // false when eta came from the fallback
  bool degenerate = false;
  bool covered = false;  // every row satisfies ratio <= J e^{-eta s / N}
};

JnReport jn_experiment(const FiniteSpace& space, const DyadicForest& forest, std::span<const double> f, double b0,
                       std::size_t max_rows = 512);

struct JnCorollary {
  double q = 2.0;
  double nq = 0.0;     // N^q at b0
  double bound = 0.0;  // (J q Gamma(q))^(1/q) N / eta
  bool holds = false;
};

JnCorollary jn_corollary(const FiniteSpace& space, std::span<const double> f, const JnReport& report, double q);

struct PairingCheck {
  bool skipped = false;
  double pairing = 0.0;
  double n1 = 0.0;
  double h1 = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  bool holds = false;
};

PairingCheck duality_pairing_check(const FiniteSpace& space, std::span<const double> f, std::span<const double> g,
                                   double b);

double pairing(const FiniteSpace& space, std::span<const double> f, std::span<const double> g);

}  // namespace hbl
