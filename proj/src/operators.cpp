#include "hbl/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "hbl/hardy_bmo.hpp"
#include "hbl/maximal.hpp"

namespace hbl {

std::vector<double> KernelOperator::diagonal() const {
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = kernel[i * n + i];
  return d;
}

KernelOperator make_kernel(std::size_t n, std::vector<double> kernel, std::string name) {
  require(kernel.size() == n * n, "kernel must have n*n entries");
  for (double v : kernel)
    if (!std::isfinite(v)) fail(ErrorCode::InvalidParameter, "kernel entries must be finite");
  return {n, std::move(kernel), std::move(name)};
}

bool is_self_adjoint(const KernelOperator& op, double tol) {
  for (std::size_t x = 0; x < op.n; ++x)
    for (std::size_t y = x + 1; y < op.n; ++y)
      if (std::fabs(op(x, y) - op(y, x)) > tol) return false;
  return true;
}

std::vector<double> apply(const FiniteSpace& space, const KernelOperator& op, std::span<const double> f) {
  require(op.n == space.size() && f.size() == op.n, "operator, function and space sizes differ");
  std::vector<double> out(op.n);
  for (std::size_t x = 0; x < op.n; ++x) {
    CompensatedSum s;
    for (std::size_t y = 0; y < op.n; ++y) s += op(x, y) * f[y] * space.weight(y);
    out[x] = s.value();
  }
  return out;
}

std::vector<double> operator_matrix(const FiniteSpace& space, const KernelOperator& op) {
  require(op.n == space.size(), "operator and space sizes differ");
  std::vector<double> m(op.kernel);
  for (std::size_t x = 0; x < op.n; ++x)
    for (std::size_t y = 0; y < op.n; ++y) m[x * op.n + y] *= space.weight(y);
  return m;
}

Multiplier heat_multiplier(double t) {
  require(t > 0.0 && std::isfinite(t), "heat time must be positive");
  return {"heat(t=" + format_decimal(t) + ")", [t](double l) { return std::exp(-t * l); }};
}

Multiplier resolvent_multiplier(double s) {
  require(s > 0.0 && std::isfinite(s), "resolvent shift must be positive");
  return {"resolvent(s=" + format_decimal(s) + ")", [s](double l) { return 1.0 / (s + l); }};
}

Multiplier band_multiplier(double cutoff, double width) {
  require(width > 0.0 && std::isfinite(cutoff), "band width must be positive");
  return {"band(cutoff=" + format_decimal(cutoff) + ",width=" + format_decimal(width) + ")",
          [cutoff, width](double l) { return 1.0 / (1.0 + std::exp((l - cutoff) / width)); }};
}

Multiplier polynomial_multiplier(std::vector<double> coefficients) {
  require(!coefficients.empty(), "polynomial needs at least one coefficient");
  std::string name = "polynomial(";
  for (std::size_t i = 0; i < coefficients.size(); ++i) name += (i ? "," : "") + format_decimal(coefficients[i]);
  name += ")";
  return {name, [c = std::move(coefficients)](double l) {
            double v = 0.0;
            for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * l + *it;
            return v;
          }};
}

KernelOperator spectral_multiplier(const FiniteSpace& space, const Multiplier& m) {
  const std::size_t n = space.size();
  if (!space.has_adjacency() && n > 1) fail(ErrorCode::InvalidParameter, "spectral multipliers need a graph space");
  if (n > 2000) fail(ErrorCode::InvalidParameter, "dense eigendecomposition limited to 2000 points");
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::VectorXd isw(N);
  for (std::size_t x = 0; x < n; ++x) isw(static_cast<Eigen::Index>(x)) = 1.0 / std::sqrt(space.weight(x));
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(N, N);
  const auto& adj = space.adjacency();
  for (std::size_t x = 0; x < n && !adj.empty(); ++x) {
    const auto i = static_cast<Eigen::Index>(x);
    s(i, i) = static_cast<double>(adj[x].size()) * isw(i) * isw(i);
    for (PointIndex y : adj[x]) s(i, static_cast<Eigen::Index>(y)) = -isw(i) * isw(static_cast<Eigen::Index>(y));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() != Eigen::Success) fail(ErrorCode::Internal, "eigendecomposition failed");
  Eigen::VectorXd mv(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double lambda = std::max(0.0, eig.eigenvalues()(i));
    mv(i) = m.m(lambda);
    if (!std::isfinite(mv(i)))
      fail(ErrorCode::InvalidParameter, "multiplier " + m.name + " is not finite at eigenvalue " + format_decimal(lambda));
  }
  const Eigen::MatrixXd& u = eig.eigenvectors();
  const Eigen::MatrixXd f = u * mv.asDiagonal() * u.transpose();
  std::vector<double> k(n * n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x; y < n; ++y) {
      const auto i = static_cast<Eigen::Index>(x), j = static_cast<Eigen::Index>(y);
      const double v = isw(i) * f(i, j) * isw(j);
      k[x * n + y] = v;
      k[y * n + x] = v;
    }
  return {n, std::move(k), m.name};
}

double l2_norm(const FiniteSpace& space, const KernelOperator& op) {
  require(op.n == space.size(), "operator and space sizes differ");
  const auto N = static_cast<Eigen::Index>(op.n);
  if (N == 0) return 0.0;
  Eigen::MatrixXd a(N, N);
  for (std::size_t x = 0; x < op.n; ++x)
    for (std::size_t y = 0; y < op.n; ++y)
      a(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) =
          std::sqrt(space.weight(x)) * op(x, y) * std::sqrt(space.weight(y));
  if (is_self_adjoint(op, 0.0)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

namespace {

// sup over pairs in b of sum_{x outside} |k(x,y) - k(x,y')| w(x), or the
// transposed sum.
void scan_ball(const FiniteSpace& space, const KernelOperator& op, const Ball& b, const std::vector<PointIndex>& outside,
               bool transposed, std::size_t ball_index, double& best, std::size_t& best_ball, PointIndex& by,
               PointIndex& by2) {
  auto k = [&](PointIndex x, PointIndex y) { return transposed ? op(y, x) : op(x, y); };
  for (std::size_t i = 0; i < b.members.size(); ++i)
    for (std::size_t j = i + 1; j < b.members.size(); ++j) {
      const PointIndex y = b.members[i], y2 = b.members[j];
      CompensatedSum s;
      for (PointIndex x : outside) s += std::fabs(k(x, y) - k(x, y2)) * space.weight(x);
      if (s.value() > best) {
        best = s.value();
        best_ball = ball_index;
        by = y;
        by2 = y2;
      }
    }
}

}  // namespace

HormanderConstants hormander_constants(const FiniteSpace& space, const KernelOperator& op, const BallFamily& family,
                                       bool strict_radii) {
  require(op.n == space.size(), "operator and space sizes differ");
  HormanderConstants h;
  h.b = family.bound;
  std::vector<PointIndex> outside;
  for (std::size_t bi = 0; bi < family.balls.size(); ++bi) {
    const Ball& b = family.balls[bi];
    if (b.members.size() < 2) continue;
    double reach = 0.0;
    if (strict_radii)
      for (PointIndex y : b.members) reach = std::max(reach, space.distance(b.center, y));
    outside.clear();
    for (PointIndex x = 0; x < space.size(); ++x) {
      const double d = space.distance(b.center, x);
      if (strict_radii ? d > 2.0 * reach : d >= 2.0 * b.radius) outside.push_back(x);
    }
    if (outside.empty()) continue;
    scan_ball(space, op, b, outside, false, bi, h.nu, h.nu_ball, h.nu_y, h.nu_y2);
    scan_ball(space, op, b, outside, true, bi, h.upsilon, h.upsilon_ball, h.upsilon_y, h.upsilon_y2);
  }
  return h;
}

HormanderConstants hormander_constants(const FiniteSpace& space, const KernelOperator& op, double b,
                                       bool strict_radii) {
  require(b > 0.0, "ball bound must be positive");
  return hormander_constants(space, op, enumerate_balls(space, b), strict_radii);
}

NormEstimate h1_to_l1_estimate(const FiniteSpace& space, const KernelOperator& op, double b, std::size_t n_samples,
                               std::uint64_t seed) {
  require(n_samples >= 1, "at least one sample is required");
  require(op.n == space.size(), "operator and space sizes differ");
  const BallFamily family = enumerate_balls(space, b);
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < family.balls.size(); ++i)
    if (family.balls[i].members.size() > 1) usable.push_back(i);
  NormEstimate est;
  est.samples = n_samples;
  if (usable.empty()) return est;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> scores(space.size());
  for (std::size_t s = 0; s < n_samples; ++s) {
    const Ball& ball = family.balls[usable[rng() % usable.size()]];
    for (double& v : scores) v = unit(rng);
    if (s % 2 == 1) {
      // two-block atom: split the ball by distance along a random direction
      const PointIndex pole = ball.members[rng() % ball.members.size()];
      for (PointIndex x = 0; x < space.size(); ++x) scores[x] = -space.distance(pole, x) + 1e-3 * scores[x];
    }
    const Atom a = vertex_atom(space, ball, scores);
    const std::vector<double> ta = apply(space, op, a.values);
    est.estimate = std::max(est.estimate, lp_norm(space, ta, 1.0));
  }
  return est;
}

NormEstimate linf_to_bmo_estimate(const FiniteSpace& space, const KernelOperator& op, double b, std::size_t n_samples,
                                  std::uint64_t seed) {
  require(n_samples >= 1, "at least one sample is required");
  require(op.n == space.size(), "operator and space sizes differ");
  const BallFamily family = enumerate_balls(space, b);
  NormEstimate est;
  est.samples = n_samples;
  std::mt19937_64 rng(seed);
  std::vector<double> f(space.size(), 1.0);
  for (std::size_t s = 0; s < n_samples; ++s) {
    if (s > 0)
      for (double& v : f) v = (rng() & 1) ? 1.0 : -1.0;
    const std::vector<double> tf = apply(space, op, f);
    est.estimate = std::max(est.estimate, bmo_norm(space, family, tf, 1.0).value);
  }
  return est;
}

}  // namespace hbl
