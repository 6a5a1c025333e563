#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hbl/common.hpp"
#include "hbl/space.hpp"

namespace hbl {

/// Dense real kernel; (T f)(x) = sum_y k(x,y) f(y) w(y). The diagonal is
/// stored with the kernel but never enters the Hormander integrals.
struct KernelOperator {
  std::size_t n = 0;
  std::vector<double> kernel;  // row-major n x n
  std::string name;

  double operator()(PointIndex x, PointIndex y) const { return kernel[x * n + y]; }
  std::vector<double> diagonal() const;
};

KernelOperator make_kernel(std::size_t n, std::vector<double> kernel, std::string name = {});
bool is_self_adjoint(const KernelOperator& op, double tol = 1e-12);

std::vector<double> apply(const FiniteSpace& space, const KernelOperator& op, std::span<const double> f);

/// Matrix of T acting on point values: M(x,y) = k(x,y) w(y).
std::vector<double> operator_matrix(const FiniteSpace& space, const KernelOperator& op);

struct Multiplier {
  std::string name;
  std::function<double(double)> m;
};

Multiplier heat_multiplier(double t);
Multiplier resolvent_multiplier(double s);
/// Smoothed indicator of [0, cutoff]: 1 / (1 + e^{(lambda - cutoff) / width}).
Multiplier band_multiplier(double cutoff, double width);
Multiplier polynomial_multiplier(std::vector<double> coefficients);

/// m(L) for the weighted graph Laplacian L = W^{-1}(D - A).
KernelOperator spectral_multiplier(const FiniteSpace& space, const Multiplier& m);

/// Operator norm on L^2(mu).
double l2_norm(const FiniteSpace& space, const KernelOperator& op);

struct HormanderConstants {
  double b = 0.0;
  double nu = 0.0;
  double upsilon = 0.0;
  std::size_t nu_ball = 0;
  PointIndex nu_y = 0, nu_y2 = 0;
  std::size_t upsilon_ball = 0;
  PointIndex upsilon_y = 0, upsilon_y2 = 0;
};

/// nu: sup_B sup_{y,y' in B} sum_{x notin 2B} |k(x,y) - k(x,y')| w(x);
/// upsilon: the same with the kernel transposed. With `strict_radii`, 2B is
/// taken at the smallest admissible radius of each ball.
HormanderConstants hormander_constants(const FiniteSpace& space, const KernelOperator& op, double b,
                                       bool strict_radii = false);
HormanderConstants hormander_constants(const FiniteSpace& space, const KernelOperator& op, const BallFamily& family,
                                       bool strict_radii = false);

struct NormEstimate {
  double estimate = 0.0;  // lower bound on the operator norm
  std::size_t samples = 0;
  Provenance provenance = Provenance::Estimate;
};

/// max ||T a||_1 over sampled (1, infinity)-atoms of the family B_b.
NormEstimate h1_to_l1_estimate(const FiniteSpace& space, const KernelOperator& op, double b, std::size_t n_samples,
                               std::uint64_t seed);

/// max N^1_b(T f) over sampled sign vectors f.
NormEstimate linf_to_bmo_estimate(const FiniteSpace& space, const KernelOperator& op, double b, std::size_t n_samples,
                                  std::uint64_t seed);

}  // namespace hbl
