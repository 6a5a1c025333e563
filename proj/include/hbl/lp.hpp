#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hbl {

struct SparseColumn {
  std::vector<std::pair<std::size_t, double>> entries;  // (row, value)
  double cost = 0.0;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

/// Two-phase revised simplex for  min c.x  s.t.  A x = rhs, x >= 0, with a
/// dense basis inverse and optional column generation.
///
/// The pricing callback receives the current row duals and the phase, and
/// returns columns to append (an empty result means none price out).
class RevisedSimplex {
 public:
  using Pricer = std::function<std::vector<SparseColumn>(std::span<const double> duals, bool phase_one)>;

  explicit RevisedSimplex(std::vector<double> rhs);

  std::size_t add_column(SparseColumn column);
  LpStatus solve(const Pricer& price = {}, std::size_t max_iterations = 500000);

  std::size_t rows() const noexcept { return rhs_.size(); }
  std::size_t columns() const noexcept { return columns_.size(); }
  const SparseColumn& column(std::size_t j) const { return columns_.at(j); }

  double objective() const;
  /// Value of every structural column (zero when nonbasic).
  std::vector<double> primal() const;
  std::vector<double> duals() const;
  std::size_t iterations() const noexcept { return iterations_; }
  /// Phase-one residual infeasibility at exit.
  double infeasibility() const;

 private:
  struct Var {
    bool artificial;
    std::size_t index;  // column index or artificial row
  };

  double cost(const Var& v) const;
  Eigen::VectorXd direction(const Var& v) const;
  double reduced_cost(std::size_t j, const Eigen::VectorXd& y) const;
  Eigen::VectorXd current_duals() const;
  void refactor();
  bool iterate(const Pricer& price, std::size_t max_iterations, LpStatus& status);

  std::vector<double> rhs_;
  std::vector<double> work_rhs_;
  double perturbation_ = 0.0;
  std::vector<double> art_sign_;
  std::vector<SparseColumn> columns_;
  std::vector<char> basic_col_;
  std::vector<Var> basis_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  bool phase_one_ = true;
  bool started_ = false;
  std::size_t iterations_ = 0;
  std::size_t since_refactor_ = 0;
};

}  // namespace hbl
