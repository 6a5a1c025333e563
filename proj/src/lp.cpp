#include "hbl/lp.hpp"

#include <cmath>
#include <cstdint>

#include "hbl/common.hpp"

namespace hbl {

namespace {
constexpr double kPivotTol = 1e-9;
constexpr double kRelativePivotTol = 1e-7;
constexpr double kCostTol = 1e-10;
constexpr double kFeasTol = 1e-9;
constexpr std::size_t kRefactorEvery = 100;
constexpr std::size_t kDegenerateSwitch = 50;
constexpr double kPerturbation = 1e-7;

// deterministic spread in [1, 2)
double jitter(std::size_t i) {
  const std::uint64_t h = (static_cast<std::uint64_t>(i) + 1) * 0x9E3779B97F4A7C15ull;
  return 1.0 + static_cast<double>(h >> 11) * 0x1.0p-53;
}
}  // namespace

RevisedSimplex::RevisedSimplex(std::vector<double> rhs) : rhs_(std::move(rhs)) {
  for (double v : rhs_) require(std::isfinite(v), "LP right-hand side must be finite");
}

std::size_t RevisedSimplex::add_column(SparseColumn column) {
  for (const auto& [row, value] : column.entries) {
    require(row < rhs_.size(), "LP column entry outside the row range");
    require(std::isfinite(value), "LP column entry must be finite");
  }
  columns_.push_back(std::move(column));
  basic_col_.push_back(0);
  return columns_.size() - 1;
}

double RevisedSimplex::cost(const Var& v) const {
  if (v.artificial) return phase_one_ ? 1.0 : 0.0;
  return phase_one_ ? 0.0 : columns_[v.index].cost;
}

Eigen::VectorXd RevisedSimplex::direction(const Var& v) const {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows()));
  if (v.artificial) {
    u += binv_.col(static_cast<Eigen::Index>(v.index)) * art_sign_[v.index];
  } else {
    for (const auto& [row, value] : columns_[v.index].entries) u += binv_.col(static_cast<Eigen::Index>(row)) * value;
  }
  return u;
}

Eigen::VectorXd RevisedSimplex::current_duals() const {
  Eigen::VectorXd cb(static_cast<Eigen::Index>(rows()));
  for (std::size_t i = 0; i < basis_.size(); ++i) cb(static_cast<Eigen::Index>(i)) = cost(basis_[i]);
  return binv_.transpose() * cb;
}

double RevisedSimplex::reduced_cost(std::size_t j, const Eigen::VectorXd& y) const {
  const double c = phase_one_ ? 0.0 : columns_[j].cost;
  double s = c, scale = 1.0 + std::fabs(c);
  for (const auto& [row, value] : columns_[j].entries) {
    const double t = y(static_cast<Eigen::Index>(row)) * value;
    s -= t;
    scale += std::fabs(t);
  }
  // values within rounding noise of zero count as zero
  return s < -kCostTol * scale ? s : 0.0;
}

void RevisedSimplex::refactor() {
  const auto m = static_cast<Eigen::Index>(rows());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Var& v = basis_[static_cast<std::size_t>(i)];
    if (v.artificial) {
      b(static_cast<Eigen::Index>(v.index), i) = art_sign_[v.index];
    } else {
      for (const auto& [row, value] : columns_[v.index].entries) b(static_cast<Eigen::Index>(row), i) = value;
    }
  }
  binv_ = b.partialPivLu().inverse();
  if (!binv_.allFinite()) fail(ErrorCode::Internal, "simplex basis became singular");
  Eigen::Map<const Eigen::VectorXd> rhs(work_rhs_.data(), m);
  xb_ = binv_ * rhs;
  for (Eigen::Index i = 0; i < m; ++i)
    if (xb_(i) < 0.0 && xb_(i) > -1e-9) xb_(i) = 0.0;
  since_refactor_ = 0;
}

LpStatus RevisedSimplex::solve(const Pricer& price, std::size_t max_iterations) {
  const std::size_t m = rows();
  if (!started_) {
    started_ = true;
    phase_one_ = true;
    art_sign_.resize(m);
    basis_.clear();
    binv_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    xb_.resize(static_cast<Eigen::Index>(m));
    // the solve runs on a slightly enlarged right-hand side so that no basic
    // variable sits at zero; the true one is restored at the end
    work_rhs_ = rhs_;
    perturbation_ = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      art_sign_[i] = rhs_[i] < 0.0 ? -1.0 : 1.0;
      const double e = kPerturbation * (1.0 + std::fabs(rhs_[i])) * jitter(i);
      work_rhs_[i] += art_sign_[i] * e;
      perturbation_ += e;
      basis_.push_back({true, i});
      binv_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = art_sign_[i];
      xb_(static_cast<Eigen::Index>(i)) = std::fabs(work_rhs_[i]);
    }
  }
  LpStatus status = LpStatus::Optimal;
  iterate(price, max_iterations, status);
  if (status == LpStatus::Optimal && perturbation_ > 0.0) {
    work_rhs_ = rhs_;
    perturbation_ = 0.0;
    refactor();
    xb_ = xb_.cwiseMax(0.0);
  }
  return status;
}

bool RevisedSimplex::iterate(const Pricer& price, std::size_t max_iterations, LpStatus& status) {
  const std::size_t m = rows();
  std::size_t degenerate = 0;
  // columns whose ratio test found no acceptable pivot, until the next pivot
  std::vector<char> rejected(columns_.size(), 0);
  bool pricer_blocked = false;
  double rhs_scale = 1.0;
  for (double v : rhs_) rhs_scale = std::max(rhs_scale, std::fabs(v));

  while (true) {
    if (iterations_ >= max_iterations) {
      status = LpStatus::IterationLimit;
      return false;
    }
    const bool bland = degenerate > kDegenerateSwitch;
    const Eigen::VectorXd y = current_duals();
    std::size_t entering = columns_.size();
    bool from_pricer = false;
    double best = 0.0;
    rejected.resize(columns_.size(), 0);
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      if (basic_col_[j] || rejected[j]) continue;
      const double rc = reduced_cost(j, y);
      if (rc < best) {
        best = rc;
        entering = j;
        if (bland) break;
      }
    }
    if (entering == columns_.size() && price && !pricer_blocked) {
      const std::size_t before = columns_.size();
      std::vector<double> yv(y.data(), y.data() + y.size());
      for (auto& col : price(yv, phase_one_)) add_column(std::move(col));
      double bestnew = 0.0;
      for (std::size_t j = before; j < columns_.size(); ++j) {
        const double rc = reduced_cost(j, y);
        if (rc < bestnew) {
          bestnew = rc;
          entering = j;
          from_pricer = true;
        }
      }
    }
    if (entering == columns_.size()) {
      if (since_refactor_ > 0) {
        refactor();
        continue;
      }
      if (phase_one_) {
        if (infeasibility() > 1e-9 * rhs_scale * static_cast<double>(std::max<std::size_t>(m, 1)) + perturbation_) {
          status = LpStatus::Infeasible;
          return false;
        }
        phase_one_ = false;
        degenerate = 0;
        continue;
      }
      status = LpStatus::Optimal;
      return false;
    }

    const Eigen::VectorXd u = direction({false, entering});
    const double ptol = std::max(kPivotTol, kRelativePivotTol * u.cwiseAbs().maxCoeff());
    std::size_t leave = m;
    double ratio = kInfinity;
    if (!phase_one_) {
      // artificials left over from phase one are fixed at zero
      double big = ptol;
      for (std::size_t i = 0; i < m; ++i) {
        const double ui = std::fabs(u(static_cast<Eigen::Index>(i)));
        if (basis_[i].artificial && ui > big) {
          big = ui;
          leave = i;
          ratio = 0.0;
        }
      }
    }
    if (leave == m && bland) {
      auto key = [&](std::size_t i) { return basis_[i].artificial ? basis_[i].index : m + basis_[i].index; };
      for (std::size_t i = 0; i < m; ++i) {
        const double ui = u(static_cast<Eigen::Index>(i));
        if (ui <= ptol) continue;
        const double r = std::max(0.0, xb_(static_cast<Eigen::Index>(i))) / ui;
        if (leave == m || r < ratio - 1e-12 || (r <= ratio + 1e-12 && key(i) < key(leave))) {
          leave = i;
          ratio = r;
        }
      }
    } else if (leave == m) {
      // Harris: relax the bounds to find the step limit, then take the
      // largest pivot among the rows that block within it
      double limit = kInfinity;
      for (std::size_t i = 0; i < m; ++i) {
        const double ui = u(static_cast<Eigen::Index>(i));
        if (ui > ptol) limit = std::min(limit, (std::max(0.0, xb_(static_cast<Eigen::Index>(i))) + kFeasTol) / ui);
      }
      double best_pivot = 0.0;
      for (std::size_t i = 0; i < m && std::isfinite(limit); ++i) {
        const double ui = u(static_cast<Eigen::Index>(i));
        if (ui <= ptol) continue;
        const double r = std::max(0.0, xb_(static_cast<Eigen::Index>(i))) / ui;
        if (r <= limit && ui > best_pivot) {
          best_pivot = ui;
          leave = i;
          ratio = r;
        }
      }
    }
    if (leave == m) {
      if (since_refactor_ > 0) {
        refactor();
        continue;
      }
      if (u.maxCoeff() <= 0.0) {
        status = LpStatus::Unbounded;
        return false;
      }
      // only tiny pivots available: skip the column rather than take them
      rejected.resize(columns_.size(), 0);
      rejected[entering] = 1;
      if (from_pricer) pricer_blocked = true;
      continue;
    }

    const auto r = static_cast<Eigen::Index>(leave);
    const double ur = u(r);
    const double theta = ratio;
    xb_ -= theta * u;
    xb_(r) = theta;
    const Eigen::RowVectorXd pivot_row = binv_.row(r) / ur;
    binv_.noalias() -= u * pivot_row;
    binv_.row(r) = pivot_row;
    if (!basis_[leave].artificial) basic_col_[basis_[leave].index] = 0;
    basis_[leave] = {false, entering};
    basic_col_[entering] = 1;
    ++iterations_;
    std::fill(rejected.begin(), rejected.end(), 0);
    pricer_blocked = false;
    degenerate = theta <= 1e-12 ? degenerate + 1 : 0;
    if (++since_refactor_ >= kRefactorEvery) refactor();
  }
}

double RevisedSimplex::objective() const {
  CompensatedSum s;
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (!basis_[i].artificial) s += columns_[basis_[i].index].cost * xb_(static_cast<Eigen::Index>(i));
  return s.value();
}

std::vector<double> RevisedSimplex::primal() const {
  std::vector<double> x(columns_.size(), 0.0);
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (!basis_[i].artificial) x[basis_[i].index] = std::max(0.0, xb_(static_cast<Eigen::Index>(i)));
  return x;
}

std::vector<double> RevisedSimplex::duals() const {
  const Eigen::VectorXd y = current_duals();
  return {y.data(), y.data() + y.size()};
}

double RevisedSimplex::infeasibility() const {
  double s = 0.0;
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (basis_[i].artificial) s += std::max(0.0, xb_(static_cast<Eigen::Index>(i)));
  return s;
}

}  // namespace hbl
