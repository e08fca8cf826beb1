#include "pdolab/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pdolab {

namespace {

// Standard tableau with explicit basis bookkeeping. Bland's rule: entering
// variable is the smallest index with a favorable reduced cost; the leaving
// row breaks ratio ties by smallest basic variable index.
class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol)
      : m_(static_cast<int>(a.rows())), n_(static_cast<int>(a.cols())), tol_(tol) {
    t_.resize(m_, n_ + m_ + 1);
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      double sign = b[i] < 0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = sign * a.row(i);
      t_.row(i).segment(n_, m_).setZero();
      t_(i, n_ + i) = 1.0;
      t_(i, n_ + m_) = sign * b[i];
      basis_[i] = n_ + i;
    }
  }

  // minimize the artificial sum; returns the attained value
  double phase1() {
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(n_ + m_);
    cost.segment(n_, m_).setOnes();
    run(cost);
    double v = 0.0;
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= n_) v += t_(i, n_ + m_);
    return v;
  }

  // pivot artificials out of the basis where possible, then minimize c
  double phase2(const Eigen::VectorXd& c) {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      for (int j = 0; j < n_; ++j)
        if (std::abs(t_(i, j)) > tol_) {
          pivot(i, j);
          break;
        }
    }
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(n_ + m_);
    cost.head(n_) = c;
    // forbid artificials from re-entering
    cost.segment(n_, m_).setConstant(std::numeric_limits<double>::infinity());
    run(cost);
    double v = 0.0;
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) v += c[basis_[i]] * t_(i, n_ + m_);
    return v;
  }

  std::vector<double> solution() const {
    std::vector<double> x(n_, 0.0);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) x[basis_[i]] = t_(i, n_ + m_);
    return x;
  }

 private:
  void run(const Eigen::VectorXd& cost) {
    const long max_iters = 2000L + 200L * (m_ + n_);
    for (long iter = 0; iter < max_iters; ++iter) {
      int enter = -1;
      for (int j = 0; j < n_ + m_; ++j) {
        if (std::isinf(cost[j])) continue;
        bool basic = false;
        for (int i = 0; i < m_; ++i)
          if (basis_[i] == j) { basic = true; break; }
        if (basic) continue;
        double reduced = cost[j];
        for (int i = 0; i < m_; ++i) reduced -= cost_of(cost, basis_[i]) * t_(i, j);
        if (reduced < -tol_) { enter = j; break; }  // Bland: first improving index
      }
      if (enter < 0) return;
      int leave = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (t_(i, enter) <= tol_) continue;
        double ratio = t_(i, n_ + m_) / t_(i, enter);
        if (leave < 0 || ratio < best_ratio - tol_ ||
            (std::abs(ratio - best_ratio) <= tol_ && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave < 0) throw std::runtime_error("simplex: unbounded direction");
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex: iteration limit reached");
  }

  static double cost_of(const Eigen::VectorXd& cost, int j) {
    return std::isinf(cost[j]) ? 0.0 : cost[j];
  }

  void pivot(int row, int col) {
    t_.row(row) /= t_(row, col);
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(row);
    }
    basis_[row] = col;
  }

  int m_, n_;
  double tol_;
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
};

}  // namespace

LpResult solve_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& c, double tol) {
  if (a.rows() != b.size()) throw std::invalid_argument("solve_lp: A and b differ");
  if (c.size() != 0 && c.size() != a.cols())
    throw std::invalid_argument("solve_lp: c size mismatch");

  Tableau t(a, b, tol);
  LpResult res;
  double art = t.phase1();
  if (art > tol) return res;  // infeasible
  res.feasible = true;
  if (c.size() != 0) res.objective = t.phase2(c);
  res.x = t.solution();
  return res;
}

}  // namespace pdolab
