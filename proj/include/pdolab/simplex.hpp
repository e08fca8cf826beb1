// simplex.hpp — dense two-phase tableau simplex for small equality-form
// programs, used for convex-hull membership. Bland's rule throughout.

#pragma once

#include <Eigen/Dense>

#include <vector>

namespace pdolab {

struct LpResult {
  bool feasible = false;
  double objective = 0.0;       // phase-2 value (0 when only feasibility is asked)
  std::vector<double> x;
};

// Solves  min c.x  s.t.  A x = b, x >= 0. Pass an empty c for pure
// feasibility (phase 1 only). `tol` is the feasibility tolerance.
LpResult solve_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& c = Eigen::VectorXd(),
                  double tol = 1e-9);

}  // namespace pdolab
