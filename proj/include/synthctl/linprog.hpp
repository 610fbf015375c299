#pragma once

#include <vector>

#include <Eigen/Core>

namespace synthctl {

// Dense primal simplex for standard-form problems
//   min c'x  s.t.  A x = b,  x >= 0,
// starting from a caller-supplied feasible basis. Dantzig pricing with a
// Bland fallback after a degeneracy stall, so cycling terminates.
struct LpResult {
    enum class Status { optimal, unbounded, iteration_limit };
    Status status = Status::optimal;
    Eigen::VectorXd x;
    double objective = 0.0;
    int iterations = 0;
};

LpResult solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& c, std::vector<int> basis,
                  int max_iter = 0);

}  // namespace synthctl
