#pragma once

#include <Eigen/Core>

#include "synthctl/panel.hpp"

namespace synthctl {

// Penalized constrained least squares over donor weights:
//
//   min_w ||z1 - z0' w||^2 + a * sum_j d_j |w_j| + b * sum_j w_j^2
//   s.t.  sum_j w_j = 1,  and  w >= 0 when nonneg is set.
//
// d = ones gives the plain L1 penalty; a = b = 0 with nonneg gives the
// simplex-constrained least-squares program.
struct SolverProblem {
    Eigen::MatrixXd z0;  // J x L
    Eigen::VectorXd z1;  // L
    double a = 0.0;
    double b = 0.0;
    Eigen::VectorXd d;   // J, nonnegative L1 column multipliers
    bool nonneg = false;
};

struct SolverOptions {
    double tol = 1e-8;     // on max(primal, dual) residual
    int max_iter = 10000;
};

struct SolverResult {
    Eigen::VectorXd w;
    double objective = 0.0;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    bool unique = true;
    bool polished = false;  // exact support refit succeeded
};

// d_j = euclidean distance between z1 and donor row j.
Eigen::VectorXd pairwise_distances(const MatchingMatrix& m);
Eigen::VectorXd pairwise_distances(const Eigen::VectorXd& z1, const Eigen::MatrixXd& z0);

double solver_objective(const SolverProblem& p, const Eigen::VectorXd& w);

// Closed forms where they exist (a = 0 without the sign restriction,
// including the minimum-norm representative in the degenerate a = b = 0,
// J > L case); operator splitting with an exact support polish otherwise.
// Throws SolverError with residual diagnostics on non-convergence.
SolverResult solve(const SolverProblem& p, const SolverOptions& opts = {});

}  // namespace synthctl
