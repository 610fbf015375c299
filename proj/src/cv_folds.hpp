#pragma once

// Internal: leave-one-donor-out fold machinery shared by cross-validation,
// the donor-prediction variance estimate, and the simulation harness.

#include <vector>

#include <Eigen/Core>

#include "synthctl/estimators.hpp"
#include "synthctl/panel.hpp"
#include "synthctl/scaling.hpp"
#include "synthctl/solver.hpp"

namespace synthctl::detail {

struct DonorFold {
    int donor_unit = 0;              // index into the original panel
    Eigen::MatrixXd z0;              // pool matching rows, (J-1) x L
    Eigen::VectorXd z1;              // pseudo-treated matching vector
    Eigen::VectorXd gram_eigs;       // ascending eigenvalues of z0 z0'
    Eigen::VectorXd d;               // pairwise distances within the fold
    Eigen::MatrixXd pool_outcomes;   // (J-1) x T, rows aligned with z0
    Eigen::VectorXd target_outcomes; // T
};

// One fold per donor: the donor becomes pseudo-treated, the pool is the
// remaining donors, and the actual treated unit is excluded throughout.
std::vector<DonorFold> build_donor_folds(const PanelData& panel, const ColumnSpec& spec,
                                         bool standardize);

// Realizes (a, b) from the fold's own spectrum and solves the method's
// weight program.
Eigen::VectorXd fold_solve(const DonorFold& fold, Method method, double a_star,
                           double b_star, const SolverOptions& opts);

// Mean squared posttreatment prediction error over folds.
double control_units_mse(const std::vector<DonorFold>& folds, int t0, Method method,
                         double a_star, double b_star, const SolverOptions& opts);

// Per-fold squared prediction errors over the whole window, J x T.
Eigen::MatrixXd donor_sq_error_matrix(const std::vector<DonorFold>& folds, Method method,
                                      double a_star, double b_star,
                                      const SolverOptions& opts);

}  // namespace synthctl::detail
