#pragma once

#include <Eigen/Core>

#include "synthctl/panel.hpp"

namespace synthctl {

enum class CvScheme { control_units, pretreatment_periods };

const char* cv_scheme_name(CvScheme s);

// Record of the eigenvalue map from normalized tuning (a*, b*) in [0,1]^2 to
// raw penalties (a, b). The spectrum is that of the donor Gram matrix
// z0 z0'; values below 1e-10 * lambda_max count as zero.
struct EigenScaling {
    Eigen::VectorXd gram_eigenvalues;  // all J eigenvalues, ascending
    int n = 0;          // positive eigenvalues available to the b map
    int shortfall = 0;  // min(J, L) minus the strictly positive count
    int b_index = 0;    // 1-based index into the positive tail; 0 when b* = 0
    int a_index = 0;    // 1-based index into the a spectrum; 0 when a* = 0
    int a_count = 0;    // size of the spectrum the a map indexes (n, or J when b > 0)
};

struct TuningParams {
    double a_star = 0.0;
    double b_star = 0.0;
    double a = 0.0;  // realized L1 strength
    double b = 0.0;  // realized L2 strength
    EigenScaling scaling;
    CvScheme scheme = CvScheme::control_units;
    double grid_step = 0.1;
};

// b = b* * lambda_ceil(n b*) over the positive Gram eigenvalues ascending;
// a = a* * lambda'_ceil(n' a*) over the spectrum of z0 z0' + b I, which has
// n' = J positive values when b > 0 and n' = n when b = 0.
TuningParams eigen_scale(const MatchingMatrix& m, double a_star, double b_star);

// Same map given a precomputed ascending eigenvalue list of z0 z0'.
TuningParams scale_from_eigenvalues(const Eigen::VectorXd& gram_eigenvalues,
                                    int n_cols, double a_star, double b_star);

// Ascending eigenvalues of z0 z0' (symmetric PSD).
Eigen::VectorXd gram_eigenvalues(const Eigen::MatrixXd& z0);

}  // namespace synthctl
