#include "synthctl/scaling.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "synthctl/errors.hpp"

namespace synthctl {

namespace {

// Ceiling index into a spectrum of size n, 1-based. The tiny downward nudge
// keeps grid values like 0.2 * 5 from landing just above an integer.
int ceil_index(int n, double star) {
    int idx = static_cast<int>(std::ceil(static_cast<double>(n) * star - 1e-9));
    if (idx < 1) idx = 1;
    if (idx > n) idx = n;
    return idx;
}

}  // namespace

const char* cv_scheme_name(CvScheme s) {
    return s == CvScheme::control_units ? "control_units" : "pretreatment_periods";
}

Eigen::VectorXd gram_eigenvalues(const Eigen::MatrixXd& z0) {
    Eigen::MatrixXd gram = z0 * z0.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

TuningParams scale_from_eigenvalues(const Eigen::VectorXd& eigs, int n_cols,
                                    double a_star, double b_star) {
    if (!(a_star >= 0.0 && a_star <= 1.0) || !(b_star >= 0.0 && b_star <= 1.0))
        throw ValidationError("normalized tuning parameters must lie in [0,1]");
    const int j = static_cast<int>(eigs.size());
    if (j < 1) throw ValidationError("empty eigenvalue list");

    TuningParams tp;
    tp.a_star = a_star;
    tp.b_star = b_star;
    tp.scaling.gram_eigenvalues = eigs;

    const double lambda_max = std::max(eigs(j - 1), 0.0);
    const double cutoff = 1e-10 * lambda_max;
    int n_pos = 0;
    for (int i = 0; i < j; ++i)
        if (eigs(i) > cutoff) ++n_pos;

    const int n_expected = std::min(j, n_cols);
    const int n = std::min(n_expected, n_pos);
    tp.scaling.n = n;
    tp.scaling.shortfall = n_expected - n;

    // Positive eigenvalues are the ascending tail eigs[j-n .. j-1].
    if (b_star > 0.0 && n > 0) {
        tp.scaling.b_index = ceil_index(n, b_star);
        tp.b = b_star * eigs(j - n + tp.scaling.b_index - 1);
    }

    if (a_star > 0.0) {
        if (tp.b > 0.0) {
            // The shifted Gram z0 z0' + b I has all j eigenvalues positive.
            tp.scaling.a_count = j;
            tp.scaling.a_index = ceil_index(j, a_star);
            tp.a = a_star * (eigs(tp.scaling.a_index - 1) + tp.b);
        } else if (n > 0) {
            tp.scaling.a_count = n;
            tp.scaling.a_index = ceil_index(n, a_star);
            tp.a = a_star * eigs(j - n + tp.scaling.a_index - 1);
        }
    }
    return tp;
}

TuningParams eigen_scale(const MatchingMatrix& m, double a_star, double b_star) {
    return scale_from_eigenvalues(gram_eigenvalues(m.z0),
                                  static_cast<int>(m.z0.cols()), a_star, b_star);
}

}  // namespace synthctl
