#include "synthctl/linprog.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "synthctl/errors.hpp"

namespace synthctl {

namespace {
constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-10;
}

LpResult solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& c, std::vector<int> basis, int max_iter) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (b.size() != m || c.size() != n || static_cast<int>(basis.size()) != m)
        throw ValidationError("inconsistent LP dimensions");
    if (max_iter <= 0) max_iter = 1000 + 20 * (m + std::min(n, 1000));

    std::vector<char> is_basic(static_cast<size_t>(n), 0);
    for (int idx : basis) is_basic[static_cast<size_t>(idx)] = 1;

    Eigen::MatrixXd basis_mat(m, m);
    auto refactor = [&]() {
        for (int i = 0; i < m; ++i) basis_mat.col(i) = A.col(basis[static_cast<size_t>(i)]);
        return Eigen::PartialPivLU<Eigen::MatrixXd>(basis_mat);
    };

    LpResult result;
    double last_objective = std::numeric_limits<double>::infinity();
    int stall = 0;
    bool bland = false;

    for (int iter = 1; iter <= max_iter; ++iter) {
        auto lu = refactor();
        Eigen::VectorXd xb = lu.solve(b);

        Eigen::VectorXd cb(m);
        for (int i = 0; i < m; ++i) cb(i) = c(basis[static_cast<size_t>(i)]);
        const double objective = cb.dot(xb);

        // Degeneracy watch: prolonged non-improvement flips pricing to
        // Bland's rule, which cannot cycle.
        if (objective < last_objective - 1e-13) {
            last_objective = objective;
            stall = 0;
        } else if (++stall > 2 * m + 10) {
            bland = true;
        }

        Eigen::VectorXd y = lu.transpose().solve(cb);

        int entering = -1;
        double best_cost = -kCostTol;
        for (int j = 0; j < n; ++j) {
            if (is_basic[static_cast<size_t>(j)]) continue;
            const double reduced = c(j) - y.dot(A.col(j));
            if (bland) {
                if (reduced < -kCostTol) { entering = j; break; }
            } else if (reduced < best_cost) {
                best_cost = reduced;
                entering = j;
            }
        }
        if (entering < 0) {
            result.status = LpResult::Status::optimal;
            result.x = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < m; ++i)
                result.x(basis[static_cast<size_t>(i)]) = std::max(xb(i), 0.0);
            result.objective = objective;
            result.iterations = iter - 1;
            return result;
        }

        Eigen::VectorXd direction = lu.solve(A.col(entering));
        int leaving = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < m; ++i) {
            if (direction(i) <= kPivotTol) continue;
            const double ratio = std::max(xb(i), 0.0) / direction(i);
            if (leaving < 0 || ratio < best_ratio - 1e-15 ||
                (std::abs(ratio - best_ratio) <= 1e-15 &&
                 basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leaving)])) {
                leaving = i;
                best_ratio = ratio;
            }
        }
        if (leaving < 0) {
            result.status = LpResult::Status::unbounded;
            result.iterations = iter;
            return result;
        }

        is_basic[static_cast<size_t>(basis[static_cast<size_t>(leaving)])] = 0;
        is_basic[static_cast<size_t>(entering)] = 1;
        basis[static_cast<size_t>(leaving)] = entering;
    }

    result.status = LpResult::Status::iteration_limit;
    result.iterations = max_iter;
    return result;
}

}  // namespace synthctl
