#pragma once

// Test-only brute-force oracles, kept independent of the implementation
// paths they check.

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Core>

#include "synthctl/solver.hpp"

namespace oracles {

struct GridBest {
    Eigen::VectorXd w;
    double objective = std::numeric_limits<double>::infinity();
    bool interior = true;  // argmin strictly inside the search box
};

inline double objective_at(const synthctl::SolverProblem& p, const Eigen::VectorXd& w) {
    double fit = (p.z1 - p.z0.transpose() * w).squaredNorm();
    double l1 = 0.0, l2 = 0.0;
    for (Eigen::Index j = 0; j < w.size(); ++j) {
        l1 += p.d(j) * std::abs(w(j));
        l2 += w(j) * w(j);
    }
    return fit + p.a * l1 + p.b * l2;
}

// Dense grid over the constraint set for J <= 3: free coordinates stepped
// over [lo, hi] (the affine case) or over the simplex (the nonneg case).
inline GridBest grid_solve(const synthctl::SolverProblem& p, double step = 1e-3,
                           double lo = -3.0, double hi = 3.0) {
    const int j = static_cast<int>(p.z0.rows());
    GridBest best;
    if (j == 1) {
        best.w = Eigen::VectorXd::Ones(1);
        best.objective = objective_at(p, best.w);
        return best;
    }

    const double lo_eff = p.nonneg ? 0.0 : lo;
    const double hi_eff = p.nonneg ? 1.0 : hi;
    const int n_steps = static_cast<int>(std::lround((hi_eff - lo_eff) / step));

    if (j == 2) {
        Eigen::VectorXd w(2);
        int best_i = -1;
        for (int i = 0; i <= n_steps; ++i) {
            const double w1 = lo_eff + i * step;
            w(0) = w1;
            w(1) = 1.0 - w1;
            if (p.nonneg && w(1) < -1e-12) continue;
            const double val = objective_at(p, w);
            if (val < best.objective) {
                best.objective = val;
                best.w = w;
                best_i = i;
            }
        }
        best.interior = p.nonneg || (best_i > 0 && best_i < n_steps);
        return best;
    }

    // j == 3: flatten the residual algebra so the inner loop stays cheap.
    const Eigen::VectorXd r1 = p.z0.row(0), r2 = p.z0.row(1), r3 = p.z0.row(2);
    const Eigen::VectorXd base = p.z1 - r3;
    const Eigen::VectorXd col1 = r1 - r3, col2 = r2 - r3;
    const int l = static_cast<int>(p.z1.size());
    double best_w1 = 0.0, best_w2 = 0.0;
    int best_i = -1, best_k = -1;
    for (int i = 0; i <= n_steps; ++i) {
        const double w1 = lo_eff + i * step;
        const double c0 = base(0) - w1 * col1(0);
        const double c1 = l > 1 ? base(1) - w1 * col1(1) : 0.0;
        const double pen1 = p.a * p.d(0) * std::abs(w1) + p.b * w1 * w1;
        for (int k = 0; k <= n_steps; ++k) {
            const double w2 = lo_eff + k * step;
            const double w3 = 1.0 - w1 - w2;
            if (p.nonneg && w3 < -1e-12) break;  // w2 ascending, once negative stays so
            const double e0 = c0 - w2 * col2(0);
            const double e1 = l > 1 ? c1 - w2 * col2(1) : 0.0;
            const double val = e0 * e0 + e1 * e1 + pen1 +
                               p.a * (p.d(1) * std::abs(w2) + p.d(2) * std::abs(w3)) +
                               p.b * (w2 * w2 + w3 * w3);
            if (val < best.objective) {
                best.objective = val;
                best_w1 = w1;
                best_w2 = w2;
                best_i = i;
                best_k = k;
            }
        }
    }
    best.w.resize(3);
    best.w << best_w1, best_w2, 1.0 - best_w1 - best_w2;
    best.interior = p.nonneg ||
                    (best_i > 0 && best_i < n_steps && best_k > 0 && best_k < n_steps);
    return best;
}

// Minimum L1 distance between z1 and the donor hull over a simplex grid.
inline double hull_grid_gap(const Eigen::VectorXd& z1, const Eigen::MatrixXd& z0,
                            double step = 1e-2) {
    const int j = static_cast<int>(z0.rows());
    const int n_steps = static_cast<int>(std::lround(1.0 / step));
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd w(j);
    if (j == 1) {
        return (z1 - z0.row(0).transpose()).cwiseAbs().sum();
    }
    if (j == 2) {
        for (int i = 0; i <= n_steps; ++i) {
            w(0) = i * step;
            w(1) = 1.0 - w(0);
            best = std::min(best, (z1 - z0.transpose() * w).cwiseAbs().sum());
        }
        return best;
    }
    for (int i = 0; i <= n_steps; ++i) {
        for (int k = 0; i + k <= n_steps; ++k) {
            w(0) = i * step;
            w(1) = k * step;
            w(2) = 1.0 - w(0) - w(1);
            best = std::min(best, (z1 - z0.transpose() * w).cwiseAbs().sum());
        }
    }
    return best;
}

}  // namespace oracles
