#include "synthctl/tuning.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "cv_folds.hpp"
#include "synthctl/errors.hpp"

namespace synthctl {

namespace detail {

std::vector<DonorFold> build_donor_folds(const PanelData& panel, const ColumnSpec& spec,
                                         bool standardize) {
    if (panel.n_donors() < 2)
        throw ValidationError("donor cross-validation needs at least 2 donors");
    std::vector<DonorFold> folds;
    folds.reserve(static_cast<size_t>(panel.n_donors()));
    for (int unit : panel.donor_indices()) {
        // Reassign treatment to the donor, then drop the real treated unit.
        PanelData pseudo = drop_unit(retarget_treated(panel, unit), panel.treated_index);
        MatchingMatrix m = build_matching(pseudo, spec, standardize);
        DonorFold fold;
        fold.donor_unit = unit;
        fold.z0 = std::move(m.z0);
        fold.z1 = std::move(m.z1);
        fold.gram_eigs = gram_eigenvalues(fold.z0);
        fold.d = pairwise_distances(fold.z1, fold.z0);
        fold.target_outcomes = pseudo.outcomes.row(pseudo.treated_index).transpose();
        const auto pool = pseudo.donor_indices();
        fold.pool_outcomes.resize(static_cast<Eigen::Index>(pool.size()),
                                  pseudo.outcomes.cols());
        for (size_t r = 0; r < pool.size(); ++r)
            fold.pool_outcomes.row(static_cast<Eigen::Index>(r)) =
                pseudo.outcomes.row(pool[r]);
        folds.push_back(std::move(fold));
    }
    return folds;
}

Eigen::VectorXd fold_solve(const DonorFold& fold, Method method, double a_star,
                           double b_star, const SolverOptions& opts) {
    TuningParams tp = scale_from_eigenvalues(fold.gram_eigs,
                                             static_cast<int>(fold.z0.cols()),
                                             a_star, b_star);
    SolverProblem problem;
    problem.z0 = fold.z0;
    problem.z1 = fold.z1;
    problem.nonneg = method_nonneg(method);
    problem.a = method_has_l1(method) ? tp.a : 0.0;
    problem.b = method_has_l2(method) ? tp.b : 0.0;
    problem.d = method_distance_weighted_l1(method)
        ? fold.d
        : Eigen::VectorXd::Ones(fold.z0.rows());
    return solve(problem, opts).w;
}

double control_units_mse(const std::vector<DonorFold>& folds, int t0, Method method,
                         double a_star, double b_star, const SolverOptions& opts) {
    double sum = 0.0;
    Eigen::Index count = 0;
    for (const auto& fold : folds) {
        Eigen::VectorXd w = fold_solve(fold, method, a_star, b_star, opts);
        const Eigen::Index t_total = fold.target_outcomes.size();
        for (Eigen::Index t = t0; t < t_total; ++t) {
            const double pred = fold.pool_outcomes.col(t).dot(w);
            const double err = fold.target_outcomes(t) - pred;
            sum += err * err;
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

Eigen::MatrixXd donor_sq_error_matrix(const std::vector<DonorFold>& folds, Method method,
                                      double a_star, double b_star,
                                      const SolverOptions& opts) {
    const Eigen::Index t_total = folds.front().target_outcomes.size();
    Eigen::MatrixXd sq(static_cast<Eigen::Index>(folds.size()), t_total);
    for (size_t i = 0; i < folds.size(); ++i) {
        Eigen::VectorXd w = fold_solve(folds[i], method, a_star, b_star, opts);
        for (Eigen::Index t = 0; t < t_total; ++t) {
            const double err =
                folds[i].target_outcomes(t) - folds[i].pool_outcomes.col(t).dot(w);
            sq(static_cast<Eigen::Index>(i), t) = err * err;
        }
    }
    return sq;
}

}  // namespace detail

namespace {

// Leave-one-period-out folds share the full matching matrix: column
// standardization is per-column, so removing a column leaves the others
// unchanged.
struct PeriodFold {
    Eigen::MatrixXd z0;
    Eigen::VectorXd z1;
    Eigen::VectorXd gram_eigs;
    Eigen::VectorXd d;
    Eigen::VectorXd pool_at_s;  // donor outcomes at the held-out period
    double target_at_s = 0.0;
};

std::vector<PeriodFold> build_period_folds(const PanelData& panel, const ColumnSpec& spec,
                                           bool standardize) {
    if (panel.t0 < 2)
        throw ValidationError("pretreatment cross-validation needs t0 >= 2");
    if (spec.period_columns.size() < 2)
        throw ValidationError("pretreatment cross-validation needs at least 2 matched periods");
    MatchingMatrix full = build_matching(panel, spec, standardize);
    const int n_pred = static_cast<int>(spec.predictor_columns.size());
    const int l = spec.size();
    const auto donors = panel.donor_indices();

    std::vector<PeriodFold> folds;
    folds.reserve(spec.period_columns.size());
    for (size_t s = 0; s < spec.period_columns.size(); ++s) {
        const int drop_col = n_pred + static_cast<int>(s);
        PeriodFold fold;
        fold.z0.resize(full.z0.rows(), l - 1);
        fold.z1.resize(l - 1);
        int c_out = 0;
        for (int c = 0; c < l; ++c) {
            if (c == drop_col) continue;
            fold.z0.col(c_out) = full.z0.col(c);
            fold.z1(c_out) = full.z1(c);
            ++c_out;
        }
        fold.gram_eigs = gram_eigenvalues(fold.z0);
        fold.d = pairwise_distances(fold.z1, fold.z0);
        const int period = spec.period_columns[s];
        fold.target_at_s = panel.outcomes(panel.treated_index, period);
        fold.pool_at_s.resize(static_cast<Eigen::Index>(donors.size()));
        for (size_t r = 0; r < donors.size(); ++r)
            fold.pool_at_s(static_cast<Eigen::Index>(r)) = panel.outcomes(donors[r], period);
        folds.push_back(std::move(fold));
    }
    return folds;
}

double period_folds_mse(const std::vector<PeriodFold>& folds, Method method,
                        double a_star, double b_star, const SolverOptions& opts) {
    double sum = 0.0;
    for (const auto& fold : folds) {
        TuningParams tp = scale_from_eigenvalues(fold.gram_eigs,
                                                 static_cast<int>(fold.z0.cols()),
                                                 a_star, b_star);
        SolverProblem problem;
        problem.z0 = fold.z0;
        problem.z1 = fold.z1;
        problem.nonneg = method_nonneg(method);
        problem.a = method_has_l1(method) ? tp.a : 0.0;
        problem.b = method_has_l2(method) ? tp.b : 0.0;
        problem.d = method_distance_weighted_l1(method)
            ? fold.d
            : Eigen::VectorXd::Ones(fold.z0.rows());
        Eigen::VectorXd w = solve(problem, opts).w;
        const double err = fold.target_at_s - fold.pool_at_s.dot(w);
        sum += err * err;
    }
    return sum / static_cast<double>(folds.size());
}

}  // namespace

double cv_control_units(const PanelData& panel, const ColumnSpec& spec,
                        Method method, double a_star, double b_star,
                        bool standardize, const SolverOptions& opts) {
    auto folds = detail::build_donor_folds(panel, spec, standardize);
    if (panel.t0 >= panel.n_periods())
        throw ValidationError("donor cross-validation needs a posttreatment period");
    return detail::control_units_mse(folds, panel.t0, method, a_star, b_star, opts);
}

double cv_pretreatment(const PanelData& panel, const ColumnSpec& spec,
                       Method method, double a_star, double b_star,
                       bool standardize, const SolverOptions& opts) {
    auto folds = build_period_folds(panel, spec, standardize);
    return period_folds_mse(folds, method, a_star, b_star, opts);
}

std::pair<TuningParams, CvSurface> select_tuning(const PanelData& panel,
                                                 const ColumnSpec& spec,
                                                 Method method, CvScheme scheme,
                                                 double grid_step, bool standardize,
                                                 const SolverOptions& opts) {
    const int n_steps = static_cast<int>(std::lround(1.0 / grid_step));
    if (n_steps < 1 || std::abs(n_steps * grid_step - 1.0) > 1e-9)
        throw ValidationError("grid step must divide 1 evenly");

    MatchingMatrix full = build_matching(panel, spec, standardize);

    CvSurface surface;
    auto realize = [&](double a_star, double b_star) {
        TuningParams tp = eigen_scale(full, a_star, b_star);
        tp.scheme = scheme;
        tp.grid_step = grid_step;
        return tp;
    };

    if (!method_has_l1(method) && !method_has_l2(method)) {
        // No tunable axis; nothing to search.
        surface.best_mse = 0.0;
        return {realize(0.0, 0.0), surface};
    }

    // Grid evaluations are cached by index pair; the coordinate search
    // revisits points freely.
    std::vector<detail::DonorFold> donor_folds;
    std::vector<PeriodFold> period_folds;
    if (scheme == CvScheme::control_units) {
        donor_folds = detail::build_donor_folds(panel, spec, standardize);
        if (panel.t0 >= panel.n_periods())
            throw ValidationError("donor cross-validation needs a posttreatment period");
    } else {
        period_folds = build_period_folds(panel, spec, standardize);
    }

    std::map<std::pair<int, int>, double> cache;
    auto value_at = [&](int ai, int bi) {
        auto key = std::make_pair(ai, bi);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        const double a_star = static_cast<double>(ai) / n_steps;
        const double b_star = static_cast<double>(bi) / n_steps;
        const double mse = scheme == CvScheme::control_units
            ? detail::control_units_mse(donor_folds, panel.t0, method, a_star, b_star, opts)
            : period_folds_mse(period_folds, method, a_star, b_star, opts);
        cache.emplace(key, mse);
        surface.evaluations.push_back({a_star, b_star, mse});
        return mse;
    };

    const bool tune_a = method_has_l1(method);
    const bool tune_b = method_has_l2(method);
    int ai = 0, bi = 0;
    double current = value_at(ai, bi);
    surface.converged = false;
    // Axis scan: argmin over the whole grid line; strict comparison makes
    // ties resolve toward the smaller parameter.
    auto scan = [&](bool scan_a, int round) {
        int best = -1;
        double best_val = 0.0;
        for (int cand = 0; cand <= n_steps; ++cand) {
            const double val = scan_a ? value_at(cand, bi) : value_at(ai, cand);
            if (best < 0 || val < best_val) {
                best = cand;
                best_val = val;
            }
        }
        (scan_a ? ai : bi) = best;
        current = best_val;
        surface.trace.push_back({round, scan_a ? 'a' : 'b',
                                 static_cast<double>(ai) / n_steps,
                                 static_cast<double>(bi) / n_steps, current});
    };
    for (int round = 1; round <= 20; ++round) {
        const int ai_before = ai, bi_before = bi;
        if (tune_a) scan(true, round);
        if (tune_b) scan(false, round);
        surface.rounds = round;
        if (ai == ai_before && bi == bi_before) {
            surface.converged = true;
            break;
        }
    }

    surface.best_a_star = static_cast<double>(ai) / n_steps;
    surface.best_b_star = static_cast<double>(bi) / n_steps;
    surface.best_mse = current;
    return {realize(surface.best_a_star, surface.best_b_star), surface};
}

}  // namespace synthctl
