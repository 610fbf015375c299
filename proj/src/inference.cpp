#include "synthctl/inference.hpp"

#include <cmath>
#include <limits>

#include "cv_folds.hpp"
#include "synthctl/errors.hpp"

namespace synthctl {

double rmspe(const Eigen::VectorXd& errors) {
    if (errors.size() == 0) throw ValidationError("rmspe of an empty error vector");
    return std::sqrt(errors.squaredNorm() / static_cast<double>(errors.size()));
}

// Wichura's algorithm AS241 (PPND16).
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw ValidationError("normal quantile requires p in (0,1)");
    const double q = p - 0.5;
    double r;
    if (std::abs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
            (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                  6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
              1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
            (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                  3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
              4.2313330701600911252e+1) * r + 1.0);
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        value =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -value : value;
}

PermutationResult permutation_test(const PanelData& panel, const ColumnSpec& spec,
                                   Method method, TuningPolicy policy,
                                   std::optional<TuningParams> tuning,
                                   CvScheme scheme, double grid_step,
                                   bool standardize, const SolverOptions& opts) {
    validate_panel(panel);
    const int n = panel.n_units();
    const int t0 = panel.t0;
    const int t_total = panel.n_periods();
    if (t0 >= t_total)
        throw ValidationError("permutation test needs a posttreatment period");

    if (policy == TuningPolicy::reuse && !tuning)
        tuning = select_tuning(panel, spec, method, scheme, grid_step, standardize, opts).first;

    PermutationResult result;
    result.records.resize(static_cast<size_t>(n));
    const double inf = std::numeric_limits<double>::infinity();

    for (int u = 0; u < n; ++u) {
        PlaceboRecord& rec = result.records[static_cast<size_t>(u)];
        rec.unit = panel.unit_ids[static_cast<size_t>(u)];
        PanelData pseudo = retarget_treated(panel, u);
        try {
            TuningParams tp = policy == TuningPolicy::reuse
                ? *tuning
                : select_tuning(pseudo, spec, method, scheme, grid_step, standardize, opts).first;
            MatchingMatrix m = build_matching(pseudo, spec, standardize);
            WeightVector wv = fit_weights(pseudo, m, method, tp, opts);
            EffectEstimate e = estimate_effect(pseudo, wv);
            rec.pre_rmspe = rmspe(e.gap.head(t0));
            rec.post_rmspe = rmspe(e.gap.tail(t_total - t0));
            // A perfect pretreatment fit sorts above every finite ratio.
            rec.ratio = rec.pre_rmspe > 0.0 ? rec.post_rmspe / rec.pre_rmspe : inf;
        } catch (const SolverError& err) {
            if (u == panel.treated_index) throw;
            rec.failed = true;
            rec.note = err.what();
            result.warnings.push_back("placebo fit failed for unit '" + rec.unit +
                                      "': " + err.what());
        }
    }

    const double treated_ratio =
        result.records[static_cast<size_t>(panel.treated_index)].ratio;
    int rank = 0, ranked = 0;
    for (const auto& rec : result.records) {
        if (rec.failed) continue;
        ++ranked;
        if (rec.ratio >= treated_ratio) ++rank;
    }
    result.treated_rank = rank;
    result.n_ranked = ranked;
    result.p_value = static_cast<double>(rank) / static_cast<double>(ranked);
    return result;
}

VarianceEstimate estimate_variance(const PanelData& panel, const ColumnSpec& spec,
                                   Method method, const TuningParams& tuning,
                                   bool standardize, const SolverOptions& opts) {
    auto folds = detail::build_donor_folds(panel, spec, standardize);
    VarianceEstimate v;
    v.donor_sq_errors =
        detail::donor_sq_error_matrix(folds, method, tuning.a_star, tuning.b_star, opts);
    v.variance = v.donor_sq_errors.colwise().mean().transpose();
    v.z_level = normal_quantile(0.975);
    return v;
}

EffectEstimate confidence_intervals(const EffectEstimate& e, const VarianceEstimate& v,
                                    double level) {
    if (!(level > 0.0 && level < 1.0))
        throw ValidationError("confidence level must lie in (0,1)");
    if (v.variance.size() != e.gap.size())
        throw ValidationError("variance length does not match the estimate window");
    EffectEstimate out = e;
    const double z = normal_quantile(0.5 * (1.0 + level));
    out.variance = v.variance;
    out.ci_lower = e.gap - z * v.variance.array().sqrt().matrix();
    out.ci_upper = e.gap + z * v.variance.array().sqrt().matrix();
    out.ci_level = level;
    return out;
}

}  // namespace synthctl
