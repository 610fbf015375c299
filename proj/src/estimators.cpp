#include "synthctl/estimators.hpp"

#include <cmath>

#include "synthctl/errors.hpp"

namespace synthctl {

const char* method_name(Method m) {
    switch (m) {
        case Method::osc: return "osc";
        case Method::esc: return "esc";
        case Method::psc: return "psc";
        case Method::nsc: return "nsc";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "osc") return Method::osc;
    if (name == "esc") return Method::esc;
    if (name == "psc") return Method::psc;
    if (name == "nsc") return Method::nsc;
    throw ValidationError("unknown method '" + name + "' (expected osc|esc|psc|nsc)");
}

bool method_nonneg(Method m) { return m == Method::osc; }

bool method_distance_weighted_l1(Method m) {
    return m == Method::psc || m == Method::nsc;
}

bool method_has_l1(Method m) { return m != Method::osc; }

bool method_has_l2(Method m) { return m == Method::esc || m == Method::nsc; }

WeightVector fit_weights(const PanelData& panel, const MatchingMatrix& m,
                         Method method, const TuningParams& tuning,
                         const SolverOptions& opts) {
    if (m.z0.rows() != panel.n_donors())
        throw ValidationError("matching matrix donor count does not match the panel");

    SolverProblem problem;
    problem.z0 = m.z0;
    problem.z1 = m.z1;
    problem.nonneg = method_nonneg(method);
    problem.a = method_has_l1(method) ? tuning.a : 0.0;
    problem.b = method_has_l2(method) ? tuning.b : 0.0;
    problem.d = method_distance_weighted_l1(method)
        ? pairwise_distances(m)
        : Eigen::VectorXd::Ones(m.z0.rows());

    WeightVector wv;
    wv.diagnostics = solve(problem, opts);
    wv.w = wv.diagnostics.w;
    wv.method = method;
    wv.tuning = tuning;
    Eigen::VectorXd residual = m.z1 - m.z0.transpose() * wv.w;
    wv.pre_rmspe = std::sqrt(residual.squaredNorm() / residual.size());
    return wv;
}

Eigen::VectorXd synthetic_outcomes(const PanelData& panel, const WeightVector& wv) {
    if (wv.w.size() != panel.n_donors())
        throw ValidationError("weight vector length does not match the donor pool");
    const auto donors = panel.donor_indices();
    Eigen::VectorXd path = Eigen::VectorXd::Zero(panel.n_periods());
    for (size_t r = 0; r < donors.size(); ++r)
        path += wv.w(static_cast<Eigen::Index>(r)) *
                panel.outcomes.row(donors[r]).transpose();
    return path;
}

EffectEstimate estimate_effect(const PanelData& panel, const WeightVector& wv) {
    EffectEstimate e;
    e.periods = panel.time_labels;
    e.t0 = panel.t0;
    e.treated = panel.outcomes.row(panel.treated_index).transpose();
    e.synthetic = synthetic_outcomes(panel, wv);
    e.gap = e.treated - e.synthetic;
    return e;
}

PanelData backdate(const PanelData& panel, int new_t0) {
    if (new_t0 < 1 || new_t0 >= panel.t0)
        throw ValidationError("backdate requires 1 <= new_t0 < t0, got new_t0=" +
                              std::to_string(new_t0) + " with t0=" + std::to_string(panel.t0));
    PanelData out = panel;
    out.t0 = new_t0;
    return out;
}

std::vector<EffectEstimate> leave_one_out(const PanelData& panel,
                                          const ColumnSpec& spec, Method method,
                                          const TuningParams& tuning,
                                          bool standardize,
                                          const SolverOptions& opts) {
    if (panel.n_donors() < 2)
        throw ValidationError("leave-one-out needs at least 2 donors");
    std::vector<EffectEstimate> estimates;
    estimates.reserve(static_cast<size_t>(panel.n_donors()));
    for (int unit : panel.donor_indices()) {
        PanelData reduced = drop_unit(panel, unit);
        MatchingMatrix m = build_matching(reduced, spec, standardize);
        WeightVector wv = fit_weights(reduced, m, method, tuning, opts);
        estimates.push_back(estimate_effect(reduced, wv));
    }
    return estimates;
}

}  // namespace synthctl
