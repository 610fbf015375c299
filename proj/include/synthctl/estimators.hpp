#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "synthctl/panel.hpp"
#include "synthctl/scaling.hpp"
#include "synthctl/solver.hpp"

namespace synthctl {

// The four weight programs. osc: simplex-constrained least squares, no
// penalties. esc: unrestricted signs, unweighted L1 + L2. psc: unrestricted
// signs, distance-weighted L1, no L2. nsc: unrestricted signs,
// distance-weighted L1 + L2.
enum class Method { osc, esc, psc, nsc };

const char* method_name(Method m);
Method method_from_name(const std::string& name);
bool method_nonneg(Method m);
bool method_distance_weighted_l1(Method m);
bool method_has_l1(Method m);
bool method_has_l2(Method m);

struct WeightVector {
    Eigen::VectorXd w;  // J, donor order
    Method method = Method::nsc;
    TuningParams tuning;
    // RMSPE of the matching residual z1 - z0' w, on the matrix as built.
    double pre_rmspe = 0.0;
    SolverResult diagnostics;
};

struct EffectEstimate {
    std::vector<std::string> periods;  // T labels
    Eigen::VectorXd treated;           // T
    Eigen::VectorXd synthetic;         // T
    Eigen::VectorXd gap;               // T, treated - synthetic
    int t0 = 0;
    // Empty until inference runs.
    Eigen::VectorXd variance;
    Eigen::VectorXd ci_lower;
    Eigen::VectorXd ci_upper;
    double ci_level = 0.0;

    bool has_intervals() const { return ci_lower.size() > 0; }
};

// Solves the method's weight program at the realized penalties in `tuning`.
WeightVector fit_weights(const PanelData& panel, const MatchingMatrix& m,
                         Method method, const TuningParams& tuning,
                         const SolverOptions& opts = {});

// Weighted donor outcome path over the whole window.
Eigen::VectorXd synthetic_outcomes(const PanelData& panel, const WeightVector& w);

EffectEstimate estimate_effect(const PanelData& panel, const WeightVector& w);

// Same panel with an earlier treatment marker; requires 1 <= new_t0 < t0.
PanelData backdate(const PanelData& panel, int new_t0);

// One refit per excluded donor, realized penalties re-used as given.
std::vector<EffectEstimate> leave_one_out(const PanelData& panel,
                                          const ColumnSpec& spec, Method method,
                                          const TuningParams& tuning,
                                          bool standardize = false,
                                          const SolverOptions& opts = {});

}  // namespace synthctl
