#pragma once

#include <optional>
#include <string>
#include <vector>

#include "synthctl/tuning.hpp"

namespace synthctl {

// Root mean squared prediction error; errors must be nonempty.
double rmspe(const Eigen::VectorXd& errors);

// Inverse standard normal CDF (Wichura's AS241), |error| < 1e-13.
double normal_quantile(double p);

enum class TuningPolicy { reuse, reselect };

struct PlaceboRecord {
    std::string unit;
    double pre_rmspe = 0.0;
    double post_rmspe = 0.0;
    double ratio = 0.0;  // +inf when the pretreatment fit is exact
    bool failed = false;
    std::string note;
};

struct PermutationResult {
    std::vector<PlaceboRecord> records;  // one per unit, panel order
    int treated_rank = 0;                // 1 = largest ratio
    double p_value = 1.0;
    int n_ranked = 0;                    // units in the denominator
    std::vector<std::string> warnings;
};

// Reassigns treatment to every unit in turn (pool = all other units, the
// real treated one included) and ranks the post/pre RMSPE ratios. Under
// `reuse`, the realized penalties of `tuning` apply to every placebo fit;
// when absent they are selected once for the treated unit. Under `reselect`
// the grid search reruns per pseudo-treated unit. A failed placebo fit is
// flagged and drops out of the denominator.
PermutationResult permutation_test(const PanelData& panel, const ColumnSpec& spec,
                                   Method method, TuningPolicy policy,
                                   std::optional<TuningParams> tuning = std::nullopt,
                                   CvScheme scheme = CvScheme::control_units,
                                   double grid_step = 0.1,
                                   bool standardize = false,
                                   const SolverOptions& opts = {});

struct VarianceEstimate {
    Eigen::VectorXd variance;         // T, donor-mean squared prediction error
    Eigen::MatrixXd donor_sq_errors;  // J x T
    double z_level = 1.959964;
};

// Donor-prediction variance over the whole window: each donor is predicted
// by a synthetic control built from the other donors at the given tuning,
// and the squared errors are averaged per period.
VarianceEstimate estimate_variance(const PanelData& panel, const ColumnSpec& spec,
                                   Method method, const TuningParams& tuning,
                                   bool standardize = false,
                                   const SolverOptions& opts = {});

// gap_t +- z_(1+level)/2 * sqrt(variance_t) for every period.
EffectEstimate confidence_intervals(const EffectEstimate& e, const VarianceEstimate& v,
                                    double level = 0.95);

}  // namespace synthctl
