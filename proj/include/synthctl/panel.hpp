#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace synthctl {

// Balanced outcome panel: N units observed over T periods, one treated unit,
// and a pretreatment cutoff t0 (the count of pretreatment periods, so the
// first treated period has index t0). Immutable by convention once built.
struct PanelData {
    std::vector<std::string> unit_ids;     // length N, unique
    std::vector<std::string> time_labels;  // length T, file order
    Eigen::MatrixXd outcomes;              // N x T
    std::optional<Eigen::MatrixXd> predictors;  // N x k
    std::vector<std::string> predictor_labels;  // length k
    int treated_index = 0;
    int t0 = 0;

    int n_units() const { return static_cast<int>(unit_ids.size()); }
    int n_periods() const { return static_cast<int>(time_labels.size()); }
    int n_donors() const { return n_units() - 1; }
    int n_predictors() const { return predictors ? static_cast<int>(predictors->cols()) : 0; }
    const std::string& treated_id() const { return unit_ids[treated_index]; }

    // Donor unit indices in panel order (everything but the treated unit).
    std::vector<int> donor_indices() const;
};

// The pretreatment cutoff can be given as a period count or as the label of
// the first treated period; label resolution fails loudly on absence.
using TreatmentTime = std::variant<int, std::string>;

PanelData make_panel(std::vector<std::string> unit_ids,
                     std::vector<std::string> time_labels,
                     Eigen::MatrixXd outcomes,
                     std::optional<Eigen::MatrixXd> predictors,
                     std::vector<std::string> predictor_labels,
                     const std::string& treated_id,
                     const TreatmentTime& treatment_time);

// Wide-layout CSV ingestion. Outcome header: "unit,<t1>,...,<tT>", one row
// per unit. Optional sibling predictor file: "unit,<p1>,...,<pk>" with the
// same unit set (any row order).
PanelData load_panel(const std::string& outcomes_path,
                     const std::optional<std::string>& predictors_path,
                     const std::string& treated_id,
                     const TreatmentTime& treatment_time);

void write_panel(const std::string& outcomes_path, const PanelData& panel,
                 const std::optional<std::string>& predictors_path = std::nullopt);

void validate_panel(const PanelData& panel);

// Drops one unit; treated_index is remapped. Used by robustness loops and
// cross-validation folds.
PanelData drop_unit(const PanelData& panel, int unit_index);

// Reassigns which unit is treated (placebo fits).
PanelData retarget_treated(const PanelData& panel, int unit_index);

// Which columns feed the matching matrix: predictors first, then
// pretreatment periods, in listed order.
struct ColumnSpec {
    std::vector<int> predictor_columns;
    std::vector<int> period_columns;  // each < panel.t0

    int size() const {
        return static_cast<int>(predictor_columns.size() + period_columns.size());
    }

    // Every predictor plus every pretreatment period.
    static ColumnSpec all_pretreatment(const PanelData& panel);
    // Pretreatment periods only.
    static ColumnSpec pretreatment_outcomes(const PanelData& panel);
};

struct MatchingMatrix {
    Eigen::VectorXd z1;  // L: treated unit's matching variables
    Eigen::MatrixXd z0;  // J x L: donors' matching variables, row j <-> donor j
    ColumnSpec column_spec;
    bool standardized = false;
};

// When standardize is set, each column is divided by its across-unit sample
// standard deviation (treated and donors pooled); zero-variance columns are
// rejected by name.
MatchingMatrix build_matching(const PanelData& panel, const ColumnSpec& spec,
                              bool standardize = false);

}  // namespace synthctl
