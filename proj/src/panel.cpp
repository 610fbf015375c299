#include "synthctl/panel.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "synthctl/csv.hpp"
#include "synthctl/errors.hpp"

namespace synthctl {

namespace {

int find_unit(const std::vector<std::string>& ids, const std::string& id) {
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) throw ValidationError("unknown unit id '" + id + "'");
    return static_cast<int>(it - ids.begin());
}

int resolve_t0(const std::vector<std::string>& time_labels, const TreatmentTime& time) {
    if (std::holds_alternative<int>(time)) return std::get<int>(time);
    const auto& label = std::get<std::string>(time);
    auto it = std::find(time_labels.begin(), time_labels.end(), label);
    if (it == time_labels.end())
        throw ValidationError("treatment period label '" + label + "' not found");
    // The label names the first treated period, so its index equals the
    // pretreatment count.
    return static_cast<int>(it - time_labels.begin());
}

}  // namespace

std::vector<int> PanelData::donor_indices() const {
    std::vector<int> idx;
    idx.reserve(static_cast<size_t>(n_donors()));
    for (int i = 0; i < n_units(); ++i)
        if (i != treated_index) idx.push_back(i);
    return idx;
}

void validate_panel(const PanelData& panel) {
    const int n = panel.n_units();
    const int t = panel.n_periods();
    if (n < 2) throw ValidationError("panel needs at least 2 units");
    if (panel.outcomes.rows() != n || panel.outcomes.cols() != t)
        throw ValidationError("outcome matrix shape does not match unit/period counts");
    if (panel.t0 < 1 || panel.t0 >= t)
        throw ValidationError("t0 must satisfy 1 <= t0 < T, got t0=" + std::to_string(panel.t0) +
                              " with T=" + std::to_string(t));
    if (panel.treated_index < 0 || panel.treated_index >= n)
        throw ValidationError("treated index out of range");
    std::unordered_set<std::string> seen;
    for (const auto& id : panel.unit_ids)
        if (!seen.insert(id).second) throw ValidationError("duplicate unit id '" + id + "'");
    if (!panel.outcomes.allFinite()) throw ValidationError("outcomes contain non-finite values");
    if (panel.predictors) {
        if (panel.predictors->rows() != n)
            throw ValidationError("predictor matrix row count does not match unit count");
        if (!panel.predictors->allFinite())
            throw ValidationError("predictors contain non-finite values");
        if (panel.predictor_labels.size() != static_cast<size_t>(panel.predictors->cols()))
            throw ValidationError("predictor label count does not match predictor columns");
    }
}

PanelData make_panel(std::vector<std::string> unit_ids,
                     std::vector<std::string> time_labels,
                     Eigen::MatrixXd outcomes,
                     std::optional<Eigen::MatrixXd> predictors,
                     std::vector<std::string> predictor_labels,
                     const std::string& treated_id,
                     const TreatmentTime& treatment_time) {
    PanelData panel;
    panel.unit_ids = std::move(unit_ids);
    panel.time_labels = std::move(time_labels);
    panel.outcomes = std::move(outcomes);
    panel.predictors = std::move(predictors);
    panel.predictor_labels = std::move(predictor_labels);
    panel.treated_index = find_unit(panel.unit_ids, treated_id);
    panel.t0 = resolve_t0(panel.time_labels, treatment_time);
    validate_panel(panel);
    return panel;
}

PanelData load_panel(const std::string& outcomes_path,
                     const std::optional<std::string>& predictors_path,
                     const std::string& treated_id,
                     const TreatmentTime& treatment_time) {
    CsvTable outcomes = read_unit_table(outcomes_path);

    std::optional<Eigen::MatrixXd> predictors;
    std::vector<std::string> predictor_labels;
    if (predictors_path) {
        CsvTable preds = read_unit_table(*predictors_path);
        if (preds.row_ids.size() != outcomes.row_ids.size())
            throw ValidationError(*predictors_path + ": unit count differs from the outcome file");
        // Accept any row order; align to the outcome file.
        std::unordered_map<std::string, Eigen::Index> pos;
        for (size_t i = 0; i < preds.row_ids.size(); ++i)
            pos[preds.row_ids[i]] = static_cast<Eigen::Index>(i);
        Eigen::MatrixXd aligned(preds.values.rows(), preds.values.cols());
        for (size_t i = 0; i < outcomes.row_ids.size(); ++i) {
            auto it = pos.find(outcomes.row_ids[i]);
            if (it == pos.end())
                throw ValidationError(*predictors_path + ": no predictor row for unit '" +
                                      outcomes.row_ids[i] + "'");
            aligned.row(static_cast<Eigen::Index>(i)) = preds.values.row(it->second);
        }
        predictors = std::move(aligned);
        predictor_labels = std::move(preds.column_labels);
    }

    return make_panel(std::move(outcomes.row_ids), std::move(outcomes.column_labels),
                      std::move(outcomes.values), std::move(predictors),
                      std::move(predictor_labels), treated_id, treatment_time);
}

void write_panel(const std::string& outcomes_path, const PanelData& panel,
                 const std::optional<std::string>& predictors_path) {
    CsvTable table;
    table.id_header = "unit";
    table.column_labels = panel.time_labels;
    table.row_ids = panel.unit_ids;
    table.values = panel.outcomes;
    write_unit_table(outcomes_path, table);

    if (predictors_path) {
        if (!panel.predictors)
            throw ValidationError("panel has no predictors to write");
        CsvTable preds;
        preds.id_header = "unit";
        preds.column_labels = panel.predictor_labels;
        preds.row_ids = panel.unit_ids;
        preds.values = *panel.predictors;
        write_unit_table(*predictors_path, preds);
    }
}

PanelData drop_unit(const PanelData& panel, int unit_index) {
    if (unit_index < 0 || unit_index >= panel.n_units())
        throw ValidationError("drop_unit: index out of range");
    if (unit_index == panel.treated_index)
        throw ValidationError("drop_unit: cannot drop the treated unit");
    PanelData out;
    out.time_labels = panel.time_labels;
    out.predictor_labels = panel.predictor_labels;
    out.t0 = panel.t0;
    const int n = panel.n_units();
    out.unit_ids.reserve(static_cast<size_t>(n - 1));
    out.outcomes.resize(n - 1, panel.outcomes.cols());
    if (panel.predictors) out.predictors = Eigen::MatrixXd(n - 1, panel.predictors->cols());
    int r = 0;
    for (int i = 0; i < n; ++i) {
        if (i == unit_index) continue;
        out.unit_ids.push_back(panel.unit_ids[static_cast<size_t>(i)]);
        out.outcomes.row(r) = panel.outcomes.row(i);
        if (panel.predictors) out.predictors->row(r) = panel.predictors->row(i);
        if (i == panel.treated_index) out.treated_index = r;
        ++r;
    }
    return out;
}

PanelData retarget_treated(const PanelData& panel, int unit_index) {
    if (unit_index < 0 || unit_index >= panel.n_units())
        throw ValidationError("retarget_treated: index out of range");
    PanelData out = panel;
    out.treated_index = unit_index;
    return out;
}

ColumnSpec ColumnSpec::all_pretreatment(const PanelData& panel) {
    ColumnSpec spec;
    for (int p = 0; p < panel.n_predictors(); ++p) spec.predictor_columns.push_back(p);
    for (int t = 0; t < panel.t0; ++t) spec.period_columns.push_back(t);
    return spec;
}

ColumnSpec ColumnSpec::pretreatment_outcomes(const PanelData& panel) {
    ColumnSpec spec;
    for (int t = 0; t < panel.t0; ++t) spec.period_columns.push_back(t);
    return spec;
}

MatchingMatrix build_matching(const PanelData& panel, const ColumnSpec& spec,
                              bool standardize) {
    validate_panel(panel);
    const int l = spec.size();
    if (l < 1) throw ValidationError("matching selection is empty");
    for (int p : spec.predictor_columns)
        if (p < 0 || p >= panel.n_predictors())
            throw ValidationError("matching predictor column " + std::to_string(p) +
                                  " does not exist");
    for (int t : spec.period_columns)
        if (t < 0 || t >= panel.t0)
            throw ValidationError("matching period index " + std::to_string(t) +
                                  " is not pretreatment (t0=" + std::to_string(panel.t0) + ")");

    const auto donors = panel.donor_indices();
    const int j = static_cast<int>(donors.size());

    MatchingMatrix m;
    m.column_spec = spec;
    m.z1.resize(l);
    m.z0.resize(j, l);

    int col = 0;
    auto fill_column = [&](auto getter) {
        m.z1(col) = getter(panel.treated_index);
        for (int row = 0; row < j; ++row) m.z0(row, col) = getter(donors[static_cast<size_t>(row)]);
        ++col;
    };
    for (int p : spec.predictor_columns)
        fill_column([&](int unit) { return (*panel.predictors)(unit, p); });
    for (int t : spec.period_columns)
        fill_column([&](int unit) { return panel.outcomes(unit, t); });

    if (standardize) {
        const int n = j + 1;
        for (int c = 0; c < l; ++c) {
            double mean = (m.z1(c) + m.z0.col(c).sum()) / n;
            double ss = (m.z1(c) - mean) * (m.z1(c) - mean) +
                        (m.z0.col(c).array() - mean).square().sum();
            double sd = std::sqrt(ss / (n - 1));
            if (!(sd > 0.0)) {
                std::string name = c < static_cast<int>(spec.predictor_columns.size())
                    ? "predictor " + panel.predictor_labels[static_cast<size_t>(
                          spec.predictor_columns[static_cast<size_t>(c)])]
                    : "period " + panel.time_labels[static_cast<size_t>(
                          spec.period_columns[static_cast<size_t>(c) - spec.predictor_columns.size()])];
                throw ValidationError("cannot standardize zero-variance column (" + name + ")");
            }
            m.z1(c) /= sd;
            m.z0.col(c) /= sd;
        }
        m.standardized = true;
    }
    return m;
}

}  // namespace synthctl
