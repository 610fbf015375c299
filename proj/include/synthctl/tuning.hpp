#pragma once

#include <utility>
#include <vector>

#include "synthctl/estimators.hpp"

namespace synthctl {

struct CvPoint {
    double a_star = 0.0;
    double b_star = 0.0;
    double mse = 0.0;
};

struct CvStep {
    int round = 0;
    char axis = 'a';
    double a_star = 0.0;
    double b_star = 0.0;
    double mse = 0.0;
};

struct CvSurface {
    std::vector<CvPoint> evaluations;  // unique grid points, evaluation order
    std::vector<CvStep> trace;         // chosen point after each axis scan
    double best_a_star = 0.0;
    double best_b_star = 0.0;
    double best_mse = 0.0;
    int rounds = 0;
    bool converged = true;
};

// Leave-one-donor-out prediction error: each donor in turn is treated as
// pseudo-treated, its synthetic control built from the remaining donors (the
// actual treated unit excluded), and its posttreatment outcomes predicted.
// Returns the mean squared prediction error over donors and posttreatment
// periods.
double cv_control_units(const PanelData& panel, const ColumnSpec& spec,
                        Method method, double a_star, double b_star,
                        bool standardize = false, const SolverOptions& opts = {});

// Leave-one-period-out over the matched pretreatment periods: weights are
// fit without period s and used to predict the treated outcome at s.
double cv_pretreatment(const PanelData& panel, const ColumnSpec& spec,
                       Method method, double a_star, double b_star,
                       bool standardize = false, const SolverOptions& opts = {});

// Iterative coordinate search on the unit grid: starting from b* = 0, scan
// a*, then b*, repeating until the pair is stable (ties break toward the
// smaller value). Methods without a tunable axis skip it: osc returns (0,0)
// without search, psc pins b* = 0. Realized penalties in the returned
// TuningParams come from the treated unit's matching matrix.
std::pair<TuningParams, CvSurface> select_tuning(const PanelData& panel,
                                                 const ColumnSpec& spec,
                                                 Method method,
                                                 CvScheme scheme = CvScheme::control_units,
                                                 double grid_step = 0.1,
                                                 bool standardize = false,
                                                 const SolverOptions& opts = {});

}  // namespace synthctl
