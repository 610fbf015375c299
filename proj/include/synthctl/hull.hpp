#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace synthctl {

struct HullQuery {
    Eigen::VectorXd z1;  // L
    Eigen::MatrixXd z0;  // J x L, donor rows
    double tol = 1e-7;   // on the phase-1 objective
};

struct HullResult {
    bool inside = false;
    double objective = 0.0;      // optimal total slack (L1 gap to the hull)
    Eigen::VectorXd weights;     // J, convex certificate when inside
    Eigen::VectorXd residual;    // L, z1 - z0' w at the optimum
    int iterations = 0;
};

// Phase-1 feasibility LP: minimize sum(s+ + s-) subject to
// z0' w + s+ - s- = z1, sum(w) = 1, w, s+, s- >= 0. Membership iff the
// optimum is <= tol.
HullResult in_convex_hull(const HullQuery& q);

// Smallest prefix m of the donor rows whose hull contains z1, found by
// doubling then binary search; nullopt when even all rows fail.
std::optional<int> minimal_hull_prefix(const Eigen::VectorXd& z1,
                                       const Eigen::MatrixXd& donors,
                                       double tol = 1e-7);

struct HullExperimentConfig {
    int n_samples = 100;
    int max_controls = 10000;
    std::vector<int> t0_list = {1, 2, 3, 4, 5};
    std::uint64_t seed = 0;
    double tol = 1e-7;
};

struct HullExperimentRow {
    int t0 = 0;                       // matched pretreatment periods
    double median_min_controls = 0.0; // censored samples count as max_controls
    double censored_fraction = 0.0;
};

// Donor outcomes are drawn from the simulation DGP (linear transform) and
// the treated level is calibrated to the donor mean in period 1; per sample
// the donor order is shuffled once and the minimal hull prefix recorded for
// each matched-period count.
std::vector<HullExperimentRow> hull_sample_experiment(const HullExperimentConfig& config);

std::string hull_experiment_csv(const std::vector<HullExperimentRow>& rows);

}  // namespace synthctl
