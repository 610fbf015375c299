#include "synthctl/hull.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "synthctl/csv.hpp"
#include "synthctl/errors.hpp"
#include "synthctl/linprog.hpp"
#include "synthctl/simulation.hpp"

namespace synthctl {

HullResult in_convex_hull(const HullQuery& q) {
    const int j = static_cast<int>(q.z0.rows());
    const int l = static_cast<int>(q.z0.cols());
    if (j < 1 || l < 1) throw ValidationError("hull query needs J >= 1 and L >= 1");
    if (q.z1.size() != l) throw ValidationError("hull query z1 length does not match z0");

    // Variables: w (J) then s+ (L) then s- (L).
    const int n = j + 2 * l;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(l + 1, n);
    a.block(0, 0, l, j) = q.z0.transpose();
    a.block(0, j, l, l) = Eigen::MatrixXd::Identity(l, l);
    a.block(0, j + l, l, l) = -Eigen::MatrixXd::Identity(l, l);
    a.row(l).head(j).setOnes();

    Eigen::VectorXd b(l + 1);
    b.head(l) = q.z1;
    b(l) = 1.0;

    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    c.segment(j, 2 * l).setOnes();

    // Feasible start: all weight on donor 0, slacks absorbing the residual.
    std::vector<int> basis;
    basis.reserve(static_cast<size_t>(l + 1));
    Eigen::VectorXd residual0 = q.z1 - q.z0.row(0).transpose();
    for (int r = 0; r < l; ++r)
        basis.push_back(residual0(r) >= 0.0 ? j + r : j + l + r);
    basis.push_back(0);

    LpResult lp = solve_lp(a, b, c, std::move(basis));
    if (lp.status == LpResult::Status::iteration_limit)
        throw SolverError("hull membership LP hit the iteration limit", lp.iterations);
    if (lp.status == LpResult::Status::unbounded)
        throw SolverError("hull membership LP reported unbounded, which should be impossible",
                          lp.iterations);

    HullResult out;
    out.objective = lp.objective;
    out.inside = lp.objective <= q.tol;
    out.weights = lp.x.head(j);
    out.residual = q.z1 - q.z0.transpose() * out.weights;
    out.iterations = lp.iterations;
    return out;
}

std::optional<int> minimal_hull_prefix(const Eigen::VectorXd& z1,
                                       const Eigen::MatrixXd& donors, double tol) {
    const int total = static_cast<int>(donors.rows());
    if (total < 1) throw ValidationError("minimal_hull_prefix needs at least one donor");

    auto inside_at = [&](int m) {
        HullQuery q;
        q.z1 = z1;
        q.z0 = donors.topRows(m);
        q.tol = tol;
        return in_convex_hull(q).inside;
    };

    // Doubling until membership, then binary search on the boundary.
    int hi = 1;
    int lo = 0;
    while (true) {
        if (inside_at(hi)) break;
        lo = hi;
        if (hi == total) return std::nullopt;
        hi = std::min(2 * hi, total);
    }
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (inside_at(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

namespace {

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

std::vector<HullExperimentRow> hull_sample_experiment(const HullExperimentConfig& config) {
    if (config.n_samples < 1 || config.max_controls < 1 || config.t0_list.empty())
        throw ValidationError("hull experiment needs samples, controls, and a period list");
    const int p_max = *std::max_element(config.t0_list.begin(), config.t0_list.end());
    if (p_max < 1) throw ValidationError("hull experiment period counts must be positive");

    SimulationConfig dgp;
    dgp.n_controls = config.max_controls;
    dgp.t0 = p_max;
    dgp.t_post = 1;  // unused by the membership checks
    dgp.r = 1;

    std::vector<std::vector<double>> min_controls(config.t0_list.size());
    std::vector<int> censored(config.t0_list.size(), 0);

    for (int s = 0; s < config.n_samples; ++s) {
        const std::uint64_t param_seed = derive_seed(config.seed, 0x68756c6c, s, 0);
        const std::uint64_t shock_seed = derive_seed(config.seed, 0x68756c6c, s, 1);
        SimulatedSample sample = generate_sample(dgp, param_seed, shock_seed);
        const auto& outcomes = sample.panel.outcomes;

        // Calibrate the treated level to the donor mean in period 1.
        Eigen::VectorXd treated = outcomes.row(0).transpose();
        const double donor_mean = outcomes.col(0).tail(config.max_controls).mean();
        treated.array() += donor_mean - treated(0);

        Eigen::MatrixXd donors = outcomes.bottomRows(config.max_controls);
        std::vector<int> order(static_cast<size_t>(config.max_controls));
        std::iota(order.begin(), order.end(), 0);
        std::mt19937_64 rng(derive_seed(config.seed, 0x68756c6c, s, 2));
        std::shuffle(order.begin(), order.end(), rng);
        Eigen::MatrixXd shuffled(donors.rows(), donors.cols());
        for (int r = 0; r < config.max_controls; ++r)
            shuffled.row(r) = donors.row(order[static_cast<size_t>(r)]);

        for (size_t pi = 0; pi < config.t0_list.size(); ++pi) {
            const int p = config.t0_list[pi];
            auto m = minimal_hull_prefix(treated.head(p), shuffled.leftCols(p), config.tol);
            if (m) {
                min_controls[pi].push_back(static_cast<double>(*m));
            } else {
                min_controls[pi].push_back(static_cast<double>(config.max_controls));
                ++censored[pi];
            }
        }
    }

    std::vector<HullExperimentRow> rows;
    rows.reserve(config.t0_list.size());
    for (size_t pi = 0; pi < config.t0_list.size(); ++pi) {
        HullExperimentRow row;
        row.t0 = config.t0_list[pi];
        row.median_min_controls = median_of(min_controls[pi]);
        row.censored_fraction =
            static_cast<double>(censored[pi]) / static_cast<double>(config.n_samples);
        rows.push_back(row);
    }
    return rows;
}

std::string hull_experiment_csv(const std::vector<HullExperimentRow>& rows) {
    std::ostringstream out;
    out << "t0,median_min_controls,censored_fraction\n";
    for (const auto& row : rows)
        out << row.t0 << ',' << format_double(row.median_min_controls) << ','
            << format_double(row.censored_fraction) << '\n';
    return out.str();
}

}  // namespace synthctl
