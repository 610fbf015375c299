#include <doctest.h>

#include <cmath>
#include <limits>

#include "synthctl/errors.hpp"
#include "synthctl/inference.hpp"
#include "synthctl/simulation.hpp"
#include "synthctl/tuning.hpp"

using namespace synthctl;

namespace {

// Straight-line reimplementation of the donor cross-validation loop, written
// directly against the solver so it cannot share a bug with the fold
// machinery under test.
double cv_control_units_oracle(const PanelData& panel, const ColumnSpec& spec,
                               Method method, double a_star, double b_star) {
    double sum = 0.0;
    int count = 0;
    for (int u : panel.donor_indices()) {
        PanelData pseudo = drop_unit(retarget_treated(panel, u), panel.treated_index);
        MatchingMatrix m = build_matching(pseudo, spec, false);
        TuningParams tp = eigen_scale(m, a_star, b_star);
        SolverProblem problem;
        problem.z0 = m.z0;
        problem.z1 = m.z1;
        problem.nonneg = method_nonneg(method);
        problem.a = method_has_l1(method) ? tp.a : 0.0;
        problem.b = method_has_l2(method) ? tp.b : 0.0;
        problem.d = method_distance_weighted_l1(method)
            ? pairwise_distances(m)
            : Eigen::VectorXd::Ones(m.z0.rows());
        Eigen::VectorXd w = solve(problem).w;
        const auto pool = pseudo.donor_indices();
        for (int t = pseudo.t0; t < pseudo.n_periods(); ++t) {
            double pred = 0.0;
            for (size_t r = 0; r < pool.size(); ++r)
                pred += w(static_cast<Eigen::Index>(r)) * pseudo.outcomes(pool[r], t);
            const double err = pseudo.outcomes(pseudo.treated_index, t) - pred;
            sum += err * err;
            ++count;
        }
    }
    return sum / count;
}

double cv_pretreatment_oracle(const PanelData& panel, const ColumnSpec& spec,
                              Method method, double a_star, double b_star) {
    double sum = 0.0;
    int count = 0;
    for (size_t hold = 0; hold < spec.period_columns.size(); ++hold) {
        ColumnSpec fold_spec = spec;
        fold_spec.period_columns.erase(fold_spec.period_columns.begin() +
                                       static_cast<std::ptrdiff_t>(hold));
        MatchingMatrix m = build_matching(panel, fold_spec, false);
        TuningParams tp = eigen_scale(m, a_star, b_star);
        SolverProblem problem;
        problem.z0 = m.z0;
        problem.z1 = m.z1;
        problem.nonneg = method_nonneg(method);
        problem.a = method_has_l1(method) ? tp.a : 0.0;
        problem.b = method_has_l2(method) ? tp.b : 0.0;
        problem.d = method_distance_weighted_l1(method)
            ? pairwise_distances(m)
            : Eigen::VectorXd::Ones(m.z0.rows());
        Eigen::VectorXd w = solve(problem).w;
        const int s = spec.period_columns[hold];
        double pred = 0.0;
        const auto donors = panel.donor_indices();
        for (size_t r = 0; r < donors.size(); ++r)
            pred += w(static_cast<Eigen::Index>(r)) * panel.outcomes(donors[r], s);
        const double err = panel.outcomes(panel.treated_index, s) - pred;
        sum += err * err;
        ++count;
    }
    return sum / count;
}

// All units live on a two-dimensional affine subspace of path space, so any
// unit is an exact affine combination of any other three.
PanelData planar_panel() {
    Eigen::VectorXd u(6), v(6);
    u << 1, 2, 3, 4, 5, 6;
    v << 2, 1, 3, 2, 4, 3;
    Eigen::MatrixXd y(5, 6);
    const double alphas[5] = {0.1, 0.4, 0.7, 1.3, -0.2};
    for (int i = 0; i < 5; ++i)
        y.row(i) = alphas[i] * u.transpose() + (1 - alphas[i]) * v.transpose();
    return make_panel({"T", "B", "C", "D", "E"}, {"t1", "t2", "t3", "t4", "t5", "t6"},
                      y, std::nullopt, {}, "T", 4);
}

}  // namespace

TEST_CASE("exactly reconstructible donors give near-zero cv error") {
    PanelData panel = planar_panel();
    ColumnSpec spec = ColumnSpec::all_pretreatment(panel);
    CHECK(cv_control_units(panel, spec, Method::nsc, 0.0, 0.0) < 1e-18);
    CHECK(cv_pretreatment(panel, spec, Method::nsc, 0.0, 0.0) < 1e-18);
}

TEST_CASE("two donors predict each other with forced weights") {
    Eigen::MatrixXd y(3, 4);
    y << 0, 0, 0, 0, 1, 2, 3, 4, 2, 3, 5, 7;
    PanelData panel = make_panel({"T", "B", "C"}, {"t1", "t2", "t3", "t4"}, y,
                                 std::nullopt, {}, "T", 2);
    ColumnSpec spec = ColumnSpec::all_pretreatment(panel);
    // Each donor is predicted by the single other donor, so the squared
    // errors are the pairwise posttreatment differences.
    const double expected = ((3.0 - 5.0) * (3.0 - 5.0) + (4.0 - 7.0) * (4.0 - 7.0) +
                             (5.0 - 3.0) * (5.0 - 3.0) + (7.0 - 4.0) * (7.0 - 4.0)) /
                            4.0;
    CHECK(cv_control_units(panel, spec, Method::nsc, 0.0, 0.0) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("donor cv matches the straight-line oracle") {
    SimulationConfig sim;
    sim.n_controls = 8;
    sim.t0 = 6;
    sim.t_post = 4;
    sim.r = 1;
    SimulatedSample s = generate_sample(sim, 11, 12);
    ColumnSpec spec = ColumnSpec::all_pretreatment(s.panel);
    for (Method method : {Method::osc, Method::esc, Method::psc, Method::nsc}) {
        for (auto [a_star, b_star] : {std::pair{0.0, 0.0}, {0.5, 0.3}, {1.0, 1.0}}) {
            const double got = cv_control_units(s.panel, spec, method, a_star, b_star);
            const double want = cv_control_units_oracle(s.panel, spec, method, a_star, b_star);
            CHECK(got == doctest::Approx(want).epsilon(1e-10));
        }
    }
}

TEST_CASE("pretreatment cv matches the straight-line oracle") {
    SimulationConfig sim;
    sim.n_controls = 6;
    sim.t0 = 7;
    sim.t_post = 3;
    sim.r = 2;
    SimulatedSample s = generate_sample(sim, 21, 22);
    ColumnSpec spec = ColumnSpec::all_pretreatment(s.panel);
    for (Method method : {Method::esc, Method::nsc}) {
        for (auto [a_star, b_star] : {std::pair{0.0, 0.0}, {0.4, 0.6}}) {
            const double got = cv_pretreatment(s.panel, spec, method, a_star, b_star);
            const double want = cv_pretreatment_oracle(s.panel, spec, method, a_star, b_star);
            CHECK(got == doctest::Approx(want).epsilon(1e-10));
        }
    }
}

TEST_CASE("pretreatment cv with two periods has two single-period folds") {
    Eigen::MatrixXd y(3, 3);
    y << 1, 2, 3, 0.5, 2.5, 3.5, 2, 1.5, 2.0;
    PanelData panel = make_panel({"T", "B", "C"}, {"t1", "t2", "t3"}, y,
                                 std::nullopt, {}, "T", 2);
    ColumnSpec spec = ColumnSpec::all_pretreatment(panel);
    const double got = cv_pretreatment(panel, spec, Method::nsc, 0.0, 0.0);
    const double want = cv_pretreatment_oracle(panel, spec, Method::nsc, 0.0, 0.0);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));

    PanelData single = make_panel({"T", "B", "C"}, {"t1", "t2", "t3"}, y,
                                  std::nullopt, {}, "T", 1);
    CHECK_THROWS_AS(
        cv_pretreatment(single, ColumnSpec::all_pretreatment(single), Method::nsc, 0.0, 0.0),
        ValidationError);
}

TEST_CASE("cv requires at least two donors") {
    Eigen::MatrixXd y(2, 3);
    y << 1, 2, 3, 4, 5, 6;
    PanelData panel = make_panel({"T", "B"}, {"t1", "t2", "t3"}, y, std::nullopt, {},
                                 "T", 2);
    CHECK_THROWS_AS(
        cv_control_units(panel, ColumnSpec::all_pretreatment(panel), Method::nsc, 0.0, 0.0),
        ValidationError);
}

TEST_CASE("osc has nothing to tune") {
    SimulationConfig sim;
    sim.n_controls = 5;
    sim.t0 = 4;
    sim.t_post = 3;
    SimulatedSample s = generate_sample(sim, 31, 32);
    auto [tp, surface] = select_tuning(s.panel, ColumnSpec::all_pretreatment(s.panel),
                                       Method::osc);
    CHECK(tp.a_star == 0.0);
    CHECK(tp.b_star == 0.0);
    CHECK(tp.a == 0.0);
    CHECK(tp.b == 0.0);
    CHECK(surface.evaluations.empty());
    CHECK(surface.converged);
}

TEST_CASE("psc pins the ridge axis at zero") {
    SimulationConfig sim;
    sim.n_controls = 6;
    sim.t0 = 5;
    sim.t_post = 3;
    SimulatedSample s = generate_sample(sim, 41, 42);
    auto [tp, surface] = select_tuning(s.panel, ColumnSpec::all_pretreatment(s.panel),
                                       Method::psc);
    CHECK(tp.b_star == 0.0);
    CHECK(tp.b == 0.0);
    for (const auto& point : surface.evaluations) CHECK(point.b_star == 0.0);
    CHECK(surface.converged);
}

TEST_CASE("coordinate search finds a planted strict minimum at (0.3, 0.7)") {
    // Fixture chosen for its surface shape: the exhaustive 11x11 grid of the
    // donor cv error has its unique strict minimum at (0.3, 0.7).
    SimulationConfig sim;
    sim.n_controls = 12;
    sim.t0 = 8;
    sim.t_post = 4;
    sim.r = 2;
    sim.shock_scale = 5.0;
    SimulatedSample s = generate_sample(sim, derive_seed(37, 7, 0, 0),
                                        derive_seed(37, 7, 0, 1));
    ColumnSpec spec = ColumnSpec::all_pretreatment(s.panel);

    double best = std::numeric_limits<double>::infinity(), second = best;
    int best_a = -1, best_b = -1;
    for (int ai = 0; ai <= 10; ++ai) {
        for (int bi = 0; bi <= 10; ++bi) {
            const double v = cv_control_units(s.panel, spec, Method::nsc, ai / 10.0, bi / 10.0);
            if (v < best) {
                second = best;
                best = v;
                best_a = ai;
                best_b = bi;
            } else if (v < second) {
                second = v;
            }
        }
    }
    REQUIRE(best_a == 3);
    REQUIRE(best_b == 7);
    REQUIRE(second > best);

    auto [tp, surface] = select_tuning(s.panel, spec, Method::nsc);
    CHECK(tp.a_star == doctest::Approx(0.3));
    CHECK(tp.b_star == doctest::Approx(0.7));
    CHECK(surface.converged);
}

TEST_CASE("returned pair attains the minimum over evaluated points") {
    SimulationConfig sim;
    sim.n_controls = 7;
    sim.t0 = 6;
    sim.t_post = 4;
    sim.r = 2;
    SimulatedSample s = generate_sample(sim, 51, 52);
    ColumnSpec spec = ColumnSpec::all_pretreatment(s.panel);
    for (Method method : {Method::esc, Method::psc, Method::nsc}) {
        auto [tp, surface] = select_tuning(s.panel, spec, method);
        double min_seen = std::numeric_limits<double>::infinity();
        for (const auto& point : surface.evaluations) min_seen = std::min(min_seen, point.mse);
        CHECK(surface.best_mse == min_seen);
        bool found = false;
        for (const auto& point : surface.evaluations)
            if (point.a_star == tp.a_star && point.b_star == tp.b_star &&
                point.mse == surface.best_mse)
                found = true;
        CHECK(found);
    }
}

TEST_CASE("selection is deterministic") {
    SimulationConfig sim;
    sim.n_controls = 6;
    sim.t0 = 5;
    sim.t_post = 3;
    sim.r = 1;
    SimulatedSample s = generate_sample(sim, 61, 62);
    ColumnSpec spec = ColumnSpec::all_pretreatment(s.panel);
    auto [tp1, surf1] = select_tuning(s.panel, spec, Method::nsc);
    auto [tp2, surf2] = select_tuning(s.panel, spec, Method::nsc);
    CHECK(tp1.a_star == tp2.a_star);
    CHECK(tp1.b_star == tp2.b_star);
    CHECK(tp1.a == tp2.a);
    CHECK(tp1.b == tp2.b);
    REQUIRE(surf1.evaluations.size() == surf2.evaluations.size());
    for (size_t i = 0; i < surf1.evaluations.size(); ++i)
        CHECK(surf1.evaluations[i].mse == surf2.evaluations[i].mse);
}

TEST_CASE("grid step must divide one evenly") {
    PanelData panel = planar_panel();
    ColumnSpec spec = ColumnSpec::all_pretreatment(panel);
    CHECK_THROWS_AS(select_tuning(panel, spec, Method::nsc, CvScheme::control_units, 0.3),
                    ValidationError);
    CHECK_NOTHROW(select_tuning(panel, spec, Method::nsc, CvScheme::control_units, 0.25));
}

TEST_CASE("realized penalties come from the treated problem's spectrum") {
    SimulationConfig sim;
    sim.n_controls = 6;
    sim.t0 = 5;
    sim.t_post = 3;
    SimulatedSample s = generate_sample(sim, 71, 72);
    ColumnSpec spec = ColumnSpec::all_pretreatment(s.panel);
    auto [tp, surface] = select_tuning(s.panel, spec, Method::nsc);
    MatchingMatrix m = build_matching(s.panel, spec, false);
    TuningParams again = eigen_scale(m, tp.a_star, tp.b_star);
    CHECK(tp.a == again.a);
    CHECK(tp.b == again.b);
}
