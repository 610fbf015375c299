// Python bindings for the core estimation operations.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "synthctl/errors.hpp"
#include "synthctl/estimators.hpp"
#include "synthctl/hull.hpp"
#include "synthctl/inference.hpp"
#include "synthctl/panel.hpp"
#include "synthctl/simulation.hpp"
#include "synthctl/tuning.hpp"

namespace py = pybind11;
using namespace synthctl;

PYBIND11_MODULE(_core, m) {
    m.doc() = "synthetic control estimation toolkit (C++ core)";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_IOError);

    py::class_<PanelData>(m, "PanelData")
        .def_readonly("unit_ids", &PanelData::unit_ids)
        .def_readonly("time_labels", &PanelData::time_labels)
        .def_readonly("outcomes", &PanelData::outcomes)
        .def_readonly("predictors", &PanelData::predictors)
        .def_readonly("predictor_labels", &PanelData::predictor_labels)
        .def_readonly("treated_index", &PanelData::treated_index)
        .def_readonly("t0", &PanelData::t0)
        .def_property_readonly("n_units", &PanelData::n_units)
        .def_property_readonly("n_periods", &PanelData::n_periods)
        .def_property_readonly("n_donors", &PanelData::n_donors)
        .def_property_readonly("treated_id", &PanelData::treated_id)
        .def("donor_indices", &PanelData::donor_indices);

    m.def("make_panel", &make_panel, py::arg("unit_ids"), py::arg("time_labels"),
          py::arg("outcomes"), py::arg("predictors") = std::nullopt,
          py::arg("predictor_labels") = std::vector<std::string>{},
          py::arg("treated_id"), py::arg("treatment_time"));
    m.def("load_panel", &load_panel, py::arg("outcomes_path"),
          py::arg("predictors_path") = std::nullopt, py::arg("treated_id"),
          py::arg("treatment_time"));
    m.def("write_panel", &write_panel, py::arg("outcomes_path"), py::arg("panel"),
          py::arg("predictors_path") = std::nullopt);
    m.def("backdate", &backdate, py::arg("panel"), py::arg("new_t0"));

    py::class_<ColumnSpec>(m, "ColumnSpec")
        .def(py::init<>())
        .def_readwrite("predictor_columns", &ColumnSpec::predictor_columns)
        .def_readwrite("period_columns", &ColumnSpec::period_columns)
        .def_static("all_pretreatment", &ColumnSpec::all_pretreatment)
        .def_static("pretreatment_outcomes", &ColumnSpec::pretreatment_outcomes);

    py::class_<MatchingMatrix>(m, "MatchingMatrix")
        .def_readonly("z1", &MatchingMatrix::z1)
        .def_readonly("z0", &MatchingMatrix::z0)
        .def_readonly("standardized", &MatchingMatrix::standardized);

    m.def("build_matching", &build_matching, py::arg("panel"), py::arg("spec"),
          py::arg("standardize") = false);
    m.def("pairwise_distances",
          py::overload_cast<const MatchingMatrix&>(&pairwise_distances));

    py::class_<SolverOptions>(m, "SolverOptions")
        .def(py::init<>())
        .def_readwrite("tol", &SolverOptions::tol)
        .def_readwrite("max_iter", &SolverOptions::max_iter);

    py::class_<SolverResult>(m, "SolverResult")
        .def_readonly("w", &SolverResult::w)
        .def_readonly("objective", &SolverResult::objective)
        .def_readonly("iterations", &SolverResult::iterations)
        .def_readonly("primal_residual", &SolverResult::primal_residual)
        .def_readonly("dual_residual", &SolverResult::dual_residual)
        .def_readonly("unique", &SolverResult::unique)
        .def_readonly("polished", &SolverResult::polished);

    m.def(
        "solve_weights",
        [](const Eigen::MatrixXd& z0, const Eigen::VectorXd& z1, double a, double b,
           std::optional<Eigen::VectorXd> d, bool nonneg, double tol, int max_iter) {
            SolverProblem p;
            p.z0 = z0;
            p.z1 = z1;
            p.a = a;
            p.b = b;
            p.d = d ? *d : Eigen::VectorXd::Ones(z0.rows());
            p.nonneg = nonneg;
            SolverOptions opts;
            opts.tol = tol;
            opts.max_iter = max_iter;
            return solve(p, opts);
        },
        py::arg("z0"), py::arg("z1"), py::arg("a") = 0.0, py::arg("b") = 0.0,
        py::arg("d") = std::nullopt, py::arg("nonneg") = false, py::arg("tol") = 1e-8,
        py::arg("max_iter") = 10000);

    py::enum_<CvScheme>(m, "CvScheme")
        .value("control_units", CvScheme::control_units)
        .value("pretreatment_periods", CvScheme::pretreatment_periods);

    py::class_<EigenScaling>(m, "EigenScaling")
        .def_readonly("gram_eigenvalues", &EigenScaling::gram_eigenvalues)
        .def_readonly("n", &EigenScaling::n)
        .def_readonly("shortfall", &EigenScaling::shortfall)
        .def_readonly("a_index", &EigenScaling::a_index)
        .def_readonly("b_index", &EigenScaling::b_index)
        .def_readonly("a_count", &EigenScaling::a_count);

    py::class_<TuningParams>(m, "TuningParams")
        .def(py::init<>())
        .def_readwrite("a_star", &TuningParams::a_star)
        .def_readwrite("b_star", &TuningParams::b_star)
        .def_readwrite("a", &TuningParams::a)
        .def_readwrite("b", &TuningParams::b)
        .def_readonly("scaling", &TuningParams::scaling)
        .def_readwrite("scheme", &TuningParams::scheme)
        .def_readwrite("grid_step", &TuningParams::grid_step);

    m.def("eigen_scale", &eigen_scale, py::arg("matching"), py::arg("a_star"),
          py::arg("b_star"));

    py::enum_<Method>(m, "Method")
        .value("osc", Method::osc)
        .value("esc", Method::esc)
        .value("psc", Method::psc)
        .value("nsc", Method::nsc);

    py::class_<WeightVector>(m, "WeightVector")
        .def_readonly("w", &WeightVector::w)
        .def_readonly("method", &WeightVector::method)
        .def_readonly("tuning", &WeightVector::tuning)
        .def_readonly("pre_rmspe", &WeightVector::pre_rmspe)
        .def_readonly("diagnostics", &WeightVector::diagnostics);

    py::class_<EffectEstimate>(m, "EffectEstimate")
        .def_readonly("periods", &EffectEstimate::periods)
        .def_readonly("treated", &EffectEstimate::treated)
        .def_readonly("synthetic", &EffectEstimate::synthetic)
        .def_readonly("gap", &EffectEstimate::gap)
        .def_readonly("t0", &EffectEstimate::t0)
        .def_readonly("variance", &EffectEstimate::variance)
        .def_readonly("ci_lower", &EffectEstimate::ci_lower)
        .def_readonly("ci_upper", &EffectEstimate::ci_upper)
        .def_readonly("ci_level", &EffectEstimate::ci_level);

    m.def("fit_weights", &fit_weights, py::arg("panel"), py::arg("matching"),
          py::arg("method"), py::arg("tuning"), py::arg("options") = SolverOptions{});
    m.def("synthetic_outcomes", &synthetic_outcomes, py::arg("panel"), py::arg("weights"));
    m.def("estimate_effect", &estimate_effect, py::arg("panel"), py::arg("weights"));
    m.def("leave_one_out", &leave_one_out, py::arg("panel"), py::arg("spec"),
          py::arg("method"), py::arg("tuning"), py::arg("standardize") = false,
          py::arg("options") = SolverOptions{});

    py::class_<CvPoint>(m, "CvPoint")
        .def_readonly("a_star", &CvPoint::a_star)
        .def_readonly("b_star", &CvPoint::b_star)
        .def_readonly("mse", &CvPoint::mse);

    py::class_<CvSurface>(m, "CvSurface")
        .def_readonly("evaluations", &CvSurface::evaluations)
        .def_readonly("best_a_star", &CvSurface::best_a_star)
        .def_readonly("best_b_star", &CvSurface::best_b_star)
        .def_readonly("best_mse", &CvSurface::best_mse)
        .def_readonly("rounds", &CvSurface::rounds)
        .def_readonly("converged", &CvSurface::converged);

    m.def("cv_control_units", &cv_control_units, py::arg("panel"), py::arg("spec"),
          py::arg("method"), py::arg("a_star"), py::arg("b_star"),
          py::arg("standardize") = false, py::arg("options") = SolverOptions{});
    m.def("cv_pretreatment", &cv_pretreatment, py::arg("panel"), py::arg("spec"),
          py::arg("method"), py::arg("a_star"), py::arg("b_star"),
          py::arg("standardize") = false, py::arg("options") = SolverOptions{});
    m.def("select_tuning", &select_tuning, py::arg("panel"), py::arg("spec"),
          py::arg("method"), py::arg("scheme") = CvScheme::control_units,
          py::arg("grid_step") = 0.1, py::arg("standardize") = false,
          py::arg("options") = SolverOptions{});

    m.def("rmspe", &rmspe, py::arg("errors"));
    m.def("normal_quantile", &normal_quantile, py::arg("p"));

    py::enum_<TuningPolicy>(m, "TuningPolicy")
        .value("reuse", TuningPolicy::reuse)
        .value("reselect", TuningPolicy::reselect);

    py::class_<PlaceboRecord>(m, "PlaceboRecord")
        .def_readonly("unit", &PlaceboRecord::unit)
        .def_readonly("pre_rmspe", &PlaceboRecord::pre_rmspe)
        .def_readonly("post_rmspe", &PlaceboRecord::post_rmspe)
        .def_readonly("ratio", &PlaceboRecord::ratio)
        .def_readonly("failed", &PlaceboRecord::failed);

    py::class_<PermutationResult>(m, "PermutationResult")
        .def_readonly("records", &PermutationResult::records)
        .def_readonly("treated_rank", &PermutationResult::treated_rank)
        .def_readonly("p_value", &PermutationResult::p_value)
        .def_readonly("n_ranked", &PermutationResult::n_ranked)
        .def_readonly("warnings", &PermutationResult::warnings);

    m.def("permutation_test", &permutation_test, py::arg("panel"), py::arg("spec"),
          py::arg("method"), py::arg("policy") = TuningPolicy::reuse,
          py::arg("tuning") = std::nullopt,
          py::arg("scheme") = CvScheme::control_units, py::arg("grid_step") = 0.1,
          py::arg("standardize") = false, py::arg("options") = SolverOptions{});

    py::class_<VarianceEstimate>(m, "VarianceEstimate")
        .def_readonly("variance", &VarianceEstimate::variance)
        .def_readonly("donor_sq_errors", &VarianceEstimate::donor_sq_errors)
        .def_readonly("z_level", &VarianceEstimate::z_level);

    m.def("estimate_variance", &estimate_variance, py::arg("panel"), py::arg("spec"),
          py::arg("method"), py::arg("tuning"), py::arg("standardize") = false,
          py::arg("options") = SolverOptions{});
    m.def("confidence_intervals", &confidence_intervals, py::arg("estimate"),
          py::arg("variance"), py::arg("level") = 0.95);

    py::class_<HullQuery>(m, "HullQuery")
        .def(py::init<>())
        .def_readwrite("z1", &HullQuery::z1)
        .def_readwrite("z0", &HullQuery::z0)
        .def_readwrite("tol", &HullQuery::tol);

    py::class_<HullResult>(m, "HullResult")
        .def_readonly("inside", &HullResult::inside)
        .def_readonly("objective", &HullResult::objective)
        .def_readonly("weights", &HullResult::weights)
        .def_readonly("residual", &HullResult::residual)
        .def_readonly("iterations", &HullResult::iterations);

    m.def("in_convex_hull", &in_convex_hull, py::arg("query"));
    m.def(
        "in_hull",
        [](const Eigen::MatrixXd& z0, const Eigen::VectorXd& z1, double tol) {
            HullQuery q;
            q.z0 = z0;
            q.z1 = z1;
            q.tol = tol;
            return in_convex_hull(q);
        },
        py::arg("z0"), py::arg("z1"), py::arg("tol") = 1e-7);
    m.def("minimal_hull_prefix", &minimal_hull_prefix, py::arg("z1"), py::arg("donors"),
          py::arg("tol") = 1e-7);

    py::class_<HullExperimentConfig>(m, "HullExperimentConfig")
        .def(py::init<>())
        .def_readwrite("n_samples", &HullExperimentConfig::n_samples)
        .def_readwrite("max_controls", &HullExperimentConfig::max_controls)
        .def_readwrite("t0_list", &HullExperimentConfig::t0_list)
        .def_readwrite("seed", &HullExperimentConfig::seed)
        .def_readwrite("tol", &HullExperimentConfig::tol);

    py::class_<HullExperimentRow>(m, "HullExperimentRow")
        .def_readonly("t0", &HullExperimentRow::t0)
        .def_readonly("median_min_controls", &HullExperimentRow::median_min_controls)
        .def_readonly("censored_fraction", &HullExperimentRow::censored_fraction);

    m.def("hull_sample_experiment", &hull_sample_experiment, py::arg("config"));
    m.def("hull_experiment_csv", &hull_experiment_csv, py::arg("rows"));

    py::class_<SimulationConfig>(m, "SimulationConfig")
        .def(py::init<>())
        .def_readwrite("n_controls", &SimulationConfig::n_controls)
        .def_readwrite("t0", &SimulationConfig::t0)
        .def_readwrite("r", &SimulationConfig::r)
        .def_readwrite("t_post", &SimulationConfig::t_post)
        .def_readwrite("k", &SimulationConfig::k)
        .def_readwrite("f", &SimulationConfig::f)
        .def_readwrite("shock_scale", &SimulationConfig::shock_scale)
        .def_readwrite("effect_step", &SimulationConfig::effect_step);

    py::class_<SampleParams>(m, "SampleParams")
        .def_readonly("X", &SampleParams::X)
        .def_readonly("mu", &SampleParams::mu)
        .def_readonly("beta", &SampleParams::beta)
        .def_readonly("lambda_", &SampleParams::lambda);

    py::class_<SimulatedSample>(m, "SimulatedSample")
        .def_readonly("panel", &SimulatedSample::panel)
        .def_readonly("true_effects", &SimulatedSample::true_effects)
        .def_readonly("latent", &SimulatedSample::latent)
        .def_readonly("params", &SimulatedSample::params);

    m.def("generate_sample", &generate_sample, py::arg("config"), py::arg("param_seed"),
          py::arg("shock_seed"));
    m.def("derive_seed", &derive_seed, py::arg("root"), py::arg("k1"), py::arg("k2") = 0,
          py::arg("k3") = 0);
    m.def("paper_settings", &paper_settings);

    py::class_<StudySetting>(m, "StudySetting")
        .def(py::init<>())
        .def_readwrite("n_controls", &StudySetting::n_controls)
        .def_readwrite("t0", &StudySetting::t0)
        .def_readwrite("r", &StudySetting::r);

    py::class_<StudyConfig>(m, "StudyConfig")
        .def(py::init<>())
        .def_readwrite("settings", &StudyConfig::settings)
        .def_readwrite("n_param_sets", &StudyConfig::n_param_sets)
        .def_readwrite("n_shock_draws", &StudyConfig::n_shock_draws)
        .def_readwrite("seed", &StudyConfig::seed)
        .def_readwrite("tuning_grid_step", &StudyConfig::tuning_grid_step)
        .def_readwrite("cv_scheme", &StudyConfig::cv_scheme)
        .def_readwrite("threads", &StudyConfig::threads)
        .def_readwrite("bias_absolute_of_mean", &StudyConfig::bias_absolute_of_mean)
        .def_readwrite("t_post", &StudyConfig::t_post)
        .def_readwrite("k", &StudyConfig::k)
        .def_readwrite("f", &StudyConfig::f)
        .def_readwrite("shock_scale", &StudyConfig::shock_scale)
        .def_readwrite("ci_level", &StudyConfig::ci_level);

    py::class_<StudyCell>(m, "StudyCell")
        .def_readonly("setting", &StudyCell::setting)
        .def_readonly("method", &StudyCell::method)
        .def_readonly("bias", &StudyCell::bias)
        .def_readonly("sd", &StudyCell::sd)
        .def_readonly("coverage", &StudyCell::coverage)
        .def_readonly("n_failures", &StudyCell::n_failures);

    py::class_<StudyResult>(m, "StudyResult")
        .def_readonly("cells", &StudyResult::cells);

    m.def("run_study", &run_study, py::arg("config"), py::arg("methods"),
          py::call_guard<py::gil_scoped_release>());
    m.def("study_csv", &study_csv, py::arg("result"));
}
