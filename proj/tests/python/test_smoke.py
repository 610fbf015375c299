"""Smoke tests for the python surface of the toolkit."""

import math

import numpy as np
import pytest

import synthctl


def figure_panel(xs, f):
    xs = list(xs)
    outcomes = np.array([[f(x), f(x)] for x in xs])
    predictors = np.array([[float(x)] for x in xs])
    ids = [chr(ord("A") + i) for i in range(len(xs))]
    return synthctl.make_panel(
        unit_ids=ids,
        time_labels=["t1", "t2"],
        outcomes=outcomes,
        predictors=predictors,
        predictor_labels=["x"],
        treated_id="A",
        treatment_time=1,
    )


def test_unrestricted_fit_extrapolates():
    res = synthctl.solve_weights(np.array([[6.0], [7.0]]), np.array([5.0]))
    assert res.w == pytest.approx([2.0, -1.0], abs=1e-8)
    assert res.unique


def test_simplex_fit_interpolates():
    res = synthctl.solve_weights(np.array([[2.0], [6.0]]), np.array([5.0]), nonneg=True)
    assert res.w == pytest.approx([0.25, 0.75], abs=1e-8)


def test_panel_fit_and_effect():
    panel = figure_panel([5, 6, 7], lambda x: 0.6 * x)
    spec = synthctl.ColumnSpec()
    spec.predictor_columns = [0]
    matching = synthctl.build_matching(panel, spec)
    wv = synthctl.fit_weights(panel, matching, synthctl.Method.nsc, synthctl.TuningParams())
    assert wv.w == pytest.approx([2.0, -1.0], abs=1e-8)
    effect = synthctl.estimate_effect(panel, wv)
    assert effect.gap == pytest.approx([0.0, 0.0], abs=1e-9)


def test_hull_verdicts():
    assert not synthctl.in_hull(np.array([[6.0], [7.0]]), np.array([5.0])).inside
    res = synthctl.in_hull(np.array([[2.0], [6.0]]), np.array([5.0]))
    assert res.inside
    assert res.weights == pytest.approx([0.25, 0.75], abs=1e-8)


def test_rmspe_and_quantile():
    assert synthctl.rmspe(np.array([3.0, 4.0])) == pytest.approx(math.sqrt(12.5))
    assert synthctl.normal_quantile(0.975) == pytest.approx(1.959964, abs=1e-6)


def test_eigen_scale_identity():
    panel = figure_panel([5, 6, 7], lambda x: 0.6 * x)
    spec = synthctl.ColumnSpec()
    spec.predictor_columns = [0]
    matching = synthctl.build_matching(panel, spec)
    tp = synthctl.eigen_scale(matching, 0.0, 1.0)
    assert tp.b == pytest.approx(max(tp.scaling.gram_eigenvalues))


def test_simulation_round_trip(tmp_path):
    cfg = synthctl.SimulationConfig()
    cfg.n_controls = 6
    cfg.t0 = 5
    sample = synthctl.generate_sample(cfg, 1, 2)
    panel = sample.panel
    assert panel.n_units == 7
    assert panel.t0 == 5

    out = tmp_path / "panel.csv"
    preds = tmp_path / "preds.csv"
    synthctl.write_panel(str(out), panel, str(preds))
    back = synthctl.load_panel(str(out), str(preds), panel.treated_id, panel.t0)
    assert np.array_equal(back.outcomes, panel.outcomes)
    assert back.unit_ids == panel.unit_ids


def test_permutation_and_variance():
    cfg = synthctl.SimulationConfig()
    cfg.n_controls = 9
    cfg.t0 = 8
    cfg.t_post = 4
    cfg.effect_step = 0.0
    sample = synthctl.generate_sample(cfg, 3, 4)
    spec = synthctl.ColumnSpec.all_pretreatment(sample.panel)
    matching = synthctl.build_matching(sample.panel, spec)
    tp = synthctl.eigen_scale(matching, 0.3, 0.3)
    res = synthctl.permutation_test(sample.panel, spec, synthctl.Method.nsc,
                                    synthctl.TuningPolicy.reuse, tp)
    assert len(res.records) == 10
    assert 0.1 <= res.p_value <= 1.0

    var = synthctl.estimate_variance(sample.panel, spec, synthctl.Method.nsc, tp)
    assert var.variance.shape == (12,)
    assert (var.variance >= 0).all()

    wv = synthctl.fit_weights(sample.panel, matching, synthctl.Method.nsc, tp)
    effect = synthctl.estimate_effect(sample.panel, wv)
    with_ci = synthctl.confidence_intervals(effect, var, 0.95)
    assert (with_ci.ci_lower <= with_ci.ci_upper).all()


def test_select_tuning_and_study():
    cfg = synthctl.SimulationConfig()
    cfg.n_controls = 6
    cfg.t0 = 5
    cfg.t_post = 3
    sample = synthctl.generate_sample(cfg, 11, 12)
    spec = synthctl.ColumnSpec.all_pretreatment(sample.panel)
    tp, surface = synthctl.select_tuning(sample.panel, spec, synthctl.Method.nsc)
    assert 0.0 <= tp.a_star <= 1.0
    assert 0.0 <= tp.b_star <= 1.0
    assert surface.converged

    study_cfg = synthctl.StudyConfig()
    setting = synthctl.StudySetting()
    setting.n_controls = 6
    setting.t0 = 5
    setting.r = 1
    study_cfg.settings = [setting]
    study_cfg.n_param_sets = 1
    study_cfg.n_shock_draws = 3
    study_cfg.seed = 5
    result = synthctl.run_study(study_cfg, [synthctl.Method.osc, synthctl.Method.nsc])
    csv = synthctl.study_csv(result)
    assert csv.startswith("J,T0,r,method,bias,sd,coverage\n")
    assert len(csv.strip().splitlines()) == 3


def test_validation_errors_surface_as_python_exceptions():
    with pytest.raises(ValueError):
        synthctl.normal_quantile(2.0)
    with pytest.raises(ValueError):
        cfg = synthctl.SimulationConfig()
        cfg.r = 5
        synthctl.generate_sample(cfg, 1, 2)
