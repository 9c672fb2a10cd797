import math

import numpy as np
import pytest

import gistsparse as gs


def test_prox_reference_values():
    assert gs.prox("l1", -2.0, 0.5) == pytest.approx(-1.5)
    assert gs.prox("lsp", 1.0, 0.5, theta=1.0) == pytest.approx(math.sqrt(0.5))
    assert gs.prox("lhalf", 2.0, 0.5) == pytest.approx(1.8144020185805389, rel=1e-12)
    assert gs.prox("l1", -3.0, 0.1, nonneg=True) == 0.0
    np.testing.assert_allclose(gs.prox_vector("l2", np.array([1.0, 1.0]), 0.5), [0.5, 0.5])
    assert gs.prox_oracle("l1", 2.0, 0.5) == pytest.approx(1.5, abs=1e-6)


def test_reg_value_and_errors():
    assert gs.reg_value("l2", np.array([1.0, -2.0])) == pytest.approx(5.0)
    with pytest.raises(ValueError):
        gs.reg_value("l1", np.array([-1.0]), nonneg=True)
    with pytest.raises(ValueError):
        gs.prox("l0", 1.0, 0.1)


def test_regression_matches_numpy_least_squares():
    rng = np.random.default_rng(0)
    d = rng.normal(size=(30, 5))
    y = rng.normal(size=30)
    rep = gs.solve_regression(d, y, "l1", 0.0, tol=1e-12, max_iter=20000)
    ref = np.linalg.lstsq(d, y, rcond=None)[0]
    np.testing.assert_allclose(rep["coef"], ref, atol=1e-5)
    trace = np.asarray(rep["objective_trace"])
    assert np.all(np.diff(trace) <= 0)


def test_classification_and_toy():
    x, labels, bayes = gs.make_toy(seed=0)
    assert x.shape == (200, 20)
    np.testing.assert_array_equal(bayes[:2], [2.0, 1.0])
    y = np.where(np.asarray(labels) == 1, 1.0, -1.0)
    rep = gs.solve_classification(x, y, "l1", 1e4)
    assert np.count_nonzero(rep["coef"]) == 0
    w, b = gs.train_ova(x, list(labels), 2, "lhalf", 0.05)
    assert w.shape == (20, 2)
    pred = np.argmax(x @ w + b, axis=1)
    cm = gs.confusion_matrix(list(labels), list(pred), 2)
    assert 0.5 < gs.kappa(cm) <= 1.0
    assert gs.kappa(np.array([[40, 10], [10, 40]], dtype=np.int64)) == pytest.approx(0.6)


def test_unmixing_round_trip():
    spectra = gs.synth_library(10, 60, 0)
    assert spectra.shape == (60, 10)
    y, alpha = gs.simulate_mixture(spectra, 2, 0.0, seed=0, trial=0)
    np.testing.assert_allclose(y, spectra @ alpha)
    rep = gs.unmix_solve(spectra, y, "lhalf", 1e-3)
    assert np.all(rep["coef"] >= 0)
    assert gs.model_error(rep["coef"], alpha) < 1e-3
    top = gs.ls_threshold_baseline(spectra, y, 2)
    assert np.count_nonzero(top) <= 2
    np.testing.assert_allclose(gs.nnls(spectra, y), alpha, atol=1e-8)


def test_self_checks():
    assert gs.prox_check(samples=20)
    assert gs.grad_check(points=5)
