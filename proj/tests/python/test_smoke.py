import math

import numpy as np
import pytest

import safel2o


def small_dataset(seed=3):
    return safel2o.generate(problem="lasso", dist="seen", m=6, n=10, tau=1e-3,
                            n_train=8, n_test=4, seed=seed)


def test_generate_attributes():
    ds = small_dataset()
    assert ds.kind == "lasso"
    assert ds.dist == "seen"
    assert (ds.m, ds.n) == (6, 10)
    assert ds.tau == pytest.approx(1e-3)
    assert ds.train_count == 8 and ds.test_count == 4
    A = ds.dictionary()
    assert A.shape == (6, 10)
    np.testing.assert_allclose(np.linalg.norm(A, axis=0), 1.0, atol=1e-12)
    assert safel2o.generate(seed=3, m=6, n=10, n_train=8, n_test=4).dictionary() == pytest.approx(A)


def test_soft_threshold_matches_numpy():
    rng = np.random.default_rng(0)
    v = rng.normal(size=50)
    got = safel2o.soft_threshold(v, 0.3)
    want = np.sign(v) * np.maximum(np.abs(v) - 0.3, 0.0)
    np.testing.assert_allclose(got, want, atol=1e-15)
    with pytest.raises(ValueError):
        safel2o.soft_threshold(v, -0.1)


def test_spectral_norm_matches_numpy():
    rng = np.random.default_rng(1)
    A = rng.normal(size=(7, 12))
    got = safel2o.spectral_norm_sq(A)
    want = np.linalg.eigvalsh(A.T @ A).max()
    assert got == pytest.approx(want, rel=1e-9)


def test_alista_weight_constraint():
    rng = np.random.default_rng(2)
    A = rng.normal(size=(8, 16))
    A /= np.linalg.norm(A, axis=0)
    W = safel2o.alista_weight(A)
    assert W.shape == A.shape
    np.testing.assert_allclose(np.diag(W.T @ A), 1.0, atol=1e-8)


def test_train_and_run():
    ds = small_dataset()
    init = safel2o.init_scheme("listacp", ds, 2)
    assert init.kind == "listacp" and init.depth == 2
    params = safel2o.train(init, ds, loss="objective", epochs=3, seed=5)

    km = safel2o.run(ds, iters=5, tol=0.0, mode="km")
    l2o = safel2o.run(ds, params, iters=5, tol=0.0, mode="l2o")
    safe = safel2o.run(ds, params, iters=5, tol=0.0, mode="safe", safeguard="ema:0.25")
    for out in (km, l2o, safe):
        assert set(out) >= {"k", "rel_error", "fallback_frequency", "mean_residual",
                            "mean_mu", "extension"}
        assert out["k"][0] == 1.0
    assert len(km["k"]) == 6
    assert len(l2o["k"]) == 3  # depth 2 caps the learned run
    assert l2o["depth"] == 2
    # record 1 is the shared start point
    assert km["rel_error"][0] == l2o["rel_error"][0] == safe["rel_error"][0]
    assert np.all(km["fallback_frequency"] == 1.0)
    assert np.all(l2o["fallback_frequency"] == 0.0)
    assert np.all(np.isnan(km["mean_mu"]))
    assert np.all(np.isfinite(safe["mean_mu"]))


def test_objective_and_solution():
    ds = small_dataset()
    x = safel2o.solve_solution(ds, "test", 0)
    f_star = safel2o.objective(ds, "test", 0, x)
    f_zero = safel2o.objective(ds, "test", 0, np.zeros(ds.n))
    assert 0.0 < f_star < f_zero


def test_mu_trajectory_halving():
    mus = safel2o.mu_trajectory("gs:0.5", 0.99, [1.0, 0.5, 0.25, 0.125])
    np.testing.assert_allclose(mus, [1.0, 0.5, 0.25, 0.125], atol=1e-15)
    diffs = np.diff(safel2o.mu_trajectory("ema:0.25", 0.5, list(np.abs(np.sin(np.arange(20.0))) + 0.1)))
    assert np.all(diffs <= 0.0)


def test_save_load_round_trips(tmp_path):
    ds = small_dataset()
    dpath = str(tmp_path / "ds.txt")
    safel2o.save_dataset(ds, dpath)
    back = safel2o.load_dataset(dpath)
    assert back.dictionary() == pytest.approx(ds.dictionary(), abs=0.0)
    assert back.observation("test", 1) == pytest.approx(ds.observation("test", 1), abs=0.0)

    params = safel2o.init_scheme("alista", ds, 3)
    ppath = str(tmp_path / "params.txt")
    safel2o.save_params(params, ppath)
    again = safel2o.load_params(ppath)
    assert (again.kind, again.depth, again.m, again.n) == ("alista", 3, 6, 10)


def test_config_errors_are_value_errors():
    ds = small_dataset()
    with pytest.raises(ValueError):
        safel2o.generate(problem="nope")
    with pytest.raises(ValueError):
        safel2o.init_scheme("alista", ds, 0)
    with pytest.raises(ValueError):
        safel2o.run(ds, mode="l2o")  # learned mode without params
    with pytest.raises(ValueError):
        safel2o.mu_trajectory("gs:0.5", 0.99, [])
    assert issubclass(safel2o.ConfigError, ValueError)
    assert issubclass(safel2o.NumericError, ArithmeticError)
