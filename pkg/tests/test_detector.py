import dataclasses
import json

import numpy as np
import pytest

from eclipse_detect import DetectConfig, detect, estimate_onset, simulate_bridge_quantile, statistic_curve
from eclipse_detect.detector import (
    bridge_grid,
    cached_bridge_quantile,
    sample_standardized_bridge,
)
from eclipse_detect.errors import InvalidParameters, WindowEmpty
from eclipse_detect.frechet import StatisticCurve


def test_quantile_strictly_decreasing_in_alpha():
    qs = [simulate_bridge_quantile(a, 0.1, 200, 4000, seed=3).quantile for a in (0.01, 0.05, 0.1)]
    assert qs[0] > qs[1] > qs[2] > 0


def test_low_quantile_is_small_positive():
    lo = simulate_bridge_quantile(0.95, 0.1, 200, 4000, seed=3).quantile
    hi = simulate_bridge_quantile(0.05, 0.1, 200, 4000, seed=3).quantile
    assert 0 < lo < hi


@pytest.mark.parametrize(
    "kw",
    [dict(alpha=0.0), dict(alpha=1.0), dict(delta=0.5), dict(delta=0.0), dict(grid_points=9), dict(n_paths=999)],
)
def test_quantile_rejects_bad_parameters(kw):
    args = dict(alpha=0.05, delta=0.1, grid_points=100, n_paths=1000, seed=0)
    args.update(kw)
    with pytest.raises(InvalidParameters):
        simulate_bridge_quantile(**args)


def test_quantile_is_deterministic():
    a = simulate_bridge_quantile(0.05, 0.1, 300, 2000, seed=9)
    b = simulate_bridge_quantile(0.05, 0.1, 300, 2000, seed=9)
    assert a == b


def test_bridge_marginals():
    t, z = sample_standardized_bridge(100, 0.1, 10_000, np.random.default_rng(1))
    assert np.all(np.abs(z.mean(axis=0)) < 0.04)
    assert np.all(np.abs(z.var(axis=0) - 1.0) < 0.06)
    idx = [0, len(t) // 2, len(t) - 1]
    assert np.all(np.abs(z[:, idx].mean(axis=0)) < 0.02 * 1.5)
    assert np.all(np.abs(z[:, idx].var(axis=0) - 1.0) < 0.05)


def test_bridge_correlation():
    t, z = sample_standardized_bridge(50, 0.1, 20_000, np.random.default_rng(2))
    emp = np.corrcoef(z, rowvar=False)
    t1, t2 = np.minimum.outer(t, t), np.maximum.outer(t, t)
    theory = np.sqrt(t1 * (1 - t2) / (t2 * (1 - t1)))
    assert np.max(np.abs(emp - theory)) < 0.03


def test_quantile_agrees_with_covariance_route():
    """Second route: sample the Gaussian process from its correlation via Cholesky."""
    grid, delta, paths = 200, 0.1, 20_000
    t = bridge_grid(grid, delta)
    t1, t2 = np.minimum.outer(t, t), np.maximum.outer(t, t)
    corr = np.sqrt(t1 * (1 - t2) / (t2 * (1 - t1)))
    chol = np.linalg.cholesky(corr + 1e-12 * np.eye(t.size))
    rng = np.random.default_rng(77)
    z = rng.standard_normal((paths, t.size)) @ chol.T
    other = float(np.quantile(np.max(z * z, axis=1), 0.95))
    ours = simulate_bridge_quantile(0.05, delta, grid, paths, seed=5).quantile
    assert ours == pytest.approx(other, abs=0.3)


def test_cache_roundtrip(tmp_path):
    a, hit_a = cached_bridge_quantile(0.05, 0.1, 150, 1000, 4, tmp_path)
    b, hit_b = cached_bridge_quantile(0.05, 0.1, 150, 1000, 4, tmp_path)
    assert not hit_a and hit_b and a == b
    files = list(tmp_path.glob("quantile-*.json"))
    assert len(files) == 1
    assert json.loads(files[0].read_text())["quantile"] == a.quantile


def _gauss_trial(seed, N=200, dim=1, shift=0.0, tau=None):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(N, dim))
    if tau is not None:
        x[tau - 1:] += shift
    return x


def test_gaussian_null_rejection_rate():
    cfg = DetectConfig(alpha=0.05, quantile_paths=10_000)
    rejections = sum(detect(_gauss_trial(s), cfg).detected for s in range(500))
    assert 0.02 <= rejections / 500 <= 0.10


def test_decision_consistency_and_determinism():
    cfg = DetectConfig(quantile_paths=2000)
    for s in range(20):
        x = _gauss_trial(s, N=100, shift=1.0, tau=50) if s % 2 else _gauss_trial(s, N=100)
        r = detect(x, cfg)
        assert r.detected == (r.max_scaled_stat >= r.threshold)
        assert (r.tau_hat is not None) == r.detected
        again = detect(x, cfg)
        assert json.dumps(again.to_dict()) == json.dumps(r.to_dict())


def test_mean_shift_onset_estimate():
    hits = 0
    for s in range(100):
        x = _gauss_trial(1000 + s, N=200, dim=1, shift=2.0, tau=120)
        r = detect(x, DetectConfig(quantile_paths=2000))
        hits += r.detected and abs(r.tau_hat - 120) <= 10
    assert hits >= 90


def _curve(values, N=1000, start=101):
    v = np.asarray(values, dtype=float)
    n = np.arange(start, start + v.size)
    return StatisticCurve(n, v, N * v, N, 0.1, 1.0, np.zeros(1), 1.0, "euclidean")


def test_estimate_onset_rules():
    v = np.zeros(799)
    v[600 - 101] = 5.0
    assert estimate_onset(_curve(v)) == 600
    assert estimate_onset(_curve(np.ones(799))) == 101
    with pytest.raises(WindowEmpty):
        estimate_onset(_curve([]))


def test_config_validation():
    for kw in (dict(alpha=1.5), dict(delta=0.6), dict(mean_mode="median"), dict(jl_dim=0)):
        with pytest.raises(InvalidParameters):
            detect(_gauss_trial(0), dataclasses.replace(DetectConfig(), **kw))


def test_report_echoes_config_and_curve():
    r = detect(_gauss_trial(3), DetectConfig(quantile_paths=2000))
    d = r.to_dict()
    assert d["config"]["alpha"] == 0.05 and d["mean_mode"] == "euclidean"
    assert len(d["curve"]["n"]) == r.curve.n.size
    curve = statistic_curve(_gauss_trial(3), 0.1)
    np.testing.assert_array_equal(curve.scaled, r.curve.scaled)
