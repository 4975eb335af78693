"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from eclipse_detect import AttackScenario, DetectConfig, build_jl_map, statistic_curve
from eclipse_detect.cli import main
from eclipse_detect.errors import DegenerateVariance, DistortionNotAchieved
from eclipse_detect.evaluation import (
    binomial_band,
    compare_projected_vs_original,
    run_accuracy,
    run_calibration,
    run_roc,
)
from eclipse_detect.frechet import frechet_mean
from eclipse_detect.presets import preset_config, preset_scenario
from eclipse_detect.projection import JlMap, pairwise_distortion

import naive

pytestmark = pytest.mark.acceptance

# pinned tolerances
QUANTILE_BAND = (8.5, 9.6)
QUANTILE_SECONDS = 60
CALIBRATION_TRIALS, CALIBRATION_LEVEL, CALIBRATION_SECONDS = 500, 0.99, 600
ACCURACY_PER_CLASS, ACCURACY_MIN, ACCURACY_SECONDS = 50, 0.90, 1800
ONSET_RMSE_MAX, ONSET_MEDIAN_MAX = 10.0, 5.0
DOMINANCE_TRIALS, DOMINANCE_MIN = 50, 0.80
ORACLE_SEQUENCES, ORACLE_RTOL = 200, 1e-9
IDENTITY_RTOL = 1e-10
ROC_TRIALS, AUC_SLACK, AUC_MIN = 50, 0.05, 0.95


def test_1_quantile_reproduction(verdict, capsys):
    t0 = time.perf_counter()
    code = main(["quantile", "--alpha", "0.05", "--delta", "0.05,0.1", "--grid", "1000",
                 "--paths", "10000", "--seed", "0", "--no-cache"])
    elapsed = time.perf_counter() - t0
    out = capsys.readouterr().out
    values = [float(line.split("q=")[1].split()[0]) for line in out.splitlines() if "q=" in line]
    ok = code == 0 and len(values) == 2 and any(QUANTILE_BAND[0] <= v <= QUANTILE_BAND[1] for v in values)
    ok = ok and elapsed < QUANTILE_SECONDS
    verdict("1 quantile", ok, f"q(delta=0.05, 0.1) = {values}, band {QUANTILE_BAND}, {elapsed:.1f}s")


def test_2_null_calibration(verdict):
    scenario = AttackScenario(p=20, q=3, N=200, attack=False)
    band = binomial_band(0.05, CALIBRATION_TRIALS, CALIBRATION_LEVEL)
    t0 = time.perf_counter()
    res = run_calibration(scenario, CALIBRATION_TRIALS, 0.05, DetectConfig(mean_mode="euclidean"), seed=0)
    elapsed = time.perf_counter() - t0
    ok = res.within(band) and elapsed < CALIBRATION_SECONDS
    verdict("2 null calibration", ok,
            f"false-alarm rate {res.rate:.3f} over {res.trials} trials, band [{band[0]:.3f}, {band[1]:.3f}], "
            f"{elapsed:.0f}s")


@pytest.fixture(scope="module")
def benchmark_accuracy():
    t0 = time.perf_counter()
    summary = run_accuracy(preset_scenario("paper-iv", attack=True, tau=600), ACCURACY_PER_CLASS,
                           preset_config("paper-iv"), seed=0)
    return summary, time.perf_counter() - t0


def test_3_benchmark_scenario_accuracy(verdict, benchmark_accuracy):
    summary, elapsed = benchmark_accuracy
    ok = summary.detection_accuracy >= ACCURACY_MIN and elapsed < ACCURACY_SECONDS
    verdict("3 benchmark accuracy", ok,
            f"accuracy {summary.detection_accuracy:.3f} (false alarms {summary.false_alarm_rate:.2f}, "
            f"power {summary.detection_rate:.2f}) over {2 * ACCURACY_PER_CLASS} trials, {elapsed:.0f}s")


def test_4_onset_rmse(verdict, benchmark_accuracy):
    summary, _ = benchmark_accuracy
    ok = summary.onset_rmse <= ONSET_RMSE_MAX and summary.median_abs_onset_error <= ONSET_MEDIAN_MAX
    verdict("4 onset error", ok,
            f"RMSE {summary.onset_rmse:.2f}, median |error| {summary.median_abs_onset_error:.1f}")


def test_5_projection_inflates_curve(verdict):
    cfg = preset_config("paper-iv")
    cmp = compare_projected_vs_original(preset_scenario("paper-iv"), DOMINANCE_TRIALS, cfg.jl_dim,
                                        cfg.epsilon, cfg, seed=0)
    ok = cmp.dominance_fraction >= DOMINANCE_MIN
    verdict("5 projected dominates original", ok,
            f"projected >= original on {cmp.dominance_fraction:.1%} of {cmp.t.size} grid points "
            f"(mean T original {cmp.original_mean.mean():.3f}, projected {cmp.projected_mean.mean():.3f})")


def test_6_oracle_equivalence(verdict):
    rng = np.random.default_rng(6)
    worst, checked, mean_mismatch = 0.0, 0, 0
    for i in range(ORACLE_SEQUENCES):
        N = int(rng.integers(6, 31))
        pts = rng.integers(0, 2, (N, 2, 6)).astype(float)
        if i % 2:
            pts = pts.reshape(N, -1) @ rng.normal(0, 1 / math.sqrt(5), (12, 5))
        mode = "sample" if i % 4 >= 2 else "euclidean"
        try:
            curve = statistic_curve(pts, 0.1, mode)
        except DegenerateVariance:
            continue
        ns, ref = naive.curve(list(pts), 0.1, mode)
        ref = np.asarray(ref)
        assert list(curve.n) == ns
        worst = max(worst, float(np.max(np.abs(curve.values - ref) / np.maximum(np.abs(ref), 1e-300))))
        checked += 1
        cand = pts[: int(rng.integers(1, N + 1))]
        mean_mismatch += not np.array_equal(frechet_mean(cand, "sample"), naive.mean_of(list(cand), "sample"))
    ok = worst <= ORACLE_RTOL and mean_mismatch == 0 and checked >= 0.95 * ORACLE_SEQUENCES
    verdict("6 oracle equivalence", ok,
            f"{checked} sequences, worst relative error {worst:.2e}, sample-mean mismatches {mean_mismatch}")


def test_7_jl_contract(verdict):
    rng = np.random.default_rng(7)
    violations, maps = 0, 0
    for trial in range(30):
        n, m = int(rng.integers(5, 80)), int(rng.integers(20, 120))
        x = rng.integers(0, 2, (n, m)).astype(float)
        k, eps = int(rng.integers(m // 2, m + 1)), float(rng.uniform(0.5, 0.95))
        try:
            jl = build_jl_map(m, k, eps, x, seed=trial, max_retries=30)
        except DistortionNotAchieved:
            continue
        maps += 1
        y = jl(x)
        i, j = np.triu_indices(n, 1)
        d = np.sum((x[i] - x[j]) ** 2, axis=1)
        e = np.sum((y[i] - y[j]) ** 2, axis=1)
        violations += int(np.sum((e < (1 - eps) * d - 1e-9) | (e > (1 + eps) * d + 1e-9)))
        assert np.allclose(pairwise_distortion(x, y, i, j), e[d > 0] / d[d > 0])
    x = rng.integers(0, 2, (60, 40)).astype(float)
    raw = statistic_curve(x, 0.1)
    ident = statistic_curve(JlMap.identity(40)(x), 0.1)
    rel = float(np.max(np.abs(ident.values - raw.values) / raw.values))
    ok = violations == 0 and maps >= 20 and rel <= IDENTITY_RTOL
    verdict("7 JL contract", ok, f"{maps} verified maps, {violations} bound violations, identity rel error {rel:.1e}")


def test_8_noise_robustness(verdict):
    snrs = [math.inf, 4.0, 2.0]
    curves = run_roc(preset_scenario("paper-iv", attack=True), snrs, ROC_TRIALS,
                     config=preset_config("paper-iv"), seed=0)
    a_inf, a4, a2 = (c.auc for c in curves)
    ok = a_inf >= a4 - AUC_SLACK and a4 >= a2 - AUC_SLACK and a_inf >= AUC_MIN
    verdict("8 noise robustness", ok, f"AUC inf={a_inf:.3f}, 4={a4:.3f}, 2={a2:.3f} ({ROC_TRIALS} trials/class)")
