"""Monte-Carlo experiment harness: calibration, accuracy, onset error, ROC,
and projected-versus-original statistic comparison.

Every trial draws its own integer seed from the master seed, so results are
independent of ``n_jobs`` and of the order trials finish in.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
import math
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import stats

from .detector import DetectConfig, cached_bridge_quantile, detect
from .errors import InvalidParameters, InvalidScenario
from .frechet import as_points, statistic_curve
from .projection import build_jl_map
from .simulate import AttackScenario, apply_observation_noise, generate_sequence, noise_rng

__all__ = [
    "TrialRecord",
    "ExperimentSummary",
    "CalibrationResult",
    "RocCurve",
    "ProjectionComparison",
    "trial_seeds",
    "binomial_band",
    "roc_curve",
    "run_calibration",
    "run_accuracy",
    "run_onset_rmse",
    "run_roc",
    "compare_projected_vs_original",
]

SequenceSource = Union[AttackScenario, Callable[[int], object]]


def trial_seeds(seed: int, count: int, stream: int = 0) -> list:
    """``count`` distinct 32-bit seeds derived from ``(seed, stream)``."""
    state = np.random.SeedSequence([int(seed), int(stream)]).generate_state(count)
    return [int(s) for s in state]


def _make_sequence(source: SequenceSource, seed: int):
    if isinstance(source, AttackScenario):
        return generate_sequence(source.with_seed(seed))
    return source(seed)


def _map(fn, jobs, n_jobs):
    if n_jobs is None or n_jobs <= 1:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(n_jobs) as pool:
        return list(pool.map(fn, *zip(*jobs)))


@dataclass(frozen=True)
class TrialRecord:
    """One labelled trial; ``onset_estimate`` is the curve arg-max even when not detected."""

    label: int
    seed: int
    detected: bool
    max_scaled_stat: float
    threshold: float
    onset_estimate: int
    tau: Optional[int] = None
    snr: Optional[float] = None

    @property
    def correct(self) -> bool:
        return self.detected == bool(self.label)


def _detect_trial(source, seed, config, snr=math.inf):
    seq = _make_sequence(source, seed)
    if not math.isinf(snr):
        seq = apply_observation_noise(seq, snr, noise_rng(seed))
    cfg = replace(config, jl_seed=seed) if config.jl_dim is not None else config
    report = detect(seq, cfg)
    truth = getattr(seq, "truth", None)
    attack = bool(truth and truth.attack)
    return TrialRecord(
        label=int(attack),
        seed=seed,
        detected=report.detected,
        max_scaled_stat=report.max_scaled_stat,
        threshold=report.threshold,
        onset_estimate=report.curve.argmax(),
        tau=truth.tau if attack else None,
        snr=None if math.isinf(snr) else snr,
    )


@dataclass(frozen=True)
class CalibrationResult:
    rate: float
    rejections: int
    trials: int
    alpha: float
    ci_low: float
    ci_high: float
    records: tuple = ()

    def within(self, band) -> bool:
        return band[0] <= self.rate <= band[1]


def binomial_band(alpha: float, trials: int, level: float = 0.99) -> tuple:
    """Central ``level`` interval of the rejection fraction when the true rate is ``alpha``."""
    lo, hi = stats.binom.interval(level, trials, alpha)
    return lo / trials, hi / trials


def run_calibration(
    h0_source: SequenceSource,
    trials: int,
    alpha: float = 0.05,
    config: Optional[DetectConfig] = None,
    seed: int = 0,
    n_jobs: int = 1,
) -> CalibrationResult:
    """False-alarm rate of :func:`detect` over independent no-attack sequences.

    ``h0_source`` is either an :class:`AttackScenario` (its attack flag is
    cleared) or a picklable callable mapping an integer seed to a sequence.
    The returned interval is the exact 95% Clopper-Pearson interval.
    """
    if trials < 50:
        raise InvalidParameters(f"calibration needs at least 50 trials, got {trials}")
    if isinstance(h0_source, AttackScenario):
        h0_source = h0_source.null()
    config = replace(config or DetectConfig(), alpha=alpha)
    seeds = trial_seeds(seed, trials)
    records = _map(_detect_trial, [(h0_source, s, config) for s in seeds], n_jobs)
    k = sum(r.detected for r in records)
    ci = stats.binomtest(k, trials, alpha).proportion_ci(0.95, method="exact")
    return CalibrationResult(k / trials, k, trials, alpha, float(ci.low), float(ci.high), tuple(records))


@dataclass(frozen=True)
class ExperimentSummary:
    detection_accuracy: float
    onset_rmse: float
    median_abs_onset_error: float
    false_alarm_rate: Optional[float]
    detection_rate: Optional[float]
    records: tuple = ()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["records"] = [asdict(r) for r in self.records]
        return d


def _summarise(records) -> ExperimentSummary:
    h0 = [r for r in records if r.label == 0]
    h1 = [r for r in records if r.label == 1]
    acc = float(np.mean([r.correct for r in records]))
    if h1:
        err = np.array([r.onset_estimate - r.tau for r in h1], dtype=np.float64)
        rmse = float(np.sqrt(np.mean(err**2)))
        med = float(np.median(np.abs(err)))
    else:
        rmse = med = float("nan")
    return ExperimentSummary(
        detection_accuracy=acc,
        onset_rmse=rmse,
        median_abs_onset_error=med,
        false_alarm_rate=float(np.mean([r.detected for r in h0])) if h0 else None,
        detection_rate=float(np.mean([r.detected for r in h1])) if h1 else None,
        records=tuple(records),
    )


def run_accuracy(
    h1_scenario: AttackScenario,
    trials_per_class: int,
    config: Optional[DetectConfig] = None,
    seed: int = 0,
    n_jobs: int = 1,
) -> ExperimentSummary:
    """Balanced labelled trials: accuracy of the decision rule, onset error on attacks."""
    if trials_per_class < 1:
        raise InvalidParameters("trials_per_class must be positive")
    if not h1_scenario.attack:
        raise InvalidScenario("h1_scenario must describe an attack")
    config = config or DetectConfig()
    jobs = [(h1_scenario.null(), s, config) for s in trial_seeds(seed, trials_per_class, 0)]
    jobs += [(h1_scenario, s, config) for s in trial_seeds(seed, trials_per_class, 1)]
    return _summarise(_map(_detect_trial, jobs, n_jobs))


def run_onset_rmse(
    h1_scenario: AttackScenario,
    trials: int,
    config: Optional[DetectConfig] = None,
    seed: int = 0,
    n_jobs: int = 1,
) -> ExperimentSummary:
    """Root mean squared error of the onset estimate over attacked sequences.

    ``detection_accuracy`` here is the fraction of attacks detected.
    """
    if trials < 1:
        raise InvalidParameters("trials must be positive")
    if not h1_scenario.attack:
        raise InvalidScenario("h1_scenario must describe an attack")
    config = config or DetectConfig()
    jobs = [(h1_scenario, s, config) for s in trial_seeds(seed, trials, 1)]
    return _summarise(_map(_detect_trial, jobs, n_jobs))


@dataclass(frozen=True)
class RocCurve:
    """ROC points ordered by decreasing threshold (so FPR is non-decreasing)."""

    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auc: float
    config: dict = field(default_factory=dict)

    @property
    def points(self) -> list:
        return list(zip(self.fpr.tolist(), self.tpr.tolist(), self.thresholds.tolist()))


def roc_curve(h0_scores, h1_scores, thresholds=None, config=None) -> RocCurve:
    """Sweep ``score >= threshold`` over thresholds and integrate by trapezoids.

    ``thresholds`` may be None (every distinct pooled score), an int (that
    many pooled-score quantiles) or explicit values. ``+inf`` is always added
    so the curve starts at (0, 0).
    """
    h0 = np.asarray(h0_scores, dtype=np.float64)
    h1 = np.asarray(h1_scores, dtype=np.float64)
    if h0.size == 0 or h1.size == 0:
        raise InvalidParameters("both classes need at least one score")
    pooled = np.concatenate([h0, h1])
    if thresholds is None:
        thr = np.unique(pooled)
    elif isinstance(thresholds, (int, np.integer)):
        thr = np.unique(np.quantile(pooled, np.linspace(0.0, 1.0, int(thresholds))))
    else:
        thr = np.unique(np.asarray(thresholds, dtype=np.float64))
    thr = np.unique(np.append(thr, [np.inf, pooled.min()]))[::-1]
    h0s, h1s = np.sort(h0), np.sort(h1)
    fpr = 1.0 - np.searchsorted(h0s, thr, side="left") / h0.size
    tpr = 1.0 - np.searchsorted(h1s, thr, side="left") / h1.size
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    return RocCurve(fpr, tpr, thr, auc, dict(config or {}))


def _score_trial(source, seed, config, snr):
    return _detect_trial(source, seed, config, snr).max_scaled_stat


def run_roc(
    scenario: AttackScenario,
    snr_list: Sequence[float],
    trials_per_class: int,
    threshold_sweep=None,
    config: Optional[DetectConfig] = None,
    seed: int = 0,
    n_jobs: int = 1,
) -> list:
    """ROC of the maximum scaled statistic for each observation SNR.

    Negatives come from ``scenario.null()``, positives from ``scenario``
    itself (pass a no-attack scenario for a no-signal baseline). The same
    trial seeds are reused for every SNR.
    """
    if trials_per_class < 1:
        raise InvalidParameters("trials_per_class must be positive")
    config = config or DetectConfig()
    s0 = trial_seeds(seed, trials_per_class, 0)
    s1 = trial_seeds(seed, trials_per_class, 1)
    curves = []
    for snr in snr_list:
        snr = float(snr)
        jobs = [(scenario.null(), s, config, snr) for s in s0] + [(scenario, s, config, snr) for s in s1]
        scores = _map(_score_trial, jobs, n_jobs)
        meta = {
            "snr": None if math.isinf(snr) else snr,
            "trials_per_class": trials_per_class,
            "seed": seed,
            "scenario": asdict(scenario),
            "detect_config": config.to_dict(),
        }
        curves.append(roc_curve(scores[:trials_per_class], scores[trials_per_class:], threshold_sweep, meta))
    return curves


@dataclass(frozen=True)
class ProjectionComparison:
    """Trial-averaged scaled curves on raw and projected data."""

    t: np.ndarray
    original_mean: np.ndarray
    projected_mean: np.ndarray
    dominance_fraction: float
    argmax_original: tuple
    argmax_projected: tuple
    empirical_epsilon: tuple
    k: Optional[int]
    epsilon: float
    false_alarm_original: float = float("nan")
    false_alarm_projected: float = float("nan")


def _paired_trial(source, seed, k, epsilon, delta, mean_mode, max_retries):
    seq = _make_sequence(source, seed)
    x, _ = as_points(seq)
    if k is None:
        jl = build_jl_map(x.shape[1], x.shape[1], epsilon, x, seed=seed, method="identity")
    else:
        jl = build_jl_map(x.shape[1], k, epsilon, x, seed=seed, max_retries=max_retries)
    original = statistic_curve(x, delta, mean_mode)
    projected = statistic_curve(x @ jl.matrix.T, delta, mean_mode)
    return original, projected, jl.empirical_epsilon


def compare_projected_vs_original(
    source: SequenceSource,
    trials: int,
    k: Optional[int],
    epsilon: float,
    config: Optional[DetectConfig] = None,
    seed: int = 0,
    n_jobs: int = 1,
) -> ProjectionComparison:
    """Statistic curves on the same data before and after projection.

    ``k=None`` uses the identity map. The dominance fraction is the share of
    grid points where the averaged projected curve is at least the averaged
    original curve.
    """
    if trials < 20:
        raise InvalidParameters(f"comparison needs at least 20 trials, got {trials}")
    config = config or DetectConfig()
    jobs = [(source, s, k, epsilon, config.delta, config.mean_mode, config.jl_retries)
            for s in trial_seeds(seed, trials, 2)]
    results = _map(_paired_trial, jobs, n_jobs)
    orig = np.array([r[0].scaled for r in results])
    proj = np.array([r[1].scaled for r in results])
    mo, mp = orig.mean(axis=0), proj.mean(axis=0)
    N = results[0][0].N
    threshold, _ = cached_bridge_quantile(config.alpha, config.delta, config.quantile_grid or N,
                                          config.quantile_paths, config.seed)
    return ProjectionComparison(
        t=results[0][0].t,
        original_mean=mo,
        projected_mean=mp,
        dominance_fraction=float(np.mean(mp >= mo)),
        argmax_original=tuple(r[0].argmax() for r in results),
        argmax_projected=tuple(r[1].argmax() for r in results),
        empirical_epsilon=tuple(r[2] for r in results),
        k=k,
        epsilon=epsilon,
        false_alarm_original=float(np.mean(orig.max(axis=1) >= threshold.quantile)),
        false_alarm_projected=float(np.mean(proj.max(axis=1) >= threshold.quantile)),
    )
