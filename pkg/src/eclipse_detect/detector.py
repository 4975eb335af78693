"""Threshold calibration and the offline eclipse-attack decision rule.

Under no attack the scaled statistic behaves like the square of a
standardized Brownian bridge ``B(t) / sqrt(t (1 - t))``, a Gaussian process
with unit variance and correlation
``sqrt(t1 (1 - t2) / (t2 (1 - t1)))`` for ``t1 <= t2``. The detection
threshold is the Monte-Carlo ``(1 - alpha)`` quantile of its squared
maximum over the trimmed grid ``{n / grid : delta < n / grid < 1 - delta}``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
import functools
import hashlib
import json
import math
import os
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .errors import InvalidParameters, WindowEmpty
from .frechet import MEAN_MODES, StatisticCurve, as_points, statistic_curve
from .graph import GraphSequence
from .projection import JlMap, ProjectedSequence, build_jl_map

__all__ = [
    "BridgeQuantileTable",
    "DetectConfig",
    "DetectionReport",
    "bridge_grid",
    "sample_standardized_bridge",
    "simulate_bridge_quantile",
    "cached_bridge_quantile",
    "detect",
    "estimate_onset",
]

PATH_CHUNK = 1000


def bridge_grid(grid_points: int, delta: float) -> np.ndarray:
    n = np.arange(1, grid_points)
    t = n / grid_points
    return t[(t > delta) & (t < 1.0 - delta)]


def _bridge_chunk(grid_points, mask, t, n_paths, rng):
    steps = rng.standard_normal((n_paths, grid_points)) / math.sqrt(grid_points)
    w = np.cumsum(steps, axis=1)  # w[:, i] = W((i + 1) / grid)
    b = w[:, :-1][:, mask] - t * w[:, -1:]
    return b / np.sqrt(t * (1.0 - t))


def sample_standardized_bridge(grid_points: int, delta: float, n_paths: int, rng):
    """Draw standardized bridge paths on the trimmed grid.

    Returns ``(t, Z)`` with ``Z`` of shape ``(n_paths, len(t))``.
    """
    t_all = np.arange(1, grid_points) / grid_points
    mask = (t_all > delta) & (t_all < 1.0 - delta)
    t = t_all[mask]
    return t, _bridge_chunk(grid_points, mask, t, n_paths, rng)


@dataclass(frozen=True)
class BridgeQuantileTable:
    """Monte-Carlo quantile of ``max_t B(t)^2`` over the trimmed grid."""

    alpha: float
    delta: float
    grid_points: int
    n_paths: int
    seed: int
    quantile: float

    def key(self) -> str:
        return _cache_key(self.alpha, self.delta, self.grid_points, self.n_paths, self.seed)

    def to_dict(self) -> dict:
        return asdict(self)


def _check_bridge_params(alpha, delta, grid_points, n_paths):
    if not 0.0 < alpha < 1.0:
        raise InvalidParameters(f"alpha must lie in (0, 1), got {alpha}")
    if not 0.0 < delta < 0.5:
        raise InvalidParameters(f"delta must lie in (0, 0.5), got {delta}")
    if grid_points < 10:
        raise InvalidParameters("grid_points must be at least 10")
    if n_paths < 1000:
        raise InvalidParameters("n_paths must be at least 1000")
    if bridge_grid(grid_points, delta).size == 0:
        raise WindowEmpty(f"delta={delta} leaves no grid point for grid={grid_points}")


def simulate_bridge_maxima(delta: float, grid_points: int, n_paths: int, seed: int) -> np.ndarray:
    """Per-path ``max_t Z(t)^2``; paths come in chunks with spawned seeds."""
    t_all = np.arange(1, grid_points) / grid_points
    mask = (t_all > delta) & (t_all < 1.0 - delta)
    t = t_all[mask]
    sizes = [PATH_CHUNK] * (n_paths // PATH_CHUNK)
    if n_paths % PATH_CHUNK:
        sizes.append(n_paths % PATH_CHUNK)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    out = []
    for size, ss in zip(sizes, children):
        z = _bridge_chunk(grid_points, mask, t, size, np.random.default_rng(ss))
        out.append(np.max(z * z, axis=1))
    return np.concatenate(out)


def simulate_bridge_quantile(
    alpha: float = 0.05,
    delta: float = 0.1,
    grid_points: int = 1000,
    n_paths: int = 10_000,
    seed: int = 0,
) -> BridgeQuantileTable:
    """Empirical ``(1 - alpha)`` quantile of the squared standardized-bridge maximum."""
    _check_bridge_params(alpha, delta, grid_points, n_paths)
    maxima = simulate_bridge_maxima(delta, grid_points, n_paths, seed)
    q = float(np.quantile(maxima, 1.0 - alpha))
    return BridgeQuantileTable(alpha, delta, grid_points, n_paths, seed, q)


def _cache_key(alpha, delta, grid_points, n_paths, seed):
    raw = json.dumps([float(alpha), float(delta), int(grid_points), int(n_paths), int(seed)])
    return hashlib.sha256(raw.encode()).hexdigest()[:16]


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "eclipse_detect"


@functools.lru_cache(maxsize=256)
def _memo_quantile(alpha, delta, grid_points, n_paths, seed):
    return simulate_bridge_quantile(alpha, delta, grid_points, n_paths, seed)


def cached_bridge_quantile(
    alpha: float,
    delta: float,
    grid_points: int,
    n_paths: int = 10_000,
    seed: int = 0,
    cache_dir=None,
) -> tuple:
    """Quantile table from memory, then ``cache_dir``, else simulated and stored.

    Returns ``(table, hit)`` where ``hit`` says whether the value was cached on disk.
    """
    args = (float(alpha), float(delta), int(grid_points), int(n_paths), int(seed))
    if cache_dir is None:
        return _memo_quantile(*args), False
    path = Path(cache_dir) / f"quantile-{_cache_key(*args)}.json"
    if path.exists():
        with open(path) as fh:
            d = json.load(fh)
        table = BridgeQuantileTable(**d)
        if (table.alpha, table.delta, table.grid_points, table.n_paths, table.seed) == args:
            return table, True
    table = _memo_quantile(*args)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w") as fh:
        json.dump(table.to_dict(), fh)
    os.replace(tmp, path)
    return table, False


@dataclass(frozen=True)
class DetectConfig:
    """Settings for :func:`detect`.

    ``jl_dim=None`` skips projection. ``quantile_grid=None`` calibrates on a
    grid matching the length of the analysed sequence. ``seed`` drives the
    bridge simulation and, unless ``jl_seed`` is given, the projection.
    """

    alpha: float = 0.05
    delta: float = 0.1
    jl_dim: Optional[int] = None
    epsilon: float = 0.5
    jl_retries: int = 20
    mean_mode: str = "euclidean"
    quantile_paths: int = 10_000
    quantile_grid: Optional[int] = None
    seed: int = 0
    jl_seed: Optional[int] = None

    def validate(self) -> "DetectConfig":
        if self.mean_mode not in MEAN_MODES:
            raise InvalidParameters(f"mean_mode must be one of {MEAN_MODES}")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidParameters("alpha must lie in (0, 1)")
        if not 0.0 < self.delta < 0.5:
            raise InvalidParameters("delta must lie in (0, 0.5)")
        if self.jl_dim is not None and self.jl_dim < 1:
            raise InvalidParameters("jl_dim must be positive")
        return self

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class DetectionReport:
    detected: bool
    tau_hat: Optional[int]
    max_scaled_stat: float
    threshold: float
    curve: StatisticCurve
    config: DetectConfig
    quantile: BridgeQuantileTable
    jl_map: Optional[JlMap] = None
    source: dict = field(default_factory=dict)

    def verdict(self) -> str:
        if self.detected:
            return f"attack detected at n*={self.tau_hat}"
        return "no attack detected"

    def to_dict(self, include_curve: bool = True) -> dict:
        d = {
            "version": __version__,
            "detected": self.detected,
            "tau_hat": self.tau_hat,
            "max_scaled_stat": self.max_scaled_stat,
            "threshold": self.threshold,
            "config": self.config.to_dict(),
            "quantile": self.quantile.to_dict(),
            "jl_map": None if self.jl_map is None else self.jl_map.to_dict(),
            "mean_mode": self.curve.mean_mode,
            "N": self.curve.N,
            "sigma_sq": self.curve.sigma_sq,
            "pooled_variance": self.curve.pooled_variance,
            "source": self.source,
        }
        if include_curve:
            d["curve"] = {
                "n": self.curve.n.tolist(),
                "S": self.curve.values.tolist(),
                "T": self.curve.scaled.tolist(),
            }
        return d


def estimate_onset(curve: StatisticCurve) -> int:
    """Admissible split with the largest statistic (smallest on ties)."""
    return curve.argmax()


def _source_info(seq) -> dict:
    info = {}
    for name in ("p", "q", "rows_used", "seed", "snr"):
        val = getattr(seq, name, None)
        if val is not None:
            info[name] = None if isinstance(val, float) and math.isinf(val) else val
    truth = getattr(seq, "truth", None)
    if truth is not None:
        info["truth"] = truth.to_dict()
    return info


def prepare_points(seq, config: DetectConfig):
    """Vectorize and, if configured, project; returns ``(points, jl_map)``."""
    if isinstance(seq, ProjectedSequence):
        return seq.vectors, seq.map
    x, _ = as_points(seq)
    if config.jl_dim is None:
        return x, None
    jl_seed = config.seed if config.jl_seed is None else config.jl_seed
    jl = build_jl_map(x.shape[1], config.jl_dim, config.epsilon, x,
                      seed=jl_seed, max_retries=config.jl_retries)
    return x @ jl.matrix.T, jl


def detect(seq, config: Optional[DetectConfig] = None, cache_dir=None) -> DetectionReport:
    """Run the full offline test on one sequence.

    Optional projection, statistic curve, comparison of the maximum scaled
    statistic with the bridge quantile. Detection means
    ``max_scaled_stat >= threshold``; ``tau_hat`` is then the arg-max split.
    """
    config = (config or DetectConfig()).validate()
    points, jl = prepare_points(seq, config)
    curve = statistic_curve(points, config.delta, config.mean_mode)
    grid = config.quantile_grid or curve.N
    table, _ = cached_bridge_quantile(config.alpha, config.delta, grid,
                                      config.quantile_paths, config.seed, cache_dir)
    stat = curve.max_scaled
    detected = bool(stat >= table.quantile)
    return DetectionReport(
        detected=detected,
        tau_hat=estimate_onset(curve) if detected else None,
        max_scaled_stat=stat,
        threshold=table.quantile,
        curve=curve,
        config=config,
        quantile=table,
        jl_map=jl,
        source=_source_info(seq),
    )


def with_overrides(config: DetectConfig, **kw) -> DetectConfig:
    return replace(config, **{k: v for k, v in kw.items() if v is not None})
