"""Fréchet means, variances and the two-segment change statistic.

Two candidate sets for the Fréchet mean are supported:

``"euclidean"``
    The arithmetic mean of the vectorized points, which is the exact
    minimiser of the summed squared Frobenius/Euclidean distance over the
    ambient real space.
``"sample"``
    The observed point with the smallest summed squared distance to the
    segment (lowest index on ties).

For a split after ``n`` of ``N`` points the statistic is::

    S[n] = n (N - n) / (N^2 sigma2) * ((V1 - V2)^2 + (V1c - V1 + V2c - V2)^2)

where ``V1``/``V2`` are the segment Fréchet variances, ``V1c``/``V2c`` the
mean squared distances of each segment to the *other* segment's mean, and
``sigma2`` the pooled variance of the squared distances to the pooled mean.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateVariance, DimensionMismatch, EmptySegment, InvalidParameters, WindowEmpty
from .graph import AdjacencyMatrix, GraphSequence

__all__ = [
    "MEAN_MODES",
    "SegmentStats",
    "StatisticCurve",
    "as_points",
    "frechet_mean",
    "segment_stats",
    "pooled_sigma_sq",
    "statistic_curve",
    "admissible_splits",
]

MEAN_MODES = ("euclidean", "sample")
DEGENERATE_SIGMA_SQ = 1e-12
# Candidates whose cost is within this fraction of the cost scale count as
# tied, so the lowest index wins regardless of rounding in the cost formula.
TIE_RTOL = 1e-10


def as_points(obj):
    """Return ``(X, shape)``: an ``(N, m)`` float64 array and the per-point shape."""
    if isinstance(obj, GraphSequence):
        return obj.vectors(), obj.data.shape[1:]
    vectors = getattr(obj, "vectors", None)
    if isinstance(vectors, np.ndarray):  # ProjectedSequence
        return np.asarray(vectors, dtype=np.float64), vectors.shape[1:]
    if isinstance(obj, (list, tuple)) and obj and isinstance(obj[0], AdjacencyMatrix):
        shapes = {a.shape for a in obj}
        if len(shapes) != 1:
            raise DimensionMismatch(f"points disagree on shape: {sorted(shapes)}")
        arr = np.stack([a.entries for a in obj])
    else:
        arr = np.asarray(obj)
    if arr.ndim == 0:
        raise InvalidParameters("expected a sequence of points")
    if arr.ndim == 1:
        arr = arr[:, None]
    width = int(np.prod(arr.shape[1:]))
    return arr.reshape(arr.shape[0], width).astype(np.float64), arr.shape[1:]


def _check_mode(mode):
    if mode not in MEAN_MODES:
        raise InvalidParameters(f"mean mode must be one of {MEAN_MODES}, got {mode!r}")


def _first_min(cost, scale):
    """Index of the first entry within ``TIE_RTOL * scale`` of the row minimum."""
    low = np.min(cost, axis=-1, keepdims=True)
    return np.argmax(cost <= low + TIE_RTOL * np.asarray(scale)[..., None], axis=-1)


def _mean_vector(x, mode):
    if mode == "euclidean":
        return x.mean(axis=0)
    sq = np.einsum("ij,ij->i", x, x)
    total = x.sum(axis=0)
    # sum_i |x_i - x_c|^2 = sum_i |x_i|^2 + n |x_c|^2 - 2 <sum_i x_i, x_c>
    cost = x.shape[0] * sq - 2.0 * (x @ total)
    scale = x.shape[0] * float(sq.max()) + float(sq.sum())
    return x[int(_first_min(cost, scale))].copy()


def frechet_mean(points, mode: str = "euclidean") -> np.ndarray:
    """Fréchet mean of ``points`` under squared Frobenius distance.

    Returns an array with the shape of a single point.
    """
    _check_mode(mode)
    x, shape = as_points(points)
    if x.shape[0] == 0:
        raise EmptySegment("cannot take the mean of an empty segment")
    return _mean_vector(x, mode).reshape(shape)


@dataclass(frozen=True)
class SegmentStats:
    mean: np.ndarray
    variance: float
    contaminated_variance: float


def segment_stats(points, other_segment_mean, mode: str = "euclidean") -> SegmentStats:
    """Fréchet variance of a segment and its mean squared distance to another mean."""
    _check_mode(mode)
    x, shape = as_points(points)
    if x.shape[0] == 0:
        raise EmptySegment("segment is empty")
    other = np.asarray(other_segment_mean, dtype=np.float64)
    if other.size != x.shape[1]:
        raise DimensionMismatch(f"other mean has {other.size} entries, points have {x.shape[1]}")
    mu = _mean_vector(x, mode)
    d_own = x - mu
    d_other = x - other.ravel()
    return SegmentStats(
        mean=mu.reshape(shape),
        variance=float(np.mean(np.einsum("ij,ij->i", d_own, d_own))),
        contaminated_variance=float(np.mean(np.einsum("ij,ij->i", d_other, d_other))),
    )


def _pooled(x, mode):
    mu = _mean_vector(x, mode)
    diff = x - mu
    d2 = np.einsum("ij,ij->i", diff, diff)
    v = float(d2.mean())
    s2 = float(np.mean(d2 * d2) - v * v)
    return mu, v, max(s2, 0.0)


def pooled_sigma_sq(points, mode: str = "euclidean") -> float:
    """Empirical variance of ``d^2(x_i, pooled mean)``: ``mean(d^4) - V^2``."""
    _check_mode(mode)
    x, _ = as_points(points)
    if x.shape[0] < 2:
        raise InvalidParameters("need at least 2 points")
    return _pooled(x, mode)[2]


def admissible_splits(N: int, delta: float) -> np.ndarray:
    """Split points ``n`` in ``1..N-1`` with ``delta < n/N < 1 - delta``."""
    if not 0.0 < delta < 0.5:
        raise InvalidParameters(f"delta must lie in (0, 0.5), got {delta}")
    n = np.arange(1, N)
    t = n / N
    return n[(t > delta) & (t < 1.0 - delta)]


@dataclass(frozen=True, eq=False)
class StatisticCurve:
    """Change statistic over the admissible split points.

    ``values[i]`` is ``S`` at split ``n[i]`` and ``scaled[i] = N * values[i]``.
    ``variance_part`` and ``mean_part`` split ``scaled`` into its two
    squared terms.
    """

    n: np.ndarray
    values: np.ndarray
    scaled: np.ndarray
    N: int
    delta: float
    sigma_sq: float
    pooled_mean: np.ndarray
    pooled_variance: float
    mean_mode: str
    variance_part: Optional[np.ndarray] = None
    mean_part: Optional[np.ndarray] = None

    @property
    def t(self) -> np.ndarray:
        return self.n / self.N

    @property
    def window(self) -> tuple:
        return (self.delta, 1.0 - self.delta)

    @property
    def max_scaled(self) -> float:
        return float(self.scaled.max())

    def argmax(self) -> int:
        """Split maximising the statistic; the smallest one on ties."""
        if self.n.size == 0:
            raise WindowEmpty("curve has no admissible points")
        return int(self.n[int(np.argmax(self.values))])

    def scaled_at(self, t) -> np.ndarray:
        """Step-interpolated scaled statistic: ``N * S[n]`` for ``N t`` in ``[n, n+1)``.

        Returns NaN where ``floor(N t)`` is not an admissible split.
        """
        t = np.asarray(t, dtype=np.float64)
        k = np.floor(self.N * t + 1e-9).astype(np.int64)
        pos = np.searchsorted(self.n, k)
        pos_c = np.clip(pos, 0, self.n.size - 1)
        hit = (self.n.size > 0) & (self.n[pos_c] == k)
        return np.where(hit, self.scaled[pos_c], np.nan)


def _euclidean_parts(x, n):
    N = x.shape[0]
    x = x - x.mean(axis=0)  # distances are translation invariant
    cs = np.cumsum(x, axis=0)
    css = np.cumsum(np.einsum("ij,ij->i", x, x))
    tot, tots = cs[-1], css[-1]
    nn = n.astype(np.float64)
    left = cs[n - 1] / nn[:, None]
    right = (tot - cs[n - 1]) / (N - nn)[:, None]
    ll = np.einsum("ij,ij->i", left, left)
    rr = np.einsum("ij,ij->i", right, right)
    lr = np.einsum("ij,ij->i", left, right)
    mean_sq_left = css[n - 1] / nn
    mean_sq_right = (tots - css[n - 1]) / (N - nn)
    v1 = mean_sq_left - ll
    v2 = mean_sq_right - rr
    v1c = mean_sq_left - 2.0 * lr + rr
    v2c = mean_sq_right - 2.0 * lr + ll
    return v1, v2, v1c, v2c


def _sample_parts(x, n):
    N = x.shape[0]
    sq = np.einsum("ij,ij->i", x, x)
    cs = np.cumsum(x, axis=0)
    css = np.cumsum(sq)
    tx = x @ cs[-1]
    g = cs[n - 1] @ x.T  # <sum of first n points, x_c>
    nn = n.astype(np.float64)[:, None]
    cost_left = css[n - 1][:, None] + nn * sq[None, :] - 2.0 * g
    cost_right = (css[-1] - css[n - 1])[:, None] + (N - nn) * sq[None, :] - 2.0 * (tx[None, :] - g)
    cols = np.arange(N)[None, :]
    in_left = cols < n[:, None]
    big = N * float(sq.max()) + css[-1]
    c1 = _first_min(np.where(in_left, cost_left, np.inf), big)
    c2 = _first_min(np.where(in_left, np.inf, cost_right), big)
    rows = np.arange(n.size)
    v1 = cost_left[rows, c1] / nn[:, 0]
    v1c = cost_left[rows, c2] / nn[:, 0]
    v2 = cost_right[rows, c2] / (N - nn[:, 0])
    v2c = cost_right[rows, c1] / (N - nn[:, 0])
    return v1, v2, v1c, v2c


def statistic_curve(points, delta: float = 0.1, mode: str = "euclidean") -> StatisticCurve:
    """Evaluate the change statistic at every admissible split.

    Parameters
    ----------
    points : GraphSequence, ProjectedSequence, list of AdjacencyMatrix or array_like
        The ordered observations; arrays are read as ``(N, ...)``.
    delta : float
        Trimming; only splits with ``delta < n/N < 1 - delta`` are used.
    mode : {"euclidean", "sample"}
        Candidate set for every Fréchet mean involved.

    Raises
    ------
    WindowEmpty
        No admissible split.
    DegenerateVariance
        Pooled variance of squared distances below 1e-12 (e.g. a constant sequence).
    """
    _check_mode(mode)
    x, shape = as_points(points)
    N = x.shape[0]
    if N < 4:
        raise InvalidParameters(f"need at least 4 points, got {N}")
    n = admissible_splits(N, delta)
    if n.size == 0:
        raise WindowEmpty(f"delta={delta} leaves no split for N={N}")
    mu, v, s2 = _pooled(x, mode)
    if s2 < DEGENERATE_SIGMA_SQ:
        raise DegenerateVariance(f"pooled variance of squared distances is {s2:.3g}")

    v1, v2, v1c, v2c = _euclidean_parts(x, n) if mode == "euclidean" else _sample_parts(x, n)
    nn = n.astype(np.float64)
    weight = nn * (N - nn) / (N * N * s2)
    var_term = weight * (v1 - v2) ** 2
    mean_term = weight * (v1c - v1 + v2c - v2) ** 2
    values = var_term + mean_term
    for arr in (n, values, var_term, mean_term):
        arr.setflags(write=False)
    scaled = N * values
    scaled.setflags(write=False)
    return StatisticCurve(
        n=n, values=values, scaled=scaled, N=N, delta=delta, sigma_sq=s2,
        pooled_mean=mu.reshape(shape), pooled_variance=v, mean_mode=mode,
        variance_part=N * var_term, mean_part=N * mean_term,
    )
