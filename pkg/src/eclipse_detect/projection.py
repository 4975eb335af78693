"""Johnson-Lindenstrauss projection of vectorized snapshots.

Maps are Gaussian with entries ``N(0, 1/k)`` and are accepted only after the
two-sided squared-distance bound has been checked on the dataset they will
be applied to. The matrix stream and the pair-sampling stream are separate
children of the map seed, so ``(seed, k, m, attempts)`` regenerates a map.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Optional
import warnings

import numpy as np

from .errors import DimensionMismatch, DistortionNotAchieved, InvalidEpsilon, InvalidParameters
from .graph import GraphSequence, GroundTruth

__all__ = [
    "JlMap",
    "ProjectedSequence",
    "min_jl_dimension",
    "build_jl_map",
    "project_sequence",
    "pairwise_distortion",
]

# all pairs are checked up to this many; beyond it a random subset is used
ALL_PAIRS_LIMIT = 2_000_000
SAMPLED_PAIRS = 200_000


def min_jl_dimension(epsilon: float, n_points: int) -> int:
    """Smallest ``k`` with ``k >= 24 / (3 eps^2 - 2 eps^3) * ln(n_points)``."""
    if not 0.0 < epsilon < 1.0:
        raise InvalidEpsilon(f"epsilon must lie in (0, 1), got {epsilon}")
    if n_points < 2:
        raise InvalidParameters("n_points must be at least 2")
    bound = 24.0 / (3 * epsilon**2 - 2 * epsilon**3) * math.log(n_points)
    return math.ceil(bound)


@dataclass(frozen=True, eq=False)
class JlMap:
    """Linear map ``x -> matrix @ x`` from R^m to R^k.

    ``empirical_epsilon`` is the largest observed ``| |f(x)-f(y)|^2 / |x-y|^2 - 1 |``
    over the checked pairs; ``verified`` means it did not exceed ``epsilon``.
    """

    matrix: np.ndarray
    epsilon: float
    seed: Optional[int] = None
    verified: bool = False
    empirical_epsilon: float = float("nan")
    attempts: int = 1
    pairs_checked: int = 0
    method: str = "gaussian"

    @property
    def k(self) -> int:
        return self.matrix.shape[0]

    @property
    def m(self) -> int:
        return self.matrix.shape[1]

    @classmethod
    def identity(cls, m: int, epsilon: float = 0.5) -> "JlMap":
        return cls(np.eye(m), epsilon, verified=True, empirical_epsilon=0.0,
                   attempts=0, method="identity")

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.m:
            raise DimensionMismatch(f"expected vectors of length {self.m}, got {x.shape[-1]}")
        return x @ self.matrix.T

    def to_dict(self, include_matrix: bool = False) -> dict:
        d = {
            "method": self.method,
            "k": self.k,
            "m": self.m,
            "epsilon": self.epsilon,
            "seed": self.seed,
            "verified": self.verified,
            "empirical_epsilon": self.empirical_epsilon,
            "attempts": self.attempts,
            "pairs_checked": self.pairs_checked,
        }
        if include_matrix:
            d["matrix"] = self.matrix.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "JlMap":
        if "matrix" in d:
            matrix = np.asarray(d["matrix"], dtype=np.float64)
        elif d.get("method") == "identity":
            matrix = np.eye(d["m"])
        else:
            matrix = _gaussian_matrices(d["seed"], d["k"], d["m"], d["attempts"])[-1]
        return cls(
            matrix, d["epsilon"], d.get("seed"), d.get("verified", False),
            d.get("empirical_epsilon", float("nan")), d.get("attempts", 1),
            d.get("pairs_checked", 0), d.get("method", "gaussian"),
        )


def _streams(seed):
    matrix_ss, pairs_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(matrix_ss), np.random.default_rng(pairs_ss)


def _gaussian_matrices(seed, k, m, count):
    rng, _ = _streams(seed)
    return [rng.normal(0.0, 1.0 / math.sqrt(k), size=(k, m)) for _ in range(count)]


def _pair_indices(n, rng):
    total = n * (n - 1) // 2
    if total <= ALL_PAIRS_LIMIT:
        return np.triu_indices(n, k=1)
    i = rng.integers(0, n, SAMPLED_PAIRS)
    j = rng.integers(0, n - 1, SAMPLED_PAIRS)
    j = np.where(j >= i, j + 1, j)
    return i, j


def _sq_dists(x, i, j):
    if len(i) == x.shape[0] * (x.shape[0] - 1) // 2:
        sq = np.einsum("ij,ij->i", x, x)
        g = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
        return np.maximum(g[i, j], 0.0)
    d = x[i] - x[j]
    return np.einsum("ij,ij->i", d, d)


def pairwise_distortion(x, y, i, j) -> np.ndarray:
    """Ratios of squared pair distances after/before the map; coincident pairs omitted."""
    before = _sq_dists(x, i, j)
    after = _sq_dists(y, i, j)
    # integer-valued binary distances make a tiny floor safe
    keep = before > 1e-12 * max(1.0, before.max(initial=0.0))
    return after[keep] / before[keep]


def _as_matrix(dataset) -> np.ndarray:
    if isinstance(dataset, GraphSequence):
        return dataset.vectors()
    x = np.asarray(dataset, dtype=np.float64)
    return x.reshape(x.shape[0], -1)


def build_jl_map(
    m: int,
    k: int,
    epsilon: float,
    dataset,
    seed: Optional[int] = 0,
    max_retries: int = 20,
    method: str = "gaussian",
) -> JlMap:
    """Sample projections until one meets the ``(1 +- epsilon)`` bound on ``dataset``.

    Parameters
    ----------
    m, k : int
        Source and target dimensions.
    epsilon : float
        Allowed relative distortion of squared pairwise distances, in (0, 1).
    dataset : GraphSequence or array_like of shape (N, m)
        Points whose pairwise distances must be preserved. All pairs are
        checked when there are at most ``ALL_PAIRS_LIMIT`` of them, otherwise
        ``SAMPLED_PAIRS`` random pairs.
    seed : int, optional
        Master seed for the matrix and pair-sampling streams.
    max_retries : int
        Number of candidate matrices to try.
    method : {"gaussian", "identity"}
        ``"identity"`` requires ``k == m`` and is meant for testing.

    Raises
    ------
    DistortionNotAchieved
        If none of the ``max_retries`` candidates passes.
    """
    if not 0.0 < epsilon < 1.0:
        raise InvalidEpsilon(f"epsilon must lie in (0, 1), got {epsilon}")
    x = _as_matrix(dataset)
    if x.shape[0] == 0:
        raise InvalidParameters("dataset is empty")
    if x.shape[1] != m:
        raise DimensionMismatch(f"dataset vectors have length {x.shape[1]}, expected m={m}")
    if k > m:
        warnings.warn(f"target dimension k={k} exceeds source dimension m={m}", stacklevel=2)
    if max_retries < 1:
        raise InvalidParameters("max_retries must be at least 1")

    matrix_rng, pair_rng = _streams(seed)
    i, j = _pair_indices(x.shape[0], pair_rng)
    if method == "identity":
        if k != m:
            raise DimensionMismatch("identity map needs k == m")
        candidates = [np.eye(m)]
    elif method == "gaussian":
        candidates = (matrix_rng.normal(0.0, 1.0 / math.sqrt(k), size=(k, m)) for _ in range(max_retries))
    else:
        raise InvalidParameters(f"unknown method {method!r}")

    worst = float("nan")
    for attempt, matrix in enumerate(candidates, start=1):
        ratios = pairwise_distortion(x, x @ matrix.T, i, j)
        worst = float(np.max(np.abs(ratios - 1.0))) if ratios.size else 0.0
        if worst <= epsilon:
            return JlMap(matrix, epsilon, seed, True, worst, attempt, len(i), method)
    raise DistortionNotAchieved(
        f"no map with k={k} met epsilon={epsilon} after {max_retries} tries "
        f"(last worst distortion {worst:.3f})"
    )


@dataclass(frozen=True, eq=False)
class ProjectedSequence:
    """Projected snapshot vectors plus the map and source metadata."""

    vectors: np.ndarray
    map: JlMap
    p: Optional[int] = None
    q: Optional[int] = None
    rows_used: Optional[int] = None
    truth: Optional[GroundTruth] = None
    seed: Optional[int] = None
    snr: float = float("inf")
    metadata: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.vectors.shape[0]

    def __len__(self) -> int:
        return self.N


def project_sequence(seq, jl_map: JlMap) -> ProjectedSequence:
    """Apply ``jl_map`` to every vectorized snapshot of ``seq``."""
    x = _as_matrix(seq)
    if x.shape[1] != jl_map.m:
        raise DimensionMismatch(f"map expects m={jl_map.m}, snapshots have {x.shape[1]} entries")
    y = x @ jl_map.matrix.T
    y.setflags(write=False)
    if isinstance(seq, GraphSequence):
        return ProjectedSequence(y, jl_map, seq.p, seq.q, seq.rows_used, seq.truth, seq.seed, seq.snr)
    return ProjectedSequence(y, jl_map)
