"""Adjacency-matrix snapshots of a blockchain communication network.

A snapshot stores ``A[i, j] = 1`` when vertex ``j`` has an outgoing edge to
vertex ``i`` (column ``j`` lists the neighbours chosen by ``j``). Snapshots
may be restricted to their first ``rows_used`` rows; the restricted slab is
then the object on which distances are computed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidScenario

__all__ = [
    "AdjacencyMatrix",
    "GroundTruth",
    "GraphSequence",
    "frobenius_distance",
    "vectorize",
]


def _frozen_uint8(entries) -> np.ndarray:
    arr = np.asarray(entries)
    if arr.dtype != np.uint8:
        if not np.all((arr == 0) | (arr == 1)):
            raise ValueError("adjacency entries must be 0 or 1")
        arr = arr.astype(np.uint8)
    elif arr.size and arr.max() > 1:
        raise ValueError("adjacency entries must be 0 or 1")
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class AdjacencyMatrix:
    """One BCN snapshot, possibly restricted to its leading rows.

    Parameters
    ----------
    entries : array_like of shape (rows_used, p)
        Binary entries; stored as read-only ``uint8``.
    p : int, optional
        Vertex count. Defaults to the number of columns.
    """

    entries: np.ndarray
    p: Optional[int] = None

    def __post_init__(self):
        arr = _frozen_uint8(self.entries)
        if arr.ndim != 2:
            raise ValueError(f"entries must be 2-D, got shape {arr.shape}")
        p = arr.shape[1] if self.p is None else int(self.p)
        if arr.shape[1] != p:
            raise DimensionMismatch(f"entries have {arr.shape[1]} columns but p={p}")
        if arr.shape[0] > p:
            raise ValueError("rows_used cannot exceed p")
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "p", p)

    @property
    def rows_used(self) -> int:
        return self.entries.shape[0]

    @property
    def shape(self) -> tuple:
        return self.entries.shape

    def column_sums(self) -> np.ndarray:
        return self.entries.sum(axis=0, dtype=np.int64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AdjacencyMatrix):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash((self.p, self.entries.tobytes()))

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


def vectorize(a) -> np.ndarray:
    """Row-major flattening of a snapshot into a float64 vector."""
    entries = a.entries if isinstance(a, AdjacencyMatrix) else np.asarray(a)
    return entries.astype(np.float64).ravel()


def frobenius_distance(a, b) -> float:
    """Frobenius norm of the difference of two adjacency matrices.

    Squared differences are accumulated in double precision before the root.
    """
    x = a.entries if isinstance(a, AdjacencyMatrix) else np.asarray(a)
    y = b.entries if isinstance(b, AdjacencyMatrix) else np.asarray(b)
    if x.shape != y.shape:
        raise DimensionMismatch(f"shapes differ: {x.shape} vs {y.shape}")
    diff = x.astype(np.float64) - y.astype(np.float64)
    return float(np.sqrt(np.sum(diff * diff)))


@dataclass(frozen=True)
class GroundTruth:
    """What actually generated a simulated sequence.

    ``tau`` is 1-based: snapshots ``1..tau-1`` are honest and ``tau..N`` are
    drawn from the attack distribution. Vertex indices are 0-based.
    """

    attack: bool = False
    tau: Optional[int] = None
    victims: tuple = ()
    attackers: tuple = ()

    def to_dict(self) -> dict:
        return {
            "attack": self.attack,
            "tau": self.tau,
            "victims": list(self.victims),
            "attackers": list(self.attackers),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GroundTruth":
        return cls(
            attack=bool(d.get("attack", False)),
            tau=None if d.get("tau") is None else int(d["tau"]),
            victims=tuple(int(v) for v in d.get("victims", ())),
            attackers=tuple(int(v) for v in d.get("attackers", ())),
        )


@dataclass(frozen=True, eq=False)
class GraphSequence:
    """An ordered batch of ``N`` snapshots sharing ``(rows_used, p)``.

    The snapshots live in a single read-only ``uint8`` array ``data`` of
    shape ``(N, rows_used, p)``; indexing returns :class:`AdjacencyMatrix`.
    """

    data: np.ndarray
    p: int
    q: int
    truth: Optional[GroundTruth] = None
    seed: Optional[int] = None
    snr: float = float("inf")
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        arr = _frozen_uint8(self.data)
        if arr.ndim != 3:
            raise ValueError(f"data must have shape (N, rows_used, p), got {arr.shape}")
        if arr.shape[0] < 2:
            raise ValueError("a sequence needs at least 2 snapshots")
        if arr.shape[2] != self.p:
            raise DimensionMismatch(f"snapshots have {arr.shape[2]} columns but p={self.p}")
        if arr.shape[1] > self.p:
            raise ValueError("rows_used cannot exceed p")
        object.__setattr__(self, "data", arr)
        if self.truth is not None and self.truth.tau is not None:
            if not 1 <= self.truth.tau <= arr.shape[0]:
                raise InvalidScenario(f"tau={self.truth.tau} outside 1..{arr.shape[0]}")

    @classmethod
    def from_snapshots(cls, snapshots: Sequence[AdjacencyMatrix], q: int, **kwargs):
        shapes = {s.shape for s in snapshots}
        if len(shapes) != 1:
            raise DimensionMismatch(f"snapshots disagree on shape: {sorted(shapes)}")
        p = snapshots[0].p
        data = np.stack([s.entries for s in snapshots])
        return cls(data=data, p=p, q=q, **kwargs)

    @property
    def N(self) -> int:
        return self.data.shape[0]

    @property
    def rows_used(self) -> int:
        return self.data.shape[1]

    @property
    def snapshots(self) -> list:
        return [AdjacencyMatrix(s, self.p) for s in self.data]

    def __len__(self) -> int:
        return self.N

    def __getitem__(self, i) -> AdjacencyMatrix:
        return AdjacencyMatrix(self.data[i], self.p)

    def __iter__(self) -> Iterator[AdjacencyMatrix]:
        for s in self.data:
            yield AdjacencyMatrix(s, self.p)

    def vectors(self) -> np.ndarray:
        """All snapshots vectorized, shape ``(N, rows_used * p)``."""
        return self.data.reshape(self.N, -1).astype(np.float64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GraphSequence):
            return NotImplemented
        return (
            self.p == other.p
            and self.q == other.q
            and self.truth == other.truth
            and self.seed == other.seed
            and self.snr == other.snr
            and np.array_equal(self.data, other.data)
        )

    __hash__ = None
