"""Honest / eclipse-attack BCN sampling and the missed-link noise model.

Random numbers come from NumPy's ``PCG64`` generator. A sequence built from
master seed ``s`` draws snapshot ``i`` (0-based) from
``default_rng(SeedSequence(s).spawn(N)[i])``, so any subset of snapshots can
be generated independently, in any order or in parallel, with identical
results.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
import math
from typing import Optional

import numpy as np

from .errors import InvalidDegree, InvalidScenario, InvalidSnr
from .graph import AdjacencyMatrix, GraphSequence, GroundTruth

__all__ = [
    "AttackScenario",
    "benchmark_scenario",
    "sample_honest_snapshot",
    "sample_attack_snapshot",
    "generate_sequence",
    "apply_observation_noise",
]


@dataclass(frozen=True)
class AttackScenario:
    """Parameters for one simulated sequence.

    Vertex indices are 0-based. ``tau`` is the 1-based index of the first
    attacked snapshot. ``inclusion_prob`` is the probability that an attacker
    column forces the victim edge; otherwise that column is drawn honestly.
    ``self_loops`` lets a vertex draw itself as one of its ``q`` neighbours,
    which gives exactly ``q/p`` per entry; by default it never does.
    """

    p: int = 100
    q: int = 5
    N: int = 1000
    attack: bool = False
    tau: Optional[int] = None
    victims: tuple = (0,)
    attackers: tuple = (98, 99)
    rows_used: Optional[int] = None
    seed: int = 0
    delta: float = 0.1
    inclusion_prob: float = 1.0
    self_loops: bool = False

    def __post_init__(self):
        object.__setattr__(self, "victims", tuple(int(v) for v in self.victims))
        object.__setattr__(self, "attackers", tuple(int(v) for v in self.attackers))

    @property
    def rows(self) -> int:
        return self.p if self.rows_used is None else self.rows_used

    def validate(self) -> "AttackScenario":
        if not 0 < self.q < self.p:
            raise InvalidDegree(f"need 0 < q < p, got q={self.q}, p={self.p}")
        if self.N < 2:
            raise InvalidScenario("N must be at least 2")
        if not 1 <= self.rows <= self.p:
            raise InvalidScenario(f"rows_used={self.rows_used} outside 1..{self.p}")
        if not 0.0 <= self.inclusion_prob <= 1.0:
            raise InvalidScenario("inclusion_prob must lie in [0, 1]")
        if not self.attack:
            return self
        if self.tau is None:
            raise InvalidScenario("an attack scenario needs tau")
        if not self.delta * self.N < self.tau < (1 - self.delta) * self.N:
            raise InvalidScenario(
                f"tau={self.tau} not strictly inside ({self.delta * self.N:g}, "
                f"{(1 - self.delta) * self.N:g})"
            )
        _check_roles(self.p, self.q, self.victims, self.attackers)
        return self

    def null(self) -> "AttackScenario":
        """Same scenario without the attack."""
        return replace(self, attack=False, tau=None)

    def with_seed(self, seed: int) -> "AttackScenario":
        return replace(self, seed=int(seed))

    def truth(self) -> GroundTruth:
        if not self.attack:
            return GroundTruth(attack=False)
        return GroundTruth(True, self.tau, self.victims, self.attackers)


def benchmark_scenario(attack: bool = False, tau: int = 600, seed: int = 0) -> AttackScenario:
    """100 users, 5 neighbours, 1000 snapshots, first 4 rows, victim 0, attackers 98 and 99.

    Neighbours are uniform over all 100 vertices, so honest entries are 1
    with probability 5/100 and non-victim entries of attacker columns with
    probability 4/99.
    """
    return AttackScenario(
        p=100, q=5, N=1000, attack=attack, tau=tau if attack else None,
        victims=(0,), attackers=(98, 99), rows_used=4, seed=seed, self_loops=True,
    )


def _check_roles(p, q, victims, attackers):
    if set(victims) & set(attackers):
        raise InvalidScenario("victims and attackers overlap")
    for v in (*victims, *attackers):
        if not 0 <= v < p:
            raise InvalidScenario(f"vertex index {v} outside 0..{p - 1}")
    if attackers and not victims:
        raise InvalidScenario("attackers given without a victim")
    if attackers and len(victims) > q:
        raise InvalidScenario("more victims than an attacker has out-edges")


def _draw(p, q, rng, forced=None, self_loops=False):
    """Full p x p snapshot; ``forced`` maps attacker column -> victim rows."""
    keys = rng.random((p, p))
    if not self_loops:
        keys[np.arange(p), np.arange(p)] = np.inf
    if forced:
        for col, rows in forced.items():
            keys[list(rows), col] = -1.0
    chosen = np.argpartition(keys, q - 1, axis=0)[:q]
    a = np.zeros((p, p), dtype=np.uint8)
    a[chosen, np.arange(p)] = 1
    return a


def sample_honest_snapshot(
    p: int, q: int, rng, rows_used: Optional[int] = None, self_loops: bool = False
) -> AdjacencyMatrix:
    """Each vertex picks ``q`` distinct neighbours uniformly (itself excluded unless ``self_loops``)."""
    if not 0 < q < p:
        raise InvalidDegree(f"need 0 < q < p, got q={q}, p={p}")
    rows = p if rows_used is None else rows_used
    return AdjacencyMatrix(_draw(p, q, rng, self_loops=self_loops)[:rows], p)


def sample_attack_snapshot(scenario: AttackScenario, rng) -> AdjacencyMatrix:
    """Attacker columns always contain the victims; the rest is uniform.

    For an attacker column the remaining ``q - |victims|`` neighbours are
    uniform over the non-victim rows (excluding the attacker itself unless
    ``scenario.self_loops``).
    Honest columns follow the honest law unchanged.
    """
    if not 0 < scenario.q < scenario.p:
        raise InvalidDegree(f"need 0 < q < p, got q={scenario.q}, p={scenario.p}")
    _check_roles(scenario.p, scenario.q, scenario.victims, scenario.attackers)
    forced = {}
    if scenario.attackers:
        if scenario.inclusion_prob >= 1.0:
            on = scenario.attackers
        else:
            u = rng.random(len(scenario.attackers))
            on = [a for a, x in zip(scenario.attackers, u) if x < scenario.inclusion_prob]
        forced = {a: scenario.victims for a in on}
    a = _draw(scenario.p, scenario.q, rng, forced, scenario.self_loops)
    return AdjacencyMatrix(a[: scenario.rows], scenario.p)


def _snapshot(scenario: AttackScenario, index: int, seed_seq) -> np.ndarray:
    rng = np.random.default_rng(seed_seq)
    attacked = scenario.attack and index + 1 >= scenario.tau
    if attacked:
        return sample_attack_snapshot(scenario, rng).entries
    return sample_honest_snapshot(scenario.p, scenario.q, rng, scenario.rows, scenario.self_loops).entries


def generate_sequence(scenario: AttackScenario, workers: int = 1) -> GraphSequence:
    """Draw the whole sequence; output depends only on ``scenario``.

    Snapshots ``1..tau-1`` are honest, ``tau..N`` attacked. ``workers > 1``
    spreads snapshot generation over threads without changing the result.
    """
    scenario.validate()
    children = np.random.SeedSequence(scenario.seed).spawn(scenario.N)
    idx = range(scenario.N)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            snaps = list(pool.map(lambda i: _snapshot(scenario, i, children[i]), idx))
    else:
        snaps = [_snapshot(scenario, i, children[i]) for i in idx]
    return GraphSequence(
        data=np.stack(snaps), p=scenario.p, q=scenario.q,
        truth=scenario.truth(), seed=scenario.seed,
    )


def apply_observation_noise(seq: GraphSequence, snr: float, rng) -> GraphSequence:
    """Delete each observed edge independently with probability ``1/snr``.

    Entry ``(i, j)`` survives iff ``U_ij > 1/snr`` with ``U_ij`` uniform on
    [0, 1]; ``snr = inf`` leaves the data untouched and ``snr = 1`` removes
    every edge.
    """
    snr = float(snr)
    if math.isnan(snr) or snr < 1.0:
        raise InvalidSnr(f"snr must be >= 1 or inf, got {snr}")
    if math.isinf(snr):
        data = seq.data
    else:
        keep = rng.random(seq.data.shape) > 1.0 / snr
        data = seq.data & keep.astype(np.uint8)
    combined = snr if math.isinf(seq.snr) else 1.0 / (1.0 - (1 - 1 / seq.snr) * (1 - 1 / snr))
    return replace(seq, data=data, snr=combined)


def noise_rng(seed: int, stream: int = 0):
    """Generator for observation noise, independent of the snapshot streams of ``seed``."""
    return np.random.default_rng([int(seed), 0x4E015E, int(stream)])
