import math

import numpy as np
import pytest

from eclipse_detect import (
    AttackScenario,
    apply_observation_noise,
    generate_sequence,
    benchmark_scenario,
    sample_attack_snapshot,
    sample_honest_snapshot,
)
from eclipse_detect.errors import InvalidDegree, InvalidScenario, InvalidSnr
from eclipse_detect.simulate import noise_rng


def test_two_vertices_one_neighbour_is_unique(rng):
    for _ in range(10):
        a = sample_honest_snapshot(2, 1, rng)
        np.testing.assert_array_equal(a.entries, [[0, 1], [1, 0]])


def test_column_sums_equal_q(rng):
    for _ in range(20):
        a = sample_honest_snapshot(100, 5, rng)
        assert (a.column_sums() == 5).all()
        assert not np.diag(a.entries).any()


def test_self_loop_option_allows_diagonal(rng):
    hits = sum(sample_honest_snapshot(10, 3, rng, self_loops=True).entries.trace() for _ in range(2000))
    assert hits > 0


@pytest.mark.parametrize("self_loops, expected", [(True, 3 / 10), (False, 3 / 9)])
def test_entry_frequency(rng, self_loops, expected):
    acc = np.zeros((10, 10))
    for _ in range(10_000):
        acc += sample_honest_snapshot(10, 3, rng, self_loops=self_loops).entries
    freq = acc / 10_000
    off = freq[~np.eye(10, dtype=bool)]
    assert np.all(np.abs(off - expected) < 0.02)


def test_invalid_degree(rng):
    with pytest.raises(InvalidDegree):
        sample_honest_snapshot(5, 5, rng)
    with pytest.raises(InvalidDegree):
        sample_honest_snapshot(5, 0, rng)


def test_benchmark_attack_law(rng):
    sc = benchmark_scenario(attack=True)
    sc = AttackScenario(**{**sc.__dict__, "rows_used": None})
    acc = np.zeros((100, 100))
    draws = 20_000
    for _ in range(draws):
        a = sample_attack_snapshot(sc, rng).entries
        assert (a.sum(axis=0) == 5).all()
        acc += a
    freq = acc / draws
    assert freq[0, 98] == 1.0 and freq[0, 99] == 1.0
    others = np.delete(freq[:, 98:], 0, axis=0)
    # 99 rows share 4 uniform picks
    assert abs(others.mean() - 4 / 99) < 0.002
    assert np.all(np.abs(others - 4 / 99) < 0.01)


def test_small_attack_forces_victim(rng):
    sc = AttackScenario(p=10, q=2, N=10, attack=True, tau=5, victims=(3,), attackers=(7,))
    hits = sum(int(sample_attack_snapshot(sc, rng).entries[3, 7]) for _ in range(10_000))
    assert hits == 10_000


def test_no_attackers_matches_honest_law():
    sc = AttackScenario(p=8, q=3, N=10, attack=True, tau=5, victims=(0,), attackers=())
    a = sample_attack_snapshot(sc, np.random.default_rng(5)).entries
    b = sample_honest_snapshot(8, 3, np.random.default_rng(5)).entries
    np.testing.assert_array_equal(a, b)


def test_inclusion_probability_weakens_attack(rng):
    sc = AttackScenario(p=10, q=2, N=10, attack=True, tau=5, victims=(3,), attackers=(7,), inclusion_prob=0.5)
    freq = np.mean([sample_attack_snapshot(sc, rng).entries[3, 7] for _ in range(5000)])
    # forced half the time, otherwise honest 2/9
    assert abs(freq - (0.5 + 0.5 * 2 / 9)) < 0.03


@pytest.mark.parametrize(
    "kw",
    [
        dict(victims=(1,), attackers=(1, 2)),
        dict(victims=(0,), attackers=(10,)),
        dict(victims=(-1,), attackers=(3,)),
        dict(victims=(0, 1, 2), attackers=(5,)),
    ],
)
def test_invalid_roles(rng, kw):
    sc = AttackScenario(p=10, q=2, N=10, attack=True, tau=5, **kw)
    with pytest.raises(InvalidScenario):
        sample_attack_snapshot(sc, rng)


def test_scenario_validation():
    with pytest.raises(InvalidScenario):
        AttackScenario(attack=True).validate()
    with pytest.raises(InvalidScenario):
        AttackScenario(N=100, attack=True, tau=5).validate()
    with pytest.raises(InvalidScenario):
        AttackScenario(N=100, attack=True, tau=95).validate()
    with pytest.raises(InvalidDegree):
        AttackScenario(p=5, q=5).validate()


def test_sequence_is_deterministic():
    sc = AttackScenario(p=20, q=3, N=50, attack=True, tau=30, attackers=(18, 19), seed=11)
    a, b = generate_sequence(sc), generate_sequence(sc)
    assert a.data.tobytes() == b.data.tobytes()
    assert generate_sequence(sc.with_seed(12)).data.tobytes() != a.data.tobytes()


def test_parallel_matches_serial():
    sc = AttackScenario(p=30, q=4, N=80, rows_used=5, seed=3)
    np.testing.assert_array_equal(generate_sequence(sc).data, generate_sequence(sc, workers=4).data)


def test_honest_benchmark_sequence_shape():
    seq = generate_sequence(benchmark_scenario(seed=1))
    assert seq.data.shape == (1000, 4, 100)
    assert seq.truth.attack is False
    assert seq.data.sum() == pytest.approx(4 * 100 * 0.05 * 1000, rel=0.05)


def test_attack_switches_at_tau():
    seq = generate_sequence(benchmark_scenario(attack=True, tau=600, seed=2))
    assert seq.truth.tau == 600
    victim_row = seq.data[:, 0, 98:].astype(int)
    assert victim_row[599:].all()
    assert victim_row[:599].mean() < 0.2


def test_full_honest_columns_sum_to_q():
    seq = generate_sequence(AttackScenario(p=15, q=4, N=40, seed=8))
    assert (seq.data.sum(axis=1) == 4).all()


def test_stationarity_of_honest_sequence():
    seq = generate_sequence(AttackScenario(p=20, q=3, N=2000, seed=4))
    first = seq.data[:1000].mean(axis=0)
    second = seq.data[1000:].mean(axis=0)
    se = math.sqrt(2 * (3 / 19) * (16 / 19) / 1000)
    assert np.max(np.abs(first - second)[~np.eye(20, dtype=bool)]) < 5 * se


def test_noise_infinite_snr_is_identity():
    seq = generate_sequence(AttackScenario(p=10, q=2, N=10, seed=0))
    out = apply_observation_noise(seq, math.inf, noise_rng(0))
    np.testing.assert_array_equal(out.data, seq.data)


def test_noise_snr_one_removes_everything():
    seq = generate_sequence(AttackScenario(p=10, q=2, N=10, seed=0))
    assert not apply_observation_noise(seq, 1.0, noise_rng(0)).data.any()


def test_noise_survival_fraction():
    seq = generate_sequence(AttackScenario(p=50, q=5, N=400, seed=0))
    ones = seq.data.sum()
    assert ones == 100_000
    out = apply_observation_noise(seq, 4.0, noise_rng(0))
    assert abs(out.data.sum() / ones - 0.75) < 0.01
    assert (out.data <= seq.data).all()
    assert out.truth == seq.truth


def test_noise_rejects_low_snr():
    seq = generate_sequence(AttackScenario(p=10, q=2, N=10, seed=0))
    for bad in (0.5, -1.0, float("nan")):
        with pytest.raises(InvalidSnr):
            apply_observation_noise(seq, bad, noise_rng(0))
