"""Definition-literal reference computations, deliberately unoptimised."""
import math

import numpy as np


def sq_dist(a, b):
    total = 0.0
    for u, v in zip(np.ravel(a), np.ravel(b)):
        total += (float(u) - float(v)) ** 2
    return total


def dist(a, b):
    return math.sqrt(sq_dist(a, b))


def mean_of(points, mode):
    if mode == "euclidean":
        acc = np.zeros_like(np.asarray(points[0], dtype=float))
        for x in points:
            acc = acc + np.asarray(x, dtype=float)
        return acc / len(points)
    best, best_cost = None, math.inf
    for c in points:  # exhaustive search over observed points, first wins ties
        cost = sum(sq_dist(x, c) for x in points)
        if cost < best_cost:
            best, best_cost = c, cost
    return np.asarray(best, dtype=float)


def curve(points, delta, mode):
    """Return (n list, S list) evaluated from scratch at each admissible n."""
    N = len(points)
    mu = mean_of(points, mode)
    d2 = [sq_dist(x, mu) for x in points]
    V = sum(d2) / N
    s2 = sum(v * v for v in d2) / N - V**2
    ns, out = [], []
    for n in range(1, N):
        if not (delta < n / N < 1 - delta):
            continue
        first, second = points[:n], points[n:]
        m1, m2 = mean_of(first, mode), mean_of(second, mode)
        v1 = sum(sq_dist(x, m1) for x in first) / n
        v2 = sum(sq_dist(x, m2) for x in second) / (N - n)
        v1c = sum(sq_dist(x, m2) for x in first) / n
        v2c = sum(sq_dist(x, m1) for x in second) / (N - n)
        s = n * (N - n) / (N**2 * s2) * ((v1 - v2) ** 2 + (v1c - v1 + v2c - v2) ** 2)
        ns.append(n)
        out.append(s)
    return ns, out
