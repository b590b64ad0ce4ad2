"""Independent slow oracles shared by the unit and acceptance suites.

Everything here is deliberately naive: box filters instead of pruned
descent, full subsequence enumeration instead of dynamic programming,
chain search instead of the greedy window.  The point is that none of
the package's algorithmic shortcuts are reused.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from simplexvar import SimplexConfig


def four_square_count_oracle(m: int) -> int:
    # Divisor sum 8 * sum(d | m, 4 does not divide d).
    if m == 0:
        return 1
    total = 0
    for d in range(1, m + 1):
        if m % d == 0 and d % 4 != 0:
            total += d
    return 8 * total


def box_sphere_oracle(n: int, m: int) -> set[tuple[int, ...]]:
    """All lattice points of squared norm m via slab-wise box filtering."""
    r = math.isqrt(m)
    if n == 1:
        return {(v,) for v in (-r, r) if v * v == m} | ({(0,)} if m == 0 else set())
    axes = [np.arange(-r, r + 1)] * (n - 1)
    rest = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n - 1)
    rest_sq = np.sum(rest * rest, axis=1)
    found: set[tuple[int, ...]] = set()
    for x0 in range(-r, r + 1):
        hit = rest_sq == m - x0 * x0
        for row in rest[hit]:
            found.add((x0, *map(int, row)))
    return found


def box_simplex_oracle(config: SimplexConfig, lambda_sq: int) -> set[tuple[int, ...]]:
    """Cross-product of sphere oracles filtered by the mutual constraints."""
    d = config.dist_sq
    per_vertex = [
        sorted(box_sphere_oracle(config.n, lambda_sq * d[i + 1][0]))
        for i in range(config.k)
    ]
    if config.k == 1:
        return {p for p in per_vertex[0]}
    assert config.k == 2
    p1 = np.array(per_vertex[0], dtype=np.int64).reshape(-1, config.n)
    p2 = np.array(per_vertex[1], dtype=np.int64).reshape(-1, config.n)
    found: set[tuple[int, ...]] = set()
    if p1.size == 0 or p2.size == 0:
        return found
    # |m1 - m2|^2 = lambda_sq * d[2][1] reduces to a dot-product condition
    # because both norms are already pinned.
    want_dot = (lambda_sq * (d[1][0] + d[2][0] - d[2][1])) / 2
    if want_dot != int(want_dot):
        return found
    for i0 in range(0, p1.shape[0], 512):
        block = p1[i0 : i0 + 512]
        dots = block @ p2.T
        rows, cols = np.nonzero(dots == int(want_dot))
        for a, b in zip(rows, cols):
            found.add(tuple(map(int, block[a])) + tuple(map(int, p2[b])))
    return found


_COMBO_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _index_combinations(length: int, take: int) -> np.ndarray:
    key = (length, take)
    if key not in _COMBO_CACHE:
        _COMBO_CACHE[key] = np.array(
            list(itertools.combinations(range(length), take)), dtype=np.intp
        )
    return _COMBO_CACHE[key]


def exhaustive_variation_oracle(values, r: float) -> float:
    """Exact r-variation by enumerating every increasing subsequence."""
    a = np.asarray(list(values), dtype=complex)
    length = a.shape[0]
    if length < 2:
        return 0.0
    if math.isinf(r):
        diffs = np.abs(a[None, :] - a[:, None])
        return float(diffs.max())
    best = 0.0
    for take in range(2, length + 1):
        idx = _index_combinations(length, take)
        picked = a[idx]
        total = (np.abs(np.diff(picked, axis=1)) ** r).sum(axis=1)
        best = max(best, float(total.max()))
    return best ** (1.0 / r)


def chain_jump_oracle(values, lam: float) -> int:
    """Most chained pairs u1<v1<=u2<v2<=... with |a_v - a_u| > lam.

    closed_by[u] is the best count with the final pair closing at or
    before u; a new pair may open at the previous closing index.
    """
    a = [complex(v) for v in values]
    length = len(a)
    if length < 2:
        return 0
    closed_by = [0] * length
    for v in range(1, length):
        best_here = 0
        for u in range(v):
            if abs(a[v] - a[u]) > lam:
                best_here = max(best_here, closed_by[u] + 1)
        closed_by[v] = max(closed_by[v - 1], best_here)
    return closed_by[length - 1]
