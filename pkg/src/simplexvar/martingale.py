"""Cube martingale structure on the periodic lattice grid.

Level-l cubes have integer side base^l and tile the grid when the side
divides the period.  The level-l conditional expectation replaces the
function by its average over the containing cube; consecutive-level
differences form the martingale increments.  The base is a positive
integer (the simplex experiments take the smallest integer at least
twice the vertex-tuple norm).
"""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from .grid import LatticeFunction

__all__ = [
    "cube_index",
    "conditional_expectation",
    "martingale_difference",
    "martingale_jump_field",
]

from .variation import jump_count_field


def cube_index(point: Sequence[int], base: int, level: int) -> tuple[int, ...]:
    """Index of the level-`level` cube containing the point (floor division)."""
    if base < 2:
        raise ValueError("base must be at least 2")
    if level < 0:
        raise ValueError("level must be nonnegative")
    side = base**level
    return tuple(int(c) // side for c in point)


def _dense_expectation(values: np.ndarray, side: int) -> np.ndarray:
    dim = values.ndim
    period = values.shape[0]
    if period % side != 0:
        raise ValueError(
            f"cube side {side} does not divide the grid period {period}"
        )
    blocks = period // side
    split = values.reshape(*itertools.chain.from_iterable((blocks, side) for _ in range(dim)))
    mean = split.mean(axis=tuple(2 * t + 1 for t in range(dim)), keepdims=True)
    return np.broadcast_to(mean, split.shape).reshape(values.shape)


def conditional_expectation(
    f: LatticeFunction, level: int, base: int
) -> LatticeFunction:
    """Average over level-`level` cubes (level 0 is the identity).

    Dense functions require the cube side to divide the period.  Sparse
    functions spread each touched cube's average over the whole cube;
    unset cells count as zero.
    """
    if base < 2:
        raise ValueError("base must be at least 2")
    if level < 0:
        raise ValueError("level must be nonnegative")
    side = base**level
    if f.is_dense:
        assert f.values is not None
        out = _dense_expectation(f.values, side)
        return LatticeFunction(dim=f.dim, values=out, period=f.period)
    assert f.entries is not None
    if level == 0:
        return LatticeFunction(dim=f.dim, entries=dict(f.entries))
    sums: dict[tuple[int, ...], complex] = {}
    for pt, val in f.entries.items():
        key = tuple(int(c) // side for c in pt)
        sums[key] = sums.get(key, 0.0) + val
    volume = side**f.dim
    entries: dict[tuple[int, ...], complex] = {}
    for key, total in sums.items():
        avg = total / volume
        if avg == 0:
            continue
        for offset in itertools.product(range(side), repeat=f.dim):
            cell = tuple(k * side + o for k, o in zip(key, offset))
            entries[cell] = avg
    return LatticeFunction(dim=f.dim, entries=entries)


def martingale_difference(f: LatticeFunction, level: int, base: int) -> LatticeFunction:
    """Increment between consecutive conditional expectations.

    Defined for level >= 1 as the level expectation minus the
    level-minus-one expectation.
    """
    if level < 1:
        raise ValueError("martingale increments start at level 1")
    hi = conditional_expectation(f, level, base)
    lo = conditional_expectation(f, level - 1, base)
    if hi.is_dense:
        assert hi.values is not None and lo.values is not None
        return LatticeFunction(
            dim=f.dim, values=hi.values - lo.values, period=f.period
        )
    assert hi.entries is not None and lo.entries is not None
    out = dict(hi.entries)
    for pt, val in lo.entries.items():
        out[pt] = out.get(pt, 0.0) - val
    return LatticeFunction(dim=f.dim, entries={k: v for k, v in out.items() if v != 0})


def martingale_jump_field(
    f: LatticeFunction, levels: Sequence[int], base: int, lam: float
) -> np.ndarray:
    """Pointwise jump count of the expectation sequence across levels."""
    if not f.is_dense:
        raise ValueError("jump fields are computed on dense grids")
    fields = [
        conditional_expectation(f, lv, base).values for lv in sorted(levels)
    ]
    return jump_count_field([fv for fv in fields if fv is not None], lam)
