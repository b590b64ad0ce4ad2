"""r-variation seminorms and jump counts of finite sample sequences.

The r-variation of (a_1, ..., a_L) is the supremum over increasing index
subsequences of (sum_t |a_(i_(t+1)) - a_(i_t)|^r)^(1/r); r = inf takes
the largest single increment instead.  A lam-jump chain is a sequence of
index pairs u_1 < v_1 <= u_2 < v_2 <= ... with |a_(v_t) - a_(u_t)| > lam
for every pair; chains may share the closing index of one pair with the
opening index of the next.  The jump count is the longest such chain.

Both quantities are computed exactly: the variation by an O(L^2) dynamic
program over ending indices, the jump count by an earliest-closing greedy
scan (O(L) with running extrema for real data, O(L^2) pair scan for
complex data).
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

__all__ = [
    "variation_seminorm",
    "jump_count",
    "variation_field",
    "jump_field",
    "jump_count_field",
    "lacunary_maximal_field",
]


def _as_complex_list(values: Sequence[complex]) -> list[complex]:
    return [complex(v) for v in values]


def variation_seminorm(values: Sequence[complex], r: float) -> float:
    """Exact r-variation by dynamic programming over ending indices.

    best[j] = max over i < j of best[i] + |a_j - a_i|^r; the result is
    the r-th root of the overall best.  Handles any r in (0, inf]; a
    sequence with fewer than two samples has variation zero.
    """
    if not r > 0:
        raise ValueError("variation exponent must be positive")
    a = _as_complex_list(values)
    L = len(a)
    if L < 2:
        return 0.0
    if math.isinf(r):
        best = 0.0
        for j in range(1, L):
            for i in range(j):
                best = max(best, abs(a[j] - a[i]))
        return best
    best = [0.0] * L
    for j in range(1, L):
        bj = 0.0
        for i in range(j):
            cand = best[i] + abs(a[j] - a[i]) ** r
            if cand > bj:
                bj = cand
        best[j] = bj
    return max(best) ** (1.0 / r)


def jump_count(values: Sequence[complex], lam: float) -> int:
    """Longest admissible jump chain via the earliest-closing greedy.

    From the current start, close a pair at the first index whose value
    differs from some earlier value in the open segment by more than lam,
    then restart there (shared endpoints are allowed).  For real data the
    open segment is summarized by its running min and max.
    """
    if not lam > 0:
        raise ValueError("jump threshold must be positive")
    a = _as_complex_list(values)
    L = len(a)
    if L < 2:
        return 0
    if all(v.imag == 0 for v in a):
        xs = [v.real for v in a]
        count = 0
        lo = hi = xs[0]
        for v in xs[1:]:
            if v - lo > lam or hi - v > lam:
                count += 1
                lo = hi = v
            else:
                lo = min(lo, v)
                hi = max(hi, v)
        return count
    # Complex data: scan the open segment for a witness, O(L^2).
    count = 0
    start = 0
    v = 1
    while v < L:
        if any(abs(a[v] - a[u]) > lam for u in range(start, v)):
            count += 1
            start = v
        v += 1
    return count


def _stacked(fields: Sequence[np.ndarray]) -> np.ndarray:
    stack = np.stack([np.asarray(f) for f in fields], axis=0)
    if np.iscomplexobj(stack) and np.abs(stack.imag).max(initial=0.0) == 0.0:
        stack = stack.real
    return stack


def variation_field(fields: Sequence[np.ndarray], r: float) -> np.ndarray:
    """Pointwise r-variation across a list of equal-shape arrays.

    Runs the ending-index dynamic program with vectorized arithmetic,
    one pass per index pair, so the cost is O(L^2) array operations.
    """
    if not r > 0:
        raise ValueError("variation exponent must be positive")
    stack = _stacked(fields)
    L = stack.shape[0]
    if L < 2:
        return np.zeros(stack.shape[1:], dtype=np.float64)
    if math.isinf(r):
        out = np.zeros(stack.shape[1:], dtype=np.float64)
        for j in range(1, L):
            for i in range(j):
                np.maximum(out, np.abs(stack[j] - stack[i]), out=out)
        return out
    best = np.zeros_like(stack, dtype=np.float64)
    for j in range(1, L):
        bj = np.abs(stack[j] - stack[0]) ** r
        for i in range(1, j):
            np.maximum(bj, best[i] + np.abs(stack[j] - stack[i]) ** r, out=bj)
        best[j] = bj
    return best.max(axis=0) ** (1.0 / r)


def jump_count_field(fields: Sequence[np.ndarray], lam: float) -> np.ndarray:
    """Pointwise greedy jump count across a list of equal-shape arrays."""
    if not lam > 0:
        raise ValueError("jump threshold must be positive")
    stack = _stacked(fields)
    L = stack.shape[0]
    shape = stack.shape[1:]
    count = np.zeros(shape, dtype=np.int64)
    if L < 2:
        return count
    if np.iscomplexobj(stack):
        # Complex data: recompute the open-segment witness per step.
        start = np.zeros(shape, dtype=np.int64)
        for v in range(1, L):
            witness = np.zeros(shape, dtype=bool)
            for u in range(v):
                cand = (np.abs(stack[v] - stack[u]) > lam) & (start <= u)
                witness |= cand
            count += witness
            start = np.where(witness, v, start)
        return count
    lo = stack[0].copy()
    hi = stack[0].copy()
    for v in range(1, L):
        cur = stack[v]
        closed = (cur - lo > lam) | (hi - cur > lam)
        count += closed
        lo = np.where(closed, cur, np.minimum(lo, cur))
        hi = np.where(closed, cur, np.maximum(hi, cur))
    return count


def jump_field(
    fields: Sequence[np.ndarray], lam: float
) -> tuple[np.ndarray, np.ndarray]:
    """Jump counts and the thresholded transform lam * sqrt(count)."""
    counts = jump_count_field(fields, lam)
    return counts, lam * np.sqrt(counts.astype(np.float64))


def lacunary_maximal_field(fields: Sequence[np.ndarray]) -> np.ndarray:
    """Pointwise maximum of |field| across the given scales."""
    stack = np.stack([np.abs(np.asarray(f)) for f in fields], axis=0)
    return stack.max(axis=0)
