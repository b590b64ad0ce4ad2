"""Functions on Z^d and on the periodic grid (Z/NZ)^d.

Two representations share one wrapper type: a dense complex array over a
period-N grid (row-major, one axis per coordinate), or a sparse map from
integer points to complex values with finite support.

Transform conventions, with e(t) = exp(2 pi i t):

    forward:  F(a) = sum_x f(x) e(-x . a / N)
    inverse:  f(x) = N^(-d) sum_a F(a) e(x . a / N)

These match numpy's fftn/ifftn normalization, which supplies the fast
path; a naive double sum is kept alongside as the slow reference valid
for any period.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "LatticeFunction",
    "Spectrum",
    "dense",
    "sparse",
    "delta",
    "dft_forward",
    "dft_inverse",
    "dft_forward_naive",
    "convolve",
    "lp_norm",
    "random_test_function",
    "trial_rng",
]


@dataclass
class LatticeFunction:
    """Dense periodic or sparse finite-support function on a lattice.

    Exactly one of `values` (dense, shape (period,)*dim) and `entries`
    (sparse point -> value) is set.  `meta` carries advisory flags such
    as kernel wraparound; it never changes numerical results.
    """

    dim: int
    values: np.ndarray | None = None
    entries: dict[tuple[int, ...], complex] | None = None
    period: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def is_dense(self) -> bool:
        return self.values is not None

    def to_dense(self, period: int) -> "LatticeFunction":
        """Sparse to dense by reducing points modulo the period."""
        if self.is_dense:
            if period != self.period:
                raise ValueError("dense function already has a period")
            return self
        out = np.zeros((period,) * self.dim, dtype=np.complex128)
        assert self.entries is not None
        for pt, val in self.entries.items():
            idx = tuple(int(c) % period for c in pt)
            out[idx] += val
        return LatticeFunction(dim=self.dim, values=out, period=period, meta=dict(self.meta))

    def support_radius(self) -> int:
        """Largest coordinate magnitude over the sparse support."""
        if self.is_dense:
            raise ValueError("support radius is a sparse-side notion")
        assert self.entries is not None
        if not self.entries:
            return 0
        return max(abs(int(c)) for pt in self.entries for c in pt)


@dataclass
class Spectrum:
    """Forward transform coefficients on the dual period-N grid."""

    dim: int
    period: int
    coefficients: np.ndarray


def dense(values: np.ndarray, period: int | None = None) -> LatticeFunction:
    arr = np.asarray(values, dtype=np.complex128)
    n = arr.shape[0]
    if any(s != n for s in arr.shape):
        raise ValueError("dense grid must be a cube")
    if period is not None and period != n:
        raise ValueError("period disagrees with array shape")
    return LatticeFunction(dim=arr.ndim, values=arr, period=n)


def sparse(entries: Mapping[Sequence[int], complex], dim: int) -> LatticeFunction:
    store: dict[tuple[int, ...], complex] = {}
    for pt, val in entries.items():
        tpt = tuple(int(c) for c in pt)
        if len(tpt) != dim:
            raise ValueError(f"point {tpt} does not have {dim} coordinates")
        store[tpt] = complex(val)
    return LatticeFunction(dim=dim, entries=store)


def delta(dim: int, period: int) -> LatticeFunction:
    out = np.zeros((period,) * dim, dtype=np.complex128)
    out[(0,) * dim] = 1.0
    return LatticeFunction(dim=dim, values=out, period=period)


def dft_forward(f: LatticeFunction) -> Spectrum:
    """Forward coefficients via the fast transform (any period)."""
    if not f.is_dense:
        raise ValueError("forward transform needs a dense periodic function")
    assert f.values is not None and f.period is not None
    return Spectrum(dim=f.dim, period=f.period, coefficients=np.fft.fftn(f.values))


def dft_inverse(spec: Spectrum) -> LatticeFunction:
    """Inverse transform with the 1/N^d normalization."""
    vals = np.fft.ifftn(spec.coefficients)
    return LatticeFunction(dim=spec.dim, values=vals, period=spec.period)


def dft_forward_naive(f: LatticeFunction) -> Spectrum:
    """Reference double-sum transform, O(N^(2d)); any period."""
    if not f.is_dense:
        raise ValueError("forward transform needs a dense periodic function")
    assert f.values is not None and f.period is not None
    n, d = f.period, f.dim
    coords = list(itertools.product(range(n), repeat=d))
    out = np.zeros((n,) * d, dtype=np.complex128)
    for a in coords:
        acc = 0.0 + 0.0j
        for x in coords:
            phase = sum(xi * ai for xi, ai in zip(x, a)) / n
            acc += f.values[x] * np.exp(-2j * np.pi * phase)
        out[a] = acc
    return Spectrum(dim=d, period=n, coefficients=out)


def _sparse_convolve(
    f: dict[tuple[int, ...], complex], g: dict[tuple[int, ...], complex]
) -> dict[tuple[int, ...], complex]:
    out: dict[tuple[int, ...], complex] = {}
    for pf, vf in f.items():
        for pg, vg in g.items():
            key = tuple(a + b for a, b in zip(pf, pg))
            out[key] = out.get(key, 0.0) + vf * vg
    return {k: v for k, v in out.items() if v != 0}


def convolve(f: LatticeFunction, kernel: LatticeFunction) -> LatticeFunction:
    """(f * kernel)(x) = sum_y kernel(y) f(x - y).

    Dense f: circular convolution on the period-N grid by shifted
    accumulation.  When the kernel support diameter reaches the period,
    wraparound is flagged in the result metadata (the circular model
    remains the computational truth).  Sparse f with sparse kernel is an
    exact non-periodic convolution.
    """
    if kernel.is_dense:
        raise ValueError("kernel must be sparse (finite support)")
    assert kernel.entries is not None
    if f.is_dense:
        assert f.values is not None and f.period is not None
        out = np.zeros_like(f.values)
        for pt, w in kernel.entries.items():
            out += w * np.roll(f.values, shift=pt, axis=tuple(range(f.dim)))
        meta = {}
        if kernel.entries and 2 * kernel.support_radius() >= f.period:
            meta["wraparound"] = True
        return LatticeFunction(dim=f.dim, values=out, period=f.period, meta=meta)
    assert f.entries is not None
    return LatticeFunction(
        dim=f.dim, entries=_sparse_convolve(f.entries, kernel.entries)
    )


def lp_norm(f: LatticeFunction, p: float) -> float:
    """Counting-measure l^p norm; p = inf gives the sup of |f|."""
    if f.is_dense:
        assert f.values is not None
        mags = np.abs(f.values).ravel()
    else:
        assert f.entries is not None
        mags = np.abs(np.array(list(f.entries.values()), dtype=np.complex128))
    if mags.size == 0:
        return 0.0
    if math.isinf(p):
        return float(mags.max())
    if p <= 0:
        raise ValueError("p must be positive")
    return float((mags**p).sum() ** (1.0 / p))


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Named portable generator with the per-trial derived seed (seed XOR trial)."""
    return np.random.Generator(np.random.PCG64(seed ^ trial))


def random_test_function(
    seed: int,
    kind: str,
    *,
    dim: int,
    period: int,
    trial: int = 0,
    box: Sequence[int] | None = None,
    freq_set: Iterable[Sequence[int]] | None = None,
    freq_mask: np.ndarray | None = None,
) -> LatticeFunction:
    """Deterministic dense test functions on the period-N grid.

    Kinds: "gaussian-iid" (real iid normals), "delta", "box-indicator"
    (indicator of a corner box), "fourier-band" (iid complex Gaussian
    coefficients on a prescribed frequency set or mask, zero elsewhere).
    """
    rng = trial_rng(seed, trial)
    shape = (period,) * dim
    if kind == "gaussian-iid":
        vals = rng.standard_normal(shape).astype(np.complex128)
        return LatticeFunction(dim=dim, values=vals, period=period)
    if kind == "delta":
        return delta(dim, period)
    if kind == "box-indicator":
        extent = list(box) if box is not None else [max(1, period // 4)] * dim
        if len(extent) != dim:
            raise ValueError("box extent must give one bound per axis")
        vals = np.zeros(shape, dtype=np.complex128)
        vals[tuple(slice(0, int(b)) for b in extent)] = 1.0
        return LatticeFunction(dim=dim, values=vals, period=period)
    if kind == "fourier-band":
        if (freq_set is None) == (freq_mask is None):
            raise ValueError("fourier-band needs exactly one of freq_set, freq_mask")
        if freq_mask is None:
            freq_mask = np.zeros(shape, dtype=bool)
            for a in freq_set:  # type: ignore[union-attr]
                freq_mask[tuple(int(c) % period for c in a)] = True
        if freq_mask.shape != shape:
            raise ValueError("frequency mask shape disagrees with the grid")
        coeff = np.zeros(shape, dtype=np.complex128)
        m = int(freq_mask.sum())
        if m == 0:
            raise ValueError("fourier-band frequency set is empty")
        coeff[freq_mask] = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        vals = np.fft.ifftn(coeff)
        out = LatticeFunction(dim=dim, values=vals, period=period)
        out.meta["freq_mask"] = freq_mask
        return out
    raise ValueError(f"unknown test-function kind {kind!r}")
