"""Averages over dilated simplex copies acting on lattice functions.

The average at squared dilation lambda_sq convolves with the uniform
probability kernel on the copy set in (Z^n)^k.  Dense periodic inputs
may be convolved either by direct shifted accumulation or spectrally
(kernel reduced modulo the period, transform product); the two routes
compute the same circular convolution and stay available side by side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .grid import LatticeFunction, Spectrum, convolve, dense
from .lattice import CopySet, SimplexConfig, enumerate_simplex_copies
from .multipliers import multiplier_grid

__all__ = [
    "EmptyCopySetError",
    "average_kernel",
    "kernel_on_grid",
    "kernel_spectrum",
    "simplex_average",
    "spherical_average",
    "SmoothedKernel",
    "smoothed_kernel",
    "LocalSupResult",
    "local_sup_average",
]

CopyProvider = Callable[[SimplexConfig, int], CopySet]


class EmptyCopySetError(ValueError):
    """The dilation admits no isometric copies, so no average exists."""


def _copies(
    config: SimplexConfig, lambda_sq: int, provider: CopyProvider | None
) -> CopySet:
    if provider is not None:
        return provider(config, lambda_sq)
    return enumerate_simplex_copies(config, lambda_sq)


def average_kernel(
    config: SimplexConfig,
    lambda_sq: int,
    copies: CopySet | None = None,
    provider: CopyProvider | None = None,
) -> LatticeFunction:
    """Uniform probability kernel on the copy set (sparse, mass one)."""
    cs = copies if copies is not None else _copies(config, lambda_sq, provider)
    if cs.count == 0:
        raise EmptyCopySetError(
            f"no copies at squared dilation {lambda_sq}; the average is undefined"
        )
    w = 1.0 / cs.count
    entries = {tuple(int(c) for c in row): w for row in cs.points}
    out = LatticeFunction(dim=cs.dim, entries=entries)
    out.meta["lambda_sq"] = lambda_sq
    out.meta["count"] = cs.count
    return out


def kernel_on_grid(kernel: LatticeFunction, period: int) -> np.ndarray:
    """Sparse kernel reduced modulo the period onto a dense grid."""
    return kernel.to_dense(period).values  # type: ignore[return-value]


def kernel_spectrum(kernel: LatticeFunction, period: int) -> np.ndarray:
    """Forward transform of the mod-period kernel."""
    return np.fft.fftn(kernel_on_grid(kernel, period))


def simplex_average(
    f: LatticeFunction,
    config: SimplexConfig,
    lambda_sq: int,
    method: str = "auto",
    copies: CopySet | None = None,
    provider: CopyProvider | None = None,
) -> LatticeFunction:
    """Average of f over isometric copies at the given squared dilation.

    Dense inputs choose the spectral route once the kernel has more
    points than period^dim / dim, direct accumulation otherwise; `method`
    ("direct" | "spectral") forces a route.  Sparse inputs always use the
    exact non-periodic convolution.
    """
    if lambda_sq == 0:
        # The only copy is the degenerate one at the origin.
        if f.is_dense:
            assert f.values is not None
            return LatticeFunction(dim=f.dim, values=f.values.copy(), period=f.period)
        assert f.entries is not None
        return LatticeFunction(dim=f.dim, entries=dict(f.entries))
    cs = copies if copies is not None else _copies(config, lambda_sq, provider)
    kern = average_kernel(config, lambda_sq, copies=cs)
    if not f.is_dense:
        if method == "spectral":
            raise ValueError("the spectral route needs a dense periodic input")
        return convolve(f, kern)
    assert f.values is not None and f.period is not None
    if f.dim != cs.dim:
        raise ValueError(
            f"function dimension {f.dim} disagrees with copy dimension {cs.dim}"
        )
    if method not in ("auto", "direct", "spectral"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        threshold = (f.period**f.dim) / f.dim
        method = "spectral" if cs.count > threshold else "direct"
    if method == "direct":
        return convolve(f, kern)
    spec = np.fft.fftn(f.values) * kernel_spectrum(kern, f.period)
    out = LatticeFunction(
        dim=f.dim, values=np.fft.ifftn(spec), period=f.period
    )
    if 2 * kern.support_radius() >= f.period:
        out.meta["wraparound"] = True
    return out


def spherical_average(
    f: LatticeFunction, n: int, lambda_sq: int, method: str = "auto"
) -> LatticeFunction:
    """Average over the sphere |y|^2 = lambda_sq (the one-vertex simplex
    on the first coordinate axis); shares the simplex code path exactly."""
    axis = tuple(1 if i == 0 else 0 for i in range(n))
    config = SimplexConfig(n=n, vertices=(axis,))
    return simplex_average(f, config, lambda_sq, method=method)


@dataclass
class SmoothedKernel:
    """Smoothing multiplier composed with an average kernel on a grid."""

    values: np.ndarray
    spectrum: np.ndarray
    period: int
    scale: int
    wraparound: bool

    def mass(self) -> complex:
        return complex(self.values.sum())


def smoothed_kernel(
    config: SimplexConfig,
    l: int,
    period: int,
    copies: CopySet | None = None,
    provider: CopyProvider | None = None,
) -> SmoothedKernel:
    """Band-0 smoothing applied to the dyadic average kernel at scale l.

    The spectrum is the configured scale-l multiplier times the copy-set
    kernel transform on the dual grid; the space side comes back through
    the inverse transform.  Wraparound is flagged once twice the kernel
    spread reaches the period.
    """
    lam = 2**l
    lambda_sq = lam * lam
    cs = copies if copies is not None else _copies(config, lambda_sq, provider)
    kern = average_kernel(config, lambda_sq, copies=cs)
    dim = cs.dim
    mult = multiplier_grid(config, l, 0, period, dim)
    spec = mult * kernel_spectrum(kern, period)
    vals = np.fft.ifftn(spec)
    # The smoothing spread scales like the width times the step budget;
    # flag once the dilated simplex alone comes close.
    wrap = 2 * lam * math.isqrt(config.norm_sq + 1) >= period or (
        2 * kern.support_radius() >= period
    )
    return SmoothedKernel(
        values=vals, spectrum=spec, period=period, scale=l, wraparound=wrap
    )


@dataclass
class LocalSupResult:
    """Pointwise supremum of |average| over a sampled dilation range."""

    field: np.ndarray
    lambda_sqs: list[int]
    skipped: list[int]
    scale: int
    stride: int


def local_sup_average(
    f: LatticeFunction,
    config: SimplexConfig,
    l: int,
    stride: int = 1,
    provider: CopyProvider | None = None,
    method: str = "auto",
) -> LocalSupResult:
    """sup over lambda_sq in [4^l, 4^(l+1)] (stride-sampled) of |A f|.

    Dilations with empty copy sets are skipped and recorded.  Raises if
    every sampled dilation is empty.
    """
    if l < 0:
        raise ValueError("scale must be nonnegative")
    if stride < 1:
        raise ValueError("stride must be a positive integer")
    if not f.is_dense:
        raise ValueError("the running supremum needs a dense periodic input")
    lo, hi = 4**l, 4 ** (l + 1)
    used: list[int] = []
    skipped: list[int] = []
    out: np.ndarray | None = None
    for lambda_sq in range(lo, hi + 1, stride):
        try:
            avg = simplex_average(f, config, lambda_sq, method=method, provider=provider)
        except EmptyCopySetError:
            skipped.append(lambda_sq)
            continue
        mag = np.abs(avg.values)
        out = mag if out is None else np.maximum(out, mag)
        used.append(lambda_sq)
    if out is None:
        raise EmptyCopySetError(
            f"every sampled dilation in [{lo}, {hi}] has an empty copy set"
        )
    return LocalSupResult(
        field=out, lambda_sqs=used, skipped=skipped, scale=l, stride=stride
    )
