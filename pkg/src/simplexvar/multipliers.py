"""Band-limited smoothing multipliers on the torus dual to Z^d.

The building block is a tensor bump b(t) on the real line: 1 on
|t| <= 1/2, 0 on |t| >= 1, and the smooth switch
sigma(2(1 - |t|)) with sigma(u) = e^(-1/u) / (e^(-1/u) + e^(-1/(1-u)))
in between.  Sampling the mollifier with a lattice step and a smoothing
width folds the bump onto the torus:

    M(step, width)(xi) = sum_{x in Z^d} prod_i b((width/step)(x_i + step xi_i))

Only finitely many x contribute per coordinate, because b vanishes
outside (-1, 1).  At rational frequencies every plateau and support
decision is made in exact integer arithmetic; floating point enters only
through the smooth switch strictly inside (1/2, 1).

A configured multiplier uses step = lcm(1..2^j) for the band index j and
width = (2|S|)^(l - j) for the scale index l, where |S| is the norm of
the simplex vertex tuple, so width^2 = (4 |S|^2)^(l - j) stays an exact
rational.  Two difference operators on consecutive multipliers appear:
the band difference (j versus j+1, which telescopes across bands and
drives the three-part decomposition) and the scale difference (l versus
l+1 at a fixed band, which shares one lattice step and obeys the
square-sum bound).  They are distinct objects and are kept separate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .lattice import SimplexConfig

__all__ = [
    "lcm_step",
    "bump_profile",
    "bump_nd",
    "sampled_bump_multiplier",
    "MultiplierSpec",
    "smoothing_multiplier",
    "band_difference",
    "scale_difference",
    "multiplier_table",
    "multiplier_grid",
    "band_difference_grid",
    "FrequencyArcs",
    "torus_lattice_distance_sq",
    "arc_grid_mask",
    "BandDecomposition",
    "band_decompose",
    "scale_difference_square_sums",
]

_MAX_BAND = 5
_COORD_TERM_LIMIT = 1_000_000
_warned_narrow: set[tuple[int, int, int]] = set()


@lru_cache(maxsize=None)
def lcm_step(j: int) -> int:
    """Lattice step for band j: lcm of 1..2^j.

    Bands j >= 6 are rejected: the step would exceed the 64-bit range
    the serialized formats assume.
    """
    if j < 0:
        raise ValueError("band index must be nonnegative")
    if j > _MAX_BAND:
        raise OverflowError(f"band {j} step exceeds the supported range (j <= {_MAX_BAND})")
    out = 1
    for t in range(2, 2**j + 1):
        out = math.lcm(out, t)
    return out


def bump_profile(t: float) -> float:
    """Even bump on the line: 1 inside |t| <= 1/2, 0 outside |t| >= 1."""
    a = abs(t)
    if a <= 0.5:
        return 1.0
    if a >= 1.0:
        return 0.0
    u = 2.0 * (1.0 - a)
    inner = math.exp(-1.0 / u)
    outer = math.exp(-1.0 / (1.0 - u))
    return inner / (inner + outer)


def bump_nd(xi: Sequence[float]) -> float:
    """Tensor-product bump over the coordinates."""
    out = 1.0
    for c in xi:
        out *= bump_profile(float(c))
        if out == 0.0:
            return 0.0
    return out


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(float(x))


def _poisson_coord(step: int, width_sq: Fraction, q: Fraction) -> float:
    """One coordinate of the folded bump sum at frequency q.

    Sums b((width/step)(x + step q)) over the integers x inside the bump
    support.  The squared argument is an exact rational, so the plateau
    (contribution exactly 1) and the support boundary (exactly 0) are
    decided without rounding.
    """
    if width_sq <= 0:
        raise ValueError("squared width must be positive")
    center = -step * q
    # ceil(sqrt(step^2 / width_sq)) bounds the support half-span.
    span_sq = Fraction(step * step, 1) / width_sq
    half_span = math.isqrt(span_sq.numerator // span_sq.denominator) + 1
    if 2 * half_span + 3 > _COORD_TERM_LIMIT:
        raise ValueError("folded bump window is too large; narrow the parameters")
    lo = math.floor(center) - half_span - 1
    hi = math.ceil(center) + half_span + 1
    step_sq = step * step
    total = 0.0
    for x in range(lo, hi + 1):
        y = x + step * q
        t_sq = y * y * width_sq / step_sq
        if t_sq >= 1:
            continue
        if 4 * t_sq <= 1:
            total += 1.0
        else:
            total += bump_profile(math.sqrt(float(t_sq)))
    return total


def sampled_bump_multiplier(step: int, width: float, xi: Sequence) -> float:
    """Folded bump multiplier with explicit step and width, any dimension."""
    if step < 1:
        raise ValueError("step must be a positive integer")
    if not width > 0:
        raise ValueError("width must be positive")
    w2 = _as_fraction(width) ** 2
    out = 1.0
    for c in xi:
        out *= _poisson_coord(step, w2, _as_fraction(c))
        if out == 0.0:
            return 0.0
    return out


def _width_sq(norm_sq: int, l: int, j: int) -> Fraction:
    base = 4 * norm_sq
    if l >= j:
        return Fraction(base ** (l - j))
    return Fraction(1, base ** (j - l))


@dataclass(frozen=True)
class MultiplierSpec:
    """Configured multiplier: step lcm(1..2^j), width (2|S|)^(l-j)."""

    norm_sq: int
    l: int
    j: int

    def __post_init__(self) -> None:
        if self.norm_sq < 1:
            raise ValueError("squared vertex norm must be positive")
        if self.l < 0:
            raise ValueError("scale index must be nonnegative")
        lcm_step(self.j)

    @property
    def step(self) -> int:
        return lcm_step(self.j)

    @property
    def width_sq(self) -> Fraction:
        return _width_sq(self.norm_sq, self.l, self.j)

    @property
    def narrow(self) -> bool:
        """Width at or below the step: folded terms can pile up past 1."""
        return self.width_sq <= self.step * self.step

    def warn_if_narrow(self) -> None:
        key = (self.norm_sq, self.l, self.j)
        if self.narrow and key not in _warned_narrow:
            _warned_narrow.add(key)
            warnings.warn(
                f"multiplier width <= step at scale {self.l}, band {self.j}; "
                "plateau and bound guarantees degrade",
                RuntimeWarning,
                stacklevel=3,
            )


def _resolve_norm_sq(config) -> int:
    if isinstance(config, SimplexConfig):
        return config.norm_sq
    return int(config)


def smoothing_multiplier(config, l: int, j: int, xi: Sequence) -> float:
    """Configured multiplier value at frequency xi (exact at rationals)."""
    spec = MultiplierSpec(_resolve_norm_sq(config), l, j)
    spec.warn_if_narrow()
    w2 = spec.width_sq
    step = spec.step
    out = 1.0
    for c in xi:
        out *= _poisson_coord(step, w2, _as_fraction(c))
        if out == 0.0:
            return 0.0
    return out


def band_difference(config, l: int, j: int, xi: Sequence) -> float:
    """Multiplier increment from band j to band j+1 at a fixed scale.

    Summing over j telescopes, which is what the three-part
    decomposition relies on.
    """
    return smoothing_multiplier(config, l, j + 1, xi) - smoothing_multiplier(
        config, l, j, xi
    )


def scale_difference(config, l: int, j: int, xi: Sequence) -> float:
    """Multiplier increment from scale l to scale l+1 at a fixed band.

    Both terms share the band-j lattice step, so the increment vanishes
    on the inner half-arcs and its squares sum geometrically.
    """
    return smoothing_multiplier(config, l + 1, j, xi) - smoothing_multiplier(
        config, l, j, xi
    )


@lru_cache(maxsize=4096)
def _table_cached(norm_sq: int, l: int, j: int, period: int) -> tuple[float, ...]:
    spec = MultiplierSpec(norm_sq, l, j)
    spec.warn_if_narrow()
    w2 = spec.width_sq
    step = spec.step
    return tuple(
        _poisson_coord(step, w2, Fraction(a, period)) for a in range(period)
    )


def multiplier_table(config, l: int, j: int, period: int) -> np.ndarray:
    """One-coordinate multiplier values at the grid frequencies a/period."""
    vals = _table_cached(_resolve_norm_sq(config), l, j, period)
    return np.array(vals, dtype=np.float64)


def _outer_product_grid(table: np.ndarray, dim: int) -> np.ndarray:
    out = np.array(1.0)
    n = table.shape[0]
    for axis in range(dim):
        shape = [1] * dim
        shape[axis] = n
        out = out * table.reshape(shape)
    return out


def multiplier_grid(config, l: int, j: int, period: int, dim: int) -> np.ndarray:
    """Configured multiplier on the full dual grid, shape (period,)*dim."""
    return _outer_product_grid(multiplier_table(config, l, j, period), dim)


def band_difference_grid(config, l: int, j: int, period: int, dim: int) -> np.ndarray:
    return multiplier_grid(config, l, j + 1, period, dim) - multiplier_grid(
        config, l, j, period, dim
    )


def torus_lattice_distance_sq(q: Fraction, step: int) -> Fraction:
    """Squared torus distance from q to the lattice (1/step) Z, exact."""
    y = (q * step) % 1
    d = min(y, 1 - y)
    return (d / step) ** 2


@dataclass(frozen=True)
class FrequencyArcs:
    """Arc family: points within (2|S|)^(j-l) of the (1/step)Z lattice."""

    norm_sq: int
    l: int
    j: int

    @property
    def step(self) -> int:
        return lcm_step(self.j)

    @property
    def half_width_sq(self) -> Fraction:
        return _width_sq(self.norm_sq, self.j, self.l)

    def covers_torus(self) -> bool:
        """Arcs overlap into full coverage once the half width reaches
        half the lattice spacing."""
        return self.half_width_sq >= Fraction(1, 4 * self.step * self.step)

    def contains(self, xi: Sequence) -> bool:
        """Sup-distance membership, exact at rational frequencies."""
        hw2 = self.half_width_sq
        step = self.step
        return all(
            torus_lattice_distance_sq(_as_fraction(c), step) <= hw2 for c in xi
        )


def _coord_near_mask(
    step: int, threshold_sq: Fraction, period: int
) -> np.ndarray:
    out = np.zeros(period, dtype=bool)
    for a in range(period):
        out[a] = torus_lattice_distance_sq(Fraction(a, period), step) <= threshold_sq
    return out


def arc_grid_mask(
    config, l: int, j: int, period: int, dim: int, shrink: Fraction = Fraction(1)
) -> np.ndarray:
    """Boolean grid of arc membership on the dual period-N grid.

    `shrink` scales the arc half-width (1/2 selects the inner plateau
    half-arcs).  All comparisons are exact integer arithmetic.
    """
    arcs = FrequencyArcs(_resolve_norm_sq(config), l, j)
    threshold_sq = arcs.half_width_sq * shrink * shrink
    near = _coord_near_mask(arcs.step, threshold_sq, period)
    grid = np.array(True)
    for axis in range(dim):
        shape = [1] * dim
        shape[axis] = period
        grid = grid & near.reshape(shape)
    return grid


@dataclass
class BandDecomposition:
    """Three-part spectral split: base smoothing, middle bands, remainder."""

    base: np.ndarray
    middle: np.ndarray
    remainder: np.ndarray
    scale: int
    band_count: int
    top_band: int

    def total(self) -> np.ndarray:
        return self.base + self.middle + self.remainder


def band_decompose(values: np.ndarray, config, l: int) -> BandDecomposition:
    """Split a dense periodic function along the band ladder at scale l.

    With J = floor(log2 l): the base part applies the band-0 multiplier,
    the middle part sums the band differences for j = 0 .. J-3 (empty
    when J < 3), and the remainder subtracts the band-(max(J-2, 0))
    smoothing from the identity.  The three parts sum to the input
    exactly by telescoping.
    """
    if l < 1:
        raise ValueError("scale must be a positive integer")
    arr = np.asarray(values, dtype=np.complex128)
    period = arr.shape[0]
    dim = arr.ndim
    cap = l.bit_length() - 1  # floor(log2 l)
    top = max(cap - 2, 0)
    for j in range(top + 1):
        if period % lcm_step(j) != 0:
            raise ValueError(
                f"grid period {period} is not a multiple of the band-{j} step "
                f"{lcm_step(j)}; decomposition frequencies would miss the arcs"
            )
    spec = np.fft.fftn(arr)
    base_mult = multiplier_grid(config, l, 0, period, dim)
    top_mult = (
        base_mult if top == 0 else multiplier_grid(config, l, top, period, dim)
    )
    middle_mult = top_mult - base_mult  # telescoped sum of band differences
    base = np.fft.ifftn(spec * base_mult)
    middle = np.fft.ifftn(spec * middle_mult)
    remainder = arr - np.fft.ifftn(spec * top_mult)
    n_mid = max(cap - 2, 0)  # bands 0 .. J-3
    return BandDecomposition(
        base=base,
        middle=middle,
        remainder=remainder,
        scale=l,
        band_count=n_mid,
        top_band=top,
    )


def scale_difference_square_sums(
    config, j: int, xi: Sequence, l_max: int
) -> list[float]:
    """Partial sums of squared scale differences along l = 2^j .. l_max.

    Entry t is sum over l in [2^j, 2^j + t] of the squared increment
    between the scale-l and scale-(l+1) multipliers at frequency xi.
    """
    l_min = 2**j
    if l_max < l_min:
        raise ValueError("the scale range is empty")
    norm_sq = _resolve_norm_sq(config)
    frozen = [_as_fraction(c) for c in xi]
    values = [
        smoothing_multiplier(norm_sq, l, j, frozen) for l in range(l_min, l_max + 2)
    ]
    sums: list[float] = []
    acc = 0.0
    for t in range(l_max - l_min + 1):
        acc += (values[t + 1] - values[t]) ** 2
        sums.append(acc)
    return sums
