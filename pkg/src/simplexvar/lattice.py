"""Integer lattice geometry: spheres, simplex copy sets, and their counts.

A configuration is a simplex S = {0, s_1, ..., s_k} in Z^n with nonzero,
linearly independent vertices.  For an integer squared dilation lambda_sq,
the copy set collects all tuples (m_1, ..., m_k) in (Z^n)^k whose pairwise
squared distances (with m_0 = 0 implicit) equal lambda_sq times the squared
distances of S.  The squared dilation is the integer parameter everywhere;
odd powers of the dilation never appear in any interface.

Counting never materializes points.  Enumeration is exact integer
backtracking over coordinates with square-residual and linear-constraint
pruning, and emits points in lexicographic order on the concatenated
coordinates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache, cached_property
from typing import Callable, Iterator, Sequence

import numpy as np

__all__ = [
    "SimplexConfig",
    "CopySet",
    "count_representations",
    "enumerate_sphere",
    "enumerate_simplex_copies",
    "count_simplex_copies",
    "verify_isometry",
    "scaling_rows",
    "copyset_to_text",
    "copyset_from_text",
]


def _gram_det(rows: Sequence[Sequence[int]]) -> int:
    """Determinant of the integer Gram matrix of the given row vectors.

    Bareiss fraction-free elimination; all intermediates stay integers, so
    the nonsingularity test is exact for any magnitude.
    """
    k = len(rows)
    gram = [[sum(a * b for a, b in zip(u, v)) for v in rows] for u in rows]
    prev = 1
    for p in range(k - 1):
        if gram[p][p] == 0:
            # Row swap flips the determinant sign, which the zero test
            # does not care about.
            swap = next((r for r in range(p + 1, k) if gram[r][p] != 0), None)
            if swap is None:
                return 0
            gram[p], gram[swap] = gram[swap], gram[p]
        for r in range(p + 1, k):
            for c in range(p + 1, k):
                gram[r][c] = (gram[r][c] * gram[p][p] - gram[r][p] * gram[p][c]) // prev
            gram[r][p] = 0
        prev = gram[p][p]
    return gram[k - 1][k - 1]


@dataclass(frozen=True)
class SimplexConfig:
    """Simplex {0, s_1, ..., s_k} in Z^n given by its nonzero vertices."""

    n: int
    vertices: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("dimension must be positive")
        if not self.vertices:
            raise ValueError("at least one nonzero vertex is required")
        verts = tuple(tuple(int(c) for c in v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        for v in verts:
            if len(v) != self.n:
                raise ValueError(f"vertex {v} does not have {self.n} coordinates")
            if not any(v):
                raise ValueError("vertices must be nonzero")
        if len(verts) > self.n:
            raise ValueError("more vertices than dimensions cannot be independent")
        if _gram_det(verts) == 0:
            raise ValueError("vertices must be linearly independent")

    @property
    def k(self) -> int:
        return len(self.vertices)

    @cached_property
    def dist_sq(self) -> tuple[tuple[int, ...], ...]:
        """Squared distance matrix over vertices 0, s_1, ..., s_k."""
        pts = ((0,) * self.n,) + self.vertices
        return tuple(
            tuple(sum((a - b) ** 2 for a, b in zip(u, v)) for v in pts) for u in pts
        )

    @cached_property
    def norm_sq(self) -> int:
        """Squared Euclidean norm of the concatenated vertex tuple."""
        return sum(c * c for v in self.vertices for c in v)

    @property
    def scaling_exponent(self) -> int:
        """Expected growth exponent of copy-set counts in the dilation."""
        return self.n * self.k - self.k * (self.k + 1)

    @property
    def regime_ok(self) -> bool:
        """Whether the dimension is large enough for stable count scaling."""
        return self.n >= 2 * self.k + 3

    @cached_property
    def dyadic_base(self) -> int:
        """Smallest integer at least twice the vertex-tuple norm."""
        root = math.isqrt(4 * self.norm_sq)
        return root if root * root == 4 * self.norm_sq else root + 1


@dataclass(frozen=True)
class CopySet:
    """Enumerated isometric copies of a dilated simplex (or sphere points).

    Rows of `points` are the concatenated coordinates (m_1, ..., m_k),
    lexicographically sorted, one row per copy.
    """

    kind: str
    n: int
    k: int
    lambda_sq: int
    dist_sq: tuple[tuple[int, ...], ...]
    points: np.ndarray

    @property
    def count(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return self.n * self.k


@lru_cache(maxsize=None)
def _rep_count(n: int, m: int) -> int:
    if m < 0:
        return 0
    if n == 0:
        return 1 if m == 0 else 0
    total = _rep_count(n - 1, m)
    for t in range(1, math.isqrt(m) + 1):
        total += 2 * _rep_count(n - 1, m - t * t)
    return total


def count_representations(n: int, m: int) -> int:
    """Number of y in Z^n with |y|^2 = m, by coordinate recursion.

    Exact for any arguments; no points are materialized.
    """
    if n < 1:
        raise ValueError("dimension must be positive")
    if m < 0:
        raise ValueError("squared radius must be nonnegative")
    return _rep_count(n, m)


def _sphere_points(n: int, m: int, prefix: list[int], out: list[tuple[int, ...]]) -> None:
    if n == 1:
        r = math.isqrt(m)
        if r * r == m:
            if r == 0:
                out.append(tuple(prefix + [0]))
            else:
                out.append(tuple(prefix + [-r]))
                out.append(tuple(prefix + [r]))
        return
    r = math.isqrt(m)
    for t in range(-r, r + 1):
        prefix.append(t)
        _sphere_points(n - 1, m - t * t, prefix, out)
        prefix.pop()


def enumerate_sphere(n: int, m: int) -> CopySet:
    """All y in Z^n with |y|^2 = m, in lexicographic order."""
    if n < 1:
        raise ValueError("dimension must be positive")
    if m < 0:
        raise ValueError("squared radius must be nonnegative")
    out: list[tuple[int, ...]] = []
    _sphere_points(n, m, [], out)
    # The two-branch base case emits -r before r but keeps first-coordinate
    # ascent; rows are lexicographic except possibly the final coordinate
    # pair, which the base case already orders.  Sort defensively anyway.
    pts = np.array(sorted(out), dtype=np.int64).reshape(len(out), n)
    dist = ((0, 1), (1, 0))
    return CopySet(kind="sphere", n=n, k=1, lambda_sq=m, dist_sq=dist, points=pts)


def _constrained_sphere(
    n: int,
    budget: int,
    constraints: list[tuple[tuple[int, ...], int]],
) -> Iterator[tuple[int, ...]]:
    """All x in Z^n with |x|^2 = budget and x . v = b for each (v, b).

    Backtracks over coordinates in ascending order.  Prunes on the square
    residual and on each linear constraint via the bound
    |remaining dot| <= (suffix |v| sum) * isqrt(remaining budget).
    """
    suffix: list[list[int]] = []
    for v, _ in constraints:
        s = [0] * (n + 1)
        for q in range(n - 1, -1, -1):
            s[q] = s[q + 1] + abs(v[q])
        suffix.append(s)

    x = [0] * n

    def rec(p: int, rem: int, residuals: list[int]) -> Iterator[tuple[int, ...]]:
        if p == n - 1:
            r = math.isqrt(rem)
            if r * r != rem:
                return
            cands = (0,) if r == 0 else (-r, r)
            for t in cands:
                if all(
                    res == t * v[n - 1] for (v, _), res in zip(constraints, residuals)
                ):
                    x[p] = t
                    yield tuple(x)
            return
        r = math.isqrt(rem)
        for t in range(-r, r + 1):
            rem2 = rem - t * t
            bound = math.isqrt(rem2)
            ok = True
            new_res = []
            for ci, ((v, _), res) in enumerate(zip(constraints, residuals)):
                nr = res - t * v[p]
                if abs(nr) > suffix[ci][p + 1] * bound:
                    ok = False
                    break
                new_res.append(nr)
            if not ok:
                continue
            x[p] = t
            yield from rec(p + 1, rem2, new_res)

    yield from rec(0, budget, [b for _, b in constraints])


def _copy_tuples(
    config: SimplexConfig, lambda_sq: int
) -> Iterator[tuple[int, ...]]:
    """Yield concatenated copy tuples in lexicographic order."""
    k, n = config.k, config.n
    d = config.dist_sq
    radii = [lambda_sq * d[0][i + 1] for i in range(k)]

    # Cross terms: m_i . m_j = (c_i + c_j - lambda_sq * d_ij) / 2.  An odd
    # numerator leaves no integer solutions at all.
    dots: dict[tuple[int, int], int] = {}
    for i in range(k):
        for j in range(i):
            num = radii[i] + radii[j] - lambda_sq * d[j + 1][i + 1]
            if num % 2 != 0:
                return
            dots[(i, j)] = num // 2

    placed: list[tuple[int, ...]] = []

    def place(i: int) -> Iterator[tuple[int, ...]]:
        constraints = [(placed[j], dots[(i, j)]) for j in range(i)]
        for cand in _constrained_sphere(n, radii[i], constraints):
            placed.append(cand)
            if i + 1 == k:
                yield tuple(c for block in placed for c in block)
            else:
                yield from place(i + 1)
            placed.pop()

    yield from place(0)


def enumerate_simplex_copies(config: SimplexConfig, lambda_sq: int) -> CopySet:
    """All isometric copies of the simplex dilated by sqrt(lambda_sq).

    Solves |m_i|^2 = lambda_sq * d_0i together with the pairwise linear
    constraints induced by |m_i - m_j|^2 = lambda_sq * d_ij.  An empty
    result is a valid CopySet with count zero.
    """
    if lambda_sq < 0:
        raise ValueError("squared dilation must be nonnegative")
    rows = list(_copy_tuples(config, lambda_sq))
    pts = np.array(rows, dtype=np.int64).reshape(len(rows), config.k * config.n)
    return CopySet(
        kind="simplex",
        n=config.n,
        k=config.k,
        lambda_sq=lambda_sq,
        dist_sq=config.dist_sq,
        points=pts,
    )


def count_simplex_copies(config: SimplexConfig, lambda_sq: int) -> int:
    """Copy-set cardinality; uses the closed recursion when k = 1."""
    if config.k == 1:
        return count_representations(config.n, lambda_sq * config.dist_sq[0][1])
    return sum(1 for _ in _copy_tuples(config, lambda_sq))


def verify_isometry(
    config: SimplexConfig, lambda_sq: int, point: Sequence[int]
) -> bool:
    """Exact check of all pairwise squared-distance constraints."""
    k, n = config.k, config.n
    coords = [int(c) for c in point]
    if len(coords) != k * n:
        raise ValueError(f"expected {k * n} coordinates, got {len(coords)}")
    blocks = [(0,) * n] + [tuple(coords[i * n : (i + 1) * n]) for i in range(k)]
    d = config.dist_sq
    for i in range(k + 1):
        for j in range(i):
            gap = sum((a - b) ** 2 for a, b in zip(blocks[i], blocks[j]))
            if gap != lambda_sq * d[i][j]:
                return False
    return True


def scaling_rows(
    config: SimplexConfig,
    lambdas: Sequence[int],
    provider: Callable[[SimplexConfig, int], CopySet] | None = None,
) -> list[dict[str, object]]:
    """Counts and normalized ratios count / lambda^(nk - k(k+1)).

    Each row carries the raw count, the ratio, and a flag when the
    dimension falls below the stable-scaling regime n >= 2k + 3.  A
    provider, when given, replaces direct enumeration so counts can come
    from a cache.
    """
    rows = []
    expo = config.scaling_exponent
    for lam in lambdas:
        lam = int(lam)
        if lam < 1:
            raise ValueError("dilations must be positive integers")
        if provider is not None:
            cnt = provider(config, lam * lam).count
        else:
            cnt = count_simplex_copies(config, lam * lam)
        rows.append(
            {
                "lambda": lam,
                "lambda_sq": lam * lam,
                "count": cnt,
                "exponent": expo,
                "ratio": cnt / float(lam**expo),
                "regime_ok": config.regime_ok,
            }
        )
    return rows


def copyset_to_text(cs: CopySet, checksum: str | None = None) -> str:
    """Serialize a copy set: one JSON header line, then integer rows.

    Rows are space-separated decimal coordinates in canonical (sorted)
    order.  An optional content checksum is stored in the header.
    """
    header = {
        "kind": cs.kind,
        "n": cs.n,
        "k": cs.k,
        "lambda_sq": cs.lambda_sq,
        "dist_sq": [list(r) for r in cs.dist_sq],
        "count": cs.count,
    }
    if checksum is not None:
        header["sha256"] = checksum
    lines = [json.dumps(header, sort_keys=True)]
    lines.extend(" ".join(str(c) for c in row) for row in cs.points)
    return "\n".join(lines) + "\n"


def copyset_from_text(text: str) -> tuple[CopySet, str | None]:
    """Parse the text form; returns the copy set and the stored checksum."""
    lines = text.strip("\n").split("\n") if text.strip() else []
    if not lines:
        raise ValueError("empty copy-set record")
    header = json.loads(lines[0])
    for key in ("kind", "n", "k", "lambda_sq", "dist_sq", "count"):
        if key not in header:
            raise ValueError(f"copy-set header is missing {key!r}")
    count = int(header["count"])
    body = lines[1:]
    if len(body) != count:
        raise ValueError(f"expected {count} rows, found {len(body)}")
    dim = int(header["n"]) * int(header["k"])
    pts = np.zeros((count, dim), dtype=np.int64)
    for r, line in enumerate(body):
        parts = line.split()
        if len(parts) != dim:
            raise ValueError(f"row {r} has {len(parts)} coordinates, expected {dim}")
        pts[r] = [int(p) for p in parts]
    cs = CopySet(
        kind=str(header["kind"]),
        n=int(header["n"]),
        k=int(header["k"]),
        lambda_sq=int(header["lambda_sq"]),
        dist_sq=tuple(tuple(int(c) for c in row) for row in header["dist_sq"]),
        points=pts,
    )
    return cs, header.get("sha256")
