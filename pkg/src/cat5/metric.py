"""Finite metric spaces and the quadruple comparison via glued planar model triangles.

A quadruple p, q, x, y satisfies the comparison when

    d(p, q) <= |p~ - z~| + |z~ - q~|   for every z~ on the common side [x~ y~]

of the two planar triangles with the side lengths of (p, x, y) and (q, x, y),
glued along [x~ y~] on opposite sides.  The minimum over z~ has a closed form;
``quad_comparison`` returns its signed slack against d(p, q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import (
    AsymmetricMatrix,
    NonzeroDiagonal,
    NotRealizable,
    TriangleViolation,
    ZeroOffDiagonal,
)

#: Relative tolerance for exact-identity checks (validation, triangle realization).
REL_TOL = 1e-12

#: Relative comparison tolerance: slack >= -COMPARE_REL_TOL * diameter counts as holding.
COMPARE_REL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """A validated symmetric distance matrix over n labeled points (2 <= n <= 16)."""

    d: np.ndarray

    @property
    def n(self) -> int:
        return self.d.shape[0]

    @property
    def diameter(self) -> float:
        return float(self.d.max())

    def sub(self, indices) -> "FiniteMetricSpace":
        """Restriction to a tuple of distinct point indices (kept in the given order)."""
        idx = list(indices)
        return validate_metric(self.d[np.ix_(idx, idx)])


@dataclass(frozen=True)
class PlanarTriangle:
    """A triangle in the plane realizing three requested side lengths.

    Vertex a sits at the origin, b on the nonnegative x-axis, c in the closed
    upper half-plane.  Degenerate (collinear) triangles are permitted.
    """

    a: tuple[float, float]
    b: tuple[float, float]
    c: tuple[float, float]


@dataclass(frozen=True)
class QuadCheckResult:
    """Outcome of one quadruple comparison.

    ``slack`` is min_z (|p~ - z~| + |z~ - q~|) - d(p, q); the check holds when
    slack >= -tol for the configured comparison tolerance.
    """

    holds: bool
    slack: float
    labeling: tuple[tuple[int, int], tuple[int, int]]


@dataclass
class ComparisonReport:
    """Aggregate of quadruple checks over a whole space."""

    holds: bool
    worst_slack: float
    worst_labeling: tuple[tuple[int, int], tuple[int, int]] | None
    n_checked: int
    failures: list[QuadCheckResult] = field(default_factory=list)
    tolerance: float = 0.0


def validate_metric(raw) -> FiniteMetricSpace:
    """Validate a square matrix of reals as a finite metric space.

    Never repairs entries: any violation raises a structured error.

    Raises
    ------
    AsymmetricMatrix, NonzeroDiagonal, ZeroOffDiagonal, TriangleViolation
    """
    d = np.array(raw, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise AsymmetricMatrix(f"expected a square matrix, got shape {d.shape}")
    n = d.shape[0]
    if not 2 <= n <= 16:
        raise AsymmetricMatrix(f"point count {n} outside supported range [2, 16]")
    if not np.isfinite(d).all():
        raise AsymmetricMatrix("matrix contains non-finite entries")

    scale = float(np.abs(d).max())
    tol = REL_TOL * max(scale, 1.0)

    asym = np.abs(d - d.T)
    if asym.max() > tol:
        i, j = np.unravel_index(int(asym.argmax()), asym.shape)
        raise AsymmetricMatrix(f"d[{i}][{j}] != d[{j}][{i}] (differ by {asym[i, j]:.3e})")
    d = 0.5 * (d + d.T)

    diag = np.abs(np.diag(d))
    if diag.max() > tol:
        i = int(diag.argmax())
        raise NonzeroDiagonal(f"d[{i}][{i}] = {d[i, i]:.3e} != 0")
    np.fill_diagonal(d, 0.0)

    off = d + np.eye(n)  # mask diagonal with a positive value
    if off.min() <= 0.0:
        i, j = np.unravel_index(int(off.argmin()), off.shape)
        if d[i, j] < 0:
            raise ZeroOffDiagonal(f"d[{i}][{j}] = {d[i, j]:.3e} is negative")
        raise ZeroOffDiagonal(f"d[{i}][{j}] = 0 for distinct points {i}, {j}")

    # d[i][k] <= d[i][j] + d[j][k] for all triples, up to relative tolerance.
    tri_tol = REL_TOL * max(scale, 1.0)
    sums = d[:, :, None] + d[None, :, :]  # [i, j, k] -> d[i][j] + d[j][k]
    excess = d[:, None, :] - sums  # [i, j, k] -> d[i][k] - (d[i][j] + d[j][k])
    if excess.max() > tri_tol:
        i, j, k = np.unravel_index(int(excess.argmax()), excess.shape)
        raise TriangleViolation(int(i), int(j), int(k), float(excess[i, j, k]))

    d.flags.writeable = False
    return FiniteMetricSpace(d)


def model_triangle(l_ab: float, l_ac: float, l_bc: float) -> PlanarTriangle:
    """Place a planar triangle with the three given side lengths.

    a = (0, 0), b = (l_ab, 0), c in the closed upper half-plane by the law of
    cosines.  Degenerate triples (triangle inequality with equality) are legal
    and give a collinear placement.

    Raises
    ------
    NotRealizable
        If the triangle inequality fails beyond relative tolerance 1e-12.
    """
    if min(l_ab, l_ac, l_bc) < 0:
        raise NotRealizable("side lengths must be nonnegative")
    scale = max(l_ab, l_ac, l_bc)
    tol = REL_TOL * scale
    if l_ac + l_bc < l_ab - tol or l_ab + l_bc < l_ac - tol or l_ab + l_ac < l_bc - tol:
        raise NotRealizable(f"no planar triangle with sides ({l_ab}, {l_ac}, {l_bc})")

    if l_ab == 0.0:
        # a and b coincide; the remaining sides agree up to tolerance.
        return PlanarTriangle((0.0, 0.0), (0.0, 0.0), (0.0, l_ac))

    cx = (l_ab * l_ab + l_ac * l_ac - l_bc * l_bc) / (2.0 * l_ab)
    cy2 = l_ac * l_ac - cx * cx
    cy = math.sqrt(cy2) if cy2 > 0.0 else 0.0
    return PlanarTriangle((0.0, 0.0), (l_ab, 0.0), (cx, cy))


def quad_comparison(
    space: FiniteMetricSpace,
    p: int,
    q: int,
    x: int,
    y: int,
    *,
    rel_tol: float = COMPARE_REL_TOL,
) -> QuadCheckResult:
    """Check the comparison for one quadruple and one pair-splitting.

    Builds the two model triangles over the common side [x~ y~] on opposite
    sides and minimizes |p~ - z~| + |z~ - q~| over z~ on the side in closed
    form: if the segment [p~ q~] crosses the side the minimum is |p~ - q~|;
    otherwise it is attained at one of the two endpoints.
    """
    if len({p, q, x, y}) != 4:
        raise ValueError(f"indices must be distinct, got {(p, q, x, y)}")
    d = space.d
    L = float(d[x, y])
    tp = model_triangle(L, float(d[x, p]), float(d[y, p]))
    tq = model_triangle(L, float(d[x, q]), float(d[y, q]))
    px, py = tp.c
    qx, qy = tq.c[0], -tq.c[1]  # glue on the opposite side of [x~ y~]

    # Endpoint values are exact in the input distances.
    m = min(float(d[x, p]) + float(d[x, q]), float(d[y, p]) + float(d[y, q]))

    spread = py - qy  # >= 0 by construction
    if spread > 0.0:
        s = py / spread
        cross = px + s * (qx - px)
        if 0.0 <= cross <= L:
            m = min(m, math.hypot(px - qx, py - qy))
    else:
        # Both model apexes landed on the side: minimum over the overlap.
        lo, hi = (px, qx) if px <= qx else (qx, px)
        if hi >= 0.0 and lo <= L:
            m = min(m, abs(px - qx))

    slack = m - float(d[p, q])
    tol = rel_tol * space.diameter
    return QuadCheckResult(slack >= -tol, slack, ((p, q), (x, y)))


def _splits(quad):
    a, b, c, e = quad
    return (((a, b), (c, e)), ((a, c), (b, e)), ((a, e), (b, c)))


def cat0_comparison_all(
    space: FiniteMetricSpace, *, rel_tol: float = COMPARE_REL_TOL
) -> ComparisonReport:
    """Run the comparison over every quadruple and every pair-splitting.

    Each quadruple contributes 3 unordered splittings into {p, q} and {x, y};
    the check is symmetric under swapping within either pair, so these cover
    all relabelings.
    """
    worst = math.inf
    worst_lab = None
    failures: list[QuadCheckResult] = []
    n_checked = 0
    for quad in combinations(range(space.n), 4):
        for (pp, qq), (xx, yy) in _splits(quad):
            res = quad_comparison(space, pp, qq, xx, yy, rel_tol=rel_tol)
            n_checked += 1
            if res.slack < worst:
                worst = res.slack
                worst_lab = res.labeling
            if not res.holds:
                failures.append(res)
    tol = rel_tol * space.diameter
    if n_checked == 0:
        return ComparisonReport(True, math.inf, None, 0, [], tol)
    return ComparisonReport(not failures, worst, worst_lab, n_checked, failures, tol)
