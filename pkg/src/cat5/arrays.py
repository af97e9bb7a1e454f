"""Orientation classification of nondegenerate five-point arrays in 3-space.

A five-point array defines an affine image of a 4-simplex; each of the five
facets maps with a sign (orientation preserved, degenerate, or reversed).
The counts (n_plus, n_zero, n_minus) satisfy n_plus + n_zero + n_minus = 5,
n_plus >= 1, n_minus >= 1, n_zero <= 1, and m = n_minus - n_plus in [-3, 3]
labels the stratum A_m.  The complement of the middle stratum A_0 splits into
the two sides A_minus (m < 0) and A_plus (m > 0); only |m| and the side are
convention-free, the sign of m depends on the chosen orientation of 3-space.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import DegenerateArray, NotTimelike, WrongSignature
from .forms import MinkowskiEmbedding

#: Facet determinants scale cubically with distance: tolerance factor on scale^3.
TOL_DET_REL = 1e-10

#: Collinearity (cross-product) tolerance factor on scale^2.
TOL_LINE_REL = 1e-10

A_MINUS = "A_minus"
A_PLUS = "A_plus"
A_ZERO = "A_zero"


@dataclass(frozen=True, eq=False)
class Array5R3:
    """Five points in R^3, nondegenerate: no collinear triple, not all coplanar."""

    pts: np.ndarray  # (5, 3)


@dataclass(frozen=True)
class OrientationProfile:
    """Per-facet orientation signs and the derived stratum data."""

    facet_signs: tuple[int, int, int, int, int]
    n_plus: int
    n_zero: int
    n_minus: int
    m: int
    stratum: str  # "A_<m>"
    side: str  # A_minus | A_plus | A_zero


def _scale(pts: np.ndarray) -> float:
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((diff * diff).sum(axis=2)).max())


def array5(points) -> Array5R3:
    """Validate five points in R^3 as a nondegenerate array.

    Raises
    ------
    DegenerateArray
        If some triple is collinear or all five points are coplanar
        (both within scale-relative tolerance).
    """
    pts = np.array(points, dtype=float)
    if pts.shape != (5, 3):
        raise DegenerateArray(f"expected 5 points in R^3, got shape {pts.shape}")
    if not np.isfinite(pts).all():
        raise DegenerateArray("non-finite coordinates")
    scale = _scale(pts)
    if scale == 0.0:
        raise DegenerateArray("all points coincide")

    line_tol = TOL_LINE_REL * scale * scale
    for i, j, k in combinations(range(5), 3):
        cross = np.cross(pts[j] - pts[i], pts[k] - pts[i])
        if np.linalg.norm(cross) <= line_tol:
            raise DegenerateArray(f"points {(i, j, k)} are collinear")

    det_tol = TOL_DET_REL * scale**3
    if max(abs(_facet_det(pts, i)) for i in range(5)) <= det_tol:
        raise DegenerateArray("all five points lie on one plane")

    pts.flags.writeable = False
    return Array5R3(pts)


def _facet_det(pts: np.ndarray, omit: int) -> float:
    j = [k for k in range(5) if k != omit]
    m = np.array([pts[j[1]] - pts[j[0]], pts[j[2]] - pts[j[0]], pts[j[3]] - pts[j[0]]])
    return float(np.linalg.det(m))


def facet_orientations(arr: Array5R3) -> tuple[int, int, int, int, int]:
    """Signs of the five facet maps under the induced boundary orientation.

    Facet i omits point i; its sign is (-1)^i * sign det of the ordered
    difference vectors of the remaining points (ascending index order).
    Determinants below tolerance report 0.
    """
    pts = arr.pts
    det_tol = TOL_DET_REL * _scale(pts) ** 3
    signs = []
    for i in range(5):
        det = _facet_det(pts, i)
        if abs(det) <= det_tol:
            signs.append(0)
        else:
            signs.append(int(np.sign(det)) * (-1 if i % 2 else 1))
    return tuple(signs)


def classify(arr: Array5R3) -> OrientationProfile:
    """Full orientation profile of a nondegenerate array.

    Raises
    ------
    DegenerateArray
        If the computed counts violate the structural constraints
        (n_plus >= 1, n_minus >= 1, n_zero <= 1), which only happens for
        arrays inside the degeneracy tolerance band.
    """
    signs = facet_orientations(arr)
    n_plus = signs.count(1)
    n_zero = signs.count(0)
    n_minus = signs.count(-1)
    if n_plus < 1 or n_minus < 1 or n_zero > 1:
        raise DegenerateArray(
            f"facet counts ({n_plus}, {n_zero}, {n_minus}) violate nondegeneracy"
        )
    m = n_minus - n_plus
    side = A_ZERO if m == 0 else (A_MINUS if m < 0 else A_PLUS)
    return OrientationProfile(signs, n_plus, n_zero, n_minus, m, f"A_{m}", side)


def project_along(emb: MinkowskiEmbedding, v) -> Array5R3:
    """Project the five embedded points along a timelike direction to 3-space.

    The direction must satisfy W(v) < 0 for the embedding's signed form.  The
    image lives in the complement of span(v); it is charted on the three
    non-time axes (the projection along v onto that coordinate 3-space, which
    agrees with the form-orthogonal projection up to the induced linear
    isomorphism).  The chart is orientation-normalized: one coordinate is
    reflected when needed so that the stratum side is a function of the ray of
    v alone, flipping when v flips.

    Raises
    ------
    NotTimelike
        If W(v) >= 0.
    """
    if emb.n != 5:
        raise ValueError(f"projection requires 5 points, embedding has {emb.n}")
    if emb.metric_signs.count(-1) != 1 or emb.time_axis is None:
        raise WrongSignature("embedding must have exactly one timelike axis")
    v = np.asarray(v, dtype=float)
    if v.shape != (emb.out_dim,):
        raise ValueError(f"expected a direction of length {emb.out_dim}")
    w_v = float(np.dot(np.asarray(emb.metric_signs, dtype=float), v * v))
    if w_v >= 0.0:
        raise NotTimelike(f"W(v) = {w_v:.3e} >= 0")

    t = emb.time_axis
    vt = v[t]  # nonzero whenever W(v) < 0
    coords = emb.coords
    sheared = coords - np.outer(coords[:, t] / vt, v)
    spatial = [k for k in range(emb.out_dim) if k != t]
    chart = sheared[:, spatial].copy()

    vol = float(np.linalg.det(coords[1:] - coords[0]))
    if vol == 0.0:
        raise DegenerateArray("embedded points are affinely dependent")
    if vol * vt < 0.0:
        chart[:, 0] = -chart[:, 0]
    return array5(chart)


def _coplanar_quads(pts: np.ndarray, det_tol: float) -> list[int]:
    """Indices i such that the four points excluding i are coplanar."""
    return [i for i in range(5) if abs(_facet_det(pts, i)) <= det_tol]


def _planar_hull_vertices(quad: np.ndarray) -> int:
    """Number of extreme points of four roughly-coplanar points in 3-space."""
    centered = quad - quad.mean(axis=0)
    # Project to the best-fit plane spanned by the two leading principal axes.
    _, _, vt = np.linalg.svd(centered)
    flat = centered @ vt[:2].T
    try:
        hull = ConvexHull(flat)
    except QhullError:
        return 0
    return len(hull.vertices)


def structural_check(arr: Array5R3, profile: OrientationProfile) -> bool:
    """Verify the stratum's geometric description with an independent hull oracle.

    |m| = 3: one point strictly inside the tetrahedron of the other four.
    |m| = 2: one point on a facet plane of the other four's tetrahedron.
    |m| = 1: the hull is a five-vertex double pyramid over a triangle.
     m = 0: the hull is a pyramid over a convex quadrilateral.

    Returns False on any mismatch (no exception).
    """
    pts = arr.pts
    scale = _scale(pts)
    det_tol = TOL_DET_REL * scale**3
    plane_tol = 1e-9 * scale
    coplanar = _coplanar_quads(pts, det_tol)

    target = abs(profile.m)
    if target == 0 or target == 2:
        # Exactly one degenerate foursome, split by its planar convexity.
        if len(coplanar) != 1:
            return False
        omit = coplanar[0]
        quad = pts[[k for k in range(5) if k != omit]]
        extreme = _planar_hull_vertices(quad)
        if target == 0:
            return extreme == 4
        return extreme == 3
    if coplanar:
        return False

    try:
        hull = ConvexHull(pts)
    except QhullError:
        return False
    verts = set(int(i) for i in hull.vertices)

    if target == 1:
        if len(verts) != 5:
            return False
        counts = np.bincount(hull.simplices.ravel(), minlength=5)
        if sorted(counts.tolist()) != [3, 3, 4, 4, 4]:
            return False
        apexes = [i for i in range(5) if counts[i] == 3]
        equator = [i for i in range(5) if counts[i] == 4]
        normal = np.cross(pts[equator[1]] - pts[equator[0]], pts[equator[2]] - pts[equator[0]])
        s0 = float(np.dot(normal, pts[apexes[0]] - pts[equator[0]]))
        s1 = float(np.dot(normal, pts[apexes[1]] - pts[equator[0]]))
        return s0 * s1 < 0.0

    if target == 3:
        if len(verts) != 4:
            return False
        inner = next(i for i in range(5) if i not in verts)
        # Strictly inside: negatively clear of every supporting plane.
        dists = hull.equations[:, :3] @ pts[inner] + hull.equations[:, 3]
        return bool(dists.max() < -plane_tol)

    return False
