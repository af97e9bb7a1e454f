"""Spacelike boundary complexes of a coordinate 4-simplex and the 5-point pipeline.

For a five-point metric whose form has one negative eigenvalue, the embedded
points span a 4-simplex in signed coordinates.  Each boundary facet is
classified by its supporting hyperplane: ``lower`` facets face the past cone
through spacelike-or-lightlike support, ``upper`` face the future, the rest
are ``timelike``.  The union of lower facets carries a per-simplex Euclidean
metric and contains all ten edges with their original lengths, which is the
output space of :func:`cat0_embed`.

When the form is degenerate, kernel axes are treated as spacelike by the side
test (the cone of the nondegenerate part), matching the quotient-by-kernel
construction; sign-0 axes never contribute to any length.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import arrays as _arrays
from .errors import (
    ComparisonFailed,
    DegenerateFacet,
    EdgesNotCovered,
    StratumA0,
    TooManyNegativeEigenvalues,
)
from .forms import (
    MinkowskiEmbedding,
    associated_form,
    eigendecompose,
    euclidean_embedding,
    minkowski_embedding,
    pair_form_values,
)
from .metric import COMPARE_REL_TOL, FiniteMetricSpace, cat0_comparison_all

LOWER = "lower"
UPPER = "upper"
TIMELIKE = "timelike"

BRANCH_EUCLIDEAN = "Euclidean_full_simplex"
BRANCH_MINKOWSKI = "Minkowski_lower_boundary"

#: Tolerance for the spacelike/lightlike boundary, relative to a unit normal.
SIDE_TOL = 1e-9

#: Side-test margins below this emit a near-boundary warning.
NEAR_BOUNDARY_WARN = 1e-6


@dataclass(frozen=True)
class ConeOrientation:
    """Which half of the timelike double cone counts as the future."""

    time_sign: int  # +1 or -1

    def __post_init__(self):
        if self.time_sign not in (-1, 1):
            raise ValueError(f"time_sign must be +1 or -1, got {self.time_sign}")


@dataclass(eq=False)
class SpacelikeComplex:
    """A metric subcomplex of the coordinate 4-simplex on five labeled vertices.

    ``facets`` are the included 3-simplices.  ``extra_faces`` are standalone
    lower-dimensional simplices required for edge coverage when the lower side
    meets a facet only along a face (this happens for metrics with geodesically
    collinear triples, whose supporting hyperplanes degenerate to lightlike).
    ``cells`` lists the top-dimensional pieces: facets plus extra faces.
    """

    vertices: np.ndarray  # (5, 4) coordinates
    metric_signs: tuple[int, ...]
    time_axis: int | None
    time_sign: int | None
    facets: tuple[tuple[int, ...], ...]  # included 3-simplices (4-subsets)
    faces: tuple[tuple[int, ...], ...]  # closure under sub-simplices
    edge_lengths: np.ndarray  # (5, 5) symmetric
    branch: str
    extra_faces: tuple[tuple[int, ...], ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def cells(self) -> tuple[tuple[int, ...], ...]:
        return self.facets + self.extra_faces


@dataclass(eq=False)
class EmbeddingResult:
    """Assembled output of the five-point embedding pipeline."""

    space: FiniteMetricSpace
    embedding: MinkowskiEmbedding
    complex: SpacelikeComplex
    profile: _arrays.OrientationProfile | None
    diagnostics: dict = field(default_factory=dict)


def facet_normal(emb: MinkowskiEmbedding, facet) -> np.ndarray:
    """Outward Euclidean unit normal of a boundary facet's hyperplane.

    Computed by cofactor expansion (the 4-vector N with <N, u> = det of the
    three facet edge vectors extended by u), then oriented away from the
    omitted vertex.

    Raises
    ------
    DegenerateFacet
        If the facet's vertices are affinely dependent beyond tolerance.
    """
    facet = tuple(sorted(facet))
    if len(facet) != 4 or any(not 0 <= i < 5 for i in facet):
        raise ValueError(f"facet must be a 4-subset of the vertex indices, got {facet}")
    coords = emb.coords
    if coords.shape != (5, 4):
        raise ValueError("facet normals require a five-point embedding in 4 coordinates")
    base = coords[facet[0]]
    d1, d2, d3 = (coords[facet[k]] - base for k in (1, 2, 3))
    m = np.column_stack([d1, d2, d3])
    normal = np.empty(4)
    for row in range(4):
        minor = np.delete(m, row, axis=0)
        normal[row] = (-1.0 if (row + 3) % 2 else 1.0) * np.linalg.det(minor)
    scale = max(1.0, float(np.abs(coords).max()))
    norm = float(np.linalg.norm(normal))
    if norm <= 1e-12 * scale**3:
        raise DegenerateFacet(f"facet {facet} is affinely degenerate")
    omitted = next(i for i in range(5) if i not in facet)
    if float(np.dot(normal, coords[omitted] - base)) > 0.0:
        normal = -normal
    return normal / norm


def facet_side_test(
    emb: MinkowskiEmbedding, facet, orient: ConeOrientation, *, tol: float = SIDE_TOL
) -> str:
    """Classify a facet as ``lower``, ``upper``, or ``timelike``.

    With outward unit normal n in the diagonal coordinates, the facet is lower
    iff n points pastward (n_t * time_sign < 0) and its hyperplane is
    spacelike or lightlike (|n_spatial| <= |n_t| + tol); upper symmetrically.
    Sign-0 axes count as spatial here (the cone of the nondegenerate part).
    """
    n = facet_normal(emb, facet)
    t = emb.time_axis
    if t is None:
        raise ValueError("side test requires an embedding with a timelike axis")
    nt = float(n[t]) * orient.time_sign
    nsp = float(np.linalg.norm(np.delete(n, t)))
    if nt < 0.0 and nsp <= -nt + tol:
        return LOWER
    if nt > 0.0 and nsp <= nt + tol:
        return UPPER
    return TIMELIKE


def side_margin(emb: MinkowskiEmbedding, facet) -> float:
    """Signed distance |n_t| - |n_spatial| of the facet normal to the light cone."""
    n = facet_normal(emb, facet)
    t = emb.time_axis
    return float(abs(n[t]) - np.linalg.norm(np.delete(n, t)))


def choose_time_orientation(emb: MinkowskiEmbedding) -> ConeOrientation:
    """Pick the future cone so that the lower side carries at least 3 facets.

    Projects the vertices along the timelike eigen-axis and classifies: the
    orientation is chosen so the projection lands on the A_minus side, which
    is exactly the side whose positively oriented facets (at least three of
    them) are the lower facets.

    Raises
    ------
    StratumA0
        If the projection classifies in the middle stratum; comparison-passing
        inputs never do, so this is a hard diagnostic.
    """
    axis = np.zeros(emb.out_dim)
    axis[emb.time_axis] = 1.0
    profile = _arrays.classify(_arrays.project_along(emb, axis))
    if profile.side == _arrays.A_ZERO:
        raise StratumA0("projection along the time axis classifies in stratum A_0")
    return ConeOrientation(1 if profile.side == _arrays.A_MINUS else -1)


def _closure(facets) -> tuple[tuple[int, ...], ...]:
    faces = set()
    for f in facets:
        for r in range(1, len(f) + 1):
            faces.update(combinations(f, r))
    return tuple(sorted(faces, key=lambda f: (len(f), f)))


#: Acceptance threshold for the lower-support margin of a standalone face.
SUPPORT_TOL = 1e-7


def _segment_support_min(n1, n2, spatial, t, time_sign) -> float:
    """Exact min over the segment [n1, n2] of (|n_sp| + ts*n_t) / |n|.

    With q(u) = |n_sp(u)|^2 a quadratic in u and l(u) = ts*n_t(u) linear, the
    stationary points of sqrt(q) + l solve a quadratic; the minimum over the
    normalized combo is attained there or at an endpoint.
    """
    s1, s2 = n1[spatial], n2[spatial]
    a = float(np.dot(s2 - s1, s2 - s1))
    b = 2.0 * float(np.dot(s1, s2 - s1))
    c = float(np.dot(s1, s1))
    l0 = time_sign * float(n1[t])
    l1 = time_sign * float(n2[t] - n1[t])

    candidates = [0.0, 1.0]
    # q'(u)^2 = 4 l1^2 q(u), with the sign condition q'(u) * l1 <= 0.
    qa = 4.0 * a * (a - l1 * l1)
    qb = 4.0 * b * (a - l1 * l1)
    qc = b * b - 4.0 * l1 * l1 * c
    if abs(qa) > 1e-300:
        disc = qb * qb - 4.0 * qa * qc
        if disc >= 0.0:
            r = np.sqrt(disc)
            candidates += [(-qb - r) / (2.0 * qa), (-qb + r) / (2.0 * qa)]
    elif abs(qb) > 1e-300:
        candidates.append(-qc / qb)

    best = np.inf
    for u in candidates:
        if not 0.0 <= u <= 1.0:
            continue
        n = (1.0 - u) * n1 + u * n2
        norm = float(np.linalg.norm(n))
        if norm <= 1e-300:
            continue
        val = (float(np.linalg.norm(n[spatial])) + time_sign * float(n[t])) / norm
        best = min(best, val)
    return best


def lower_support_margin(emb: MinkowskiEmbedding, face, time_sign: int) -> float:
    """How far the face's normal cone is from containing a lower support.

    The normal cone at a face is spanned by the outward normals of the facets
    containing it.  The face lies on the lower side iff some direction n in
    that cone is pastward and not timelike, i.e. |n_spatial| + time_sign * n_t
    <= 0 for the unit normal.  Returns the minimum of that quantity over the
    cone (nonpositive means supported).  Exact for 2-faces (normal cones are
    planar segments); edges add a boundary-exact search with a grid interior.
    """
    face = tuple(sorted(face))
    normals = [
        facet_normal(emb, f) for f in combinations(range(5), 4) if set(face) <= set(f)
    ]
    t = emb.time_axis
    spatial = [k for k in range(emb.out_dim) if k != t]

    k = len(normals)
    if k == 1:
        n = normals[0]
        return float(np.linalg.norm(n[spatial]) + time_sign * n[t])
    best = np.inf
    for i in range(k):
        for j in range(i + 1, k):
            best = min(
                best, _segment_support_min(normals[i], normals[j], spatial, t, time_sign)
            )
    if k > 2:
        mat = np.array(normals)
        steps = 40
        weights = []
        for a_ in range(steps + 1):
            for b_ in range(steps + 1 - a_):
                weights.append((a_ / steps, b_ / steps, 1.0 - (a_ + b_) / steps))
        combo = np.array(weights) @ mat
        norms = np.linalg.norm(combo, axis=1)
        keep = norms > 1e-300
        vals = (
            np.linalg.norm(combo[keep][:, spatial], axis=1)
            + time_sign * combo[keep][:, t]
        ) / norms[keep]
        if vals.size:
            best = min(best, float(vals.min()))
    return best


def face_is_spacelike(emb: MinkowskiEmbedding, face, *, tol_rel: float = 1e-9) -> bool:
    """True iff the signed form is positive semidefinite on the face's span."""
    face = tuple(sorted(face))
    coords = emb.coords[list(face)]
    diffs = coords[1:] - coords[0]
    signs = np.asarray(emb.metric_signs, dtype=float)
    gram = (diffs * signs[None, :]) @ diffs.T
    w, _ = np.linalg.eigh(0.5 * (gram + gram.T))
    scale = max(1.0, float(np.abs(gram).max()))
    return bool(w.min() >= -tol_rel * scale)


def _edge_length_table(emb, space, warnings) -> np.ndarray:
    w = pair_form_values(emb)
    scale = max(1.0, float(np.abs(w).max()))
    length_tol2 = 1e-12 * scale
    lengths = np.sqrt(np.clip(w, 0.0, None))
    for i, j in combinations(range(emb.n), 2):
        if w[i, j] <= length_tol2:
            if space is not None:
                lengths[i, j] = lengths[j, i] = space.d[i, j]
            warnings.append(
                f"edge ({i},{j}) has near-lightlike coordinate difference "
                f"(W = {w[i, j]:.3e}); length clamped"
            )
    np.fill_diagonal(lengths, 0.0)
    return lengths


def build_complex(
    emb: MinkowskiEmbedding,
    orient: ConeOrientation,
    space: FiniteMetricSpace | None = None,
) -> SpacelikeComplex:
    """Assemble the lower-boundary complex for a one-timelike-axis embedding.

    Includes every facet classified lower, closes under sub-simplices, and
    asserts that all ten edges are covered.

    Raises
    ------
    EdgesNotCovered
        If some edge of the 4-simplex lies in no lower facet (unreachable for
        valid inputs; surfacing it is the point).
    """
    warnings: list[str] = []
    sides = {}
    for facet in combinations(range(5), 4):
        sides[facet] = facet_side_test(emb, facet, orient)
        margin = side_margin(emb, facet)
        if abs(margin) < NEAR_BOUNDARY_WARN:
            warnings.append(
                f"facet {facet} is within {NEAR_BOUNDARY_WARN:g} of the light cone "
                f"(margin {margin:.3e}); classified {sides[facet]}"
            )
    facets = tuple(f for f, s in sorted(sides.items()) if s == LOWER)

    def uncovered(cells):
        return [
            e for e in combinations(range(5), 2) if not any(set(e) <= set(c) for c in cells)
        ]

    # Metrics with geodesically collinear triples can meet the lower side in a
    # face that belongs to no lower facet; include those faces explicitly when
    # an edge needs them (they must be spacelike and carry a lower support).
    extra: list[tuple[int, ...]] = []
    missing = uncovered(facets)
    if missing:
        for face in combinations(range(5), 3):
            if not any(set(e) <= set(face) for e in missing):
                continue
            if not face_is_spacelike(emb, face):
                continue
            if lower_support_margin(emb, face, orient.time_sign) <= SUPPORT_TOL:
                extra.append(face)
        still = uncovered(facets + tuple(extra))
        for edge in still:
            if lower_support_margin(emb, edge, orient.time_sign) <= SUPPORT_TOL:
                extra.append(edge)
        extra.sort(key=lambda f: (len(f), f))
        missing = uncovered(facets + tuple(extra))
        if missing:
            raise EdgesNotCovered(missing)
        warnings.append(
            f"edges {[e for e in uncovered(facets)]} lie in no lower facet; "
            f"included standalone lower faces {extra}"
        )

    lengths = _edge_length_table(emb, space, warnings)
    return SpacelikeComplex(
        vertices=emb.coords,
        metric_signs=emb.metric_signs,
        time_axis=emb.time_axis,
        time_sign=orient.time_sign,
        facets=facets,
        faces=_closure(facets + tuple(extra)),
        edge_lengths=lengths,
        branch=BRANCH_MINKOWSKI,
        extra_faces=tuple(extra),
        warnings=tuple(warnings),
    )


def _euclidean_complex(emb: MinkowskiEmbedding, space: FiniteMetricSpace) -> SpacelikeComplex:
    facets = tuple(combinations(range(5), 4))
    lengths = np.sqrt(np.clip(pair_form_values(emb), 0.0, None))
    np.fill_diagonal(lengths, 0.0)
    return SpacelikeComplex(
        vertices=emb.coords,
        metric_signs=emb.metric_signs,
        time_axis=None,
        time_sign=None,
        facets=facets,
        faces=_closure(facets),
        edge_lengths=lengths,
        branch=BRANCH_EUCLIDEAN,
        warnings=(),
    )


def cat0_embed(
    space: FiniteMetricSpace,
    *,
    base_index: int | None = None,
    compare_rel_tol: float = COMPARE_REL_TOL,
    zero_rel_tol: float | None = None,
) -> EmbeddingResult:
    """Embed a comparison-satisfying five-point metric into a complex with
    per-simplex Euclidean metric that realizes all ten distances.

    Positive-semidefinite form: the full (solid) simplex on a Euclidean
    realization.  One negative eigenvalue: the lower-boundary complex of the
    4-simplex in signed coordinates.

    Raises
    ------
    ComparisonFailed
        If some quadruple violates the comparison (with witness).
    TooManyNegativeEigenvalues, StratumA0
        Anomalies: impossible for comparison-passing inputs, surfaced hard.
    """
    if space.n != 5:
        raise ValueError(f"pipeline requires exactly 5 points, got {space.n}")

    report = cat0_comparison_all(space, rel_tol=compare_rel_tol)
    diagnostics = {
        "comparison": {
            "holds": report.holds,
            "worst_slack": report.worst_slack,
            "worst_labeling": report.worst_labeling,
            "n_checked": report.n_checked,
            "tolerance": report.tolerance,
        },
        "tolerances": {
            "compare_rel_tol": compare_rel_tol,
            "side_tol": SIDE_TOL,
        },
    }
    if not report.holds:
        raise ComparisonFailed(report)

    form = associated_form(space, base_index)
    kwargs = {} if zero_rel_tol is None else {"zero_rel_tol": zero_rel_tol}
    spectrum = eigendecompose(form, **kwargs)
    diagnostics["signature"] = spectrum.signature
    n_neg = spectrum.signature[2]

    if n_neg == 0:
        emb = euclidean_embedding(spectrum, form)
        cx = _euclidean_complex(emb, space)
        profile = None
    else:
        if n_neg > 1:
            raise TooManyNegativeEigenvalues(
                n_neg,
                f"comparison passed but the form has {n_neg} negative eigenvalues",
            )
        emb = minkowski_embedding(spectrum, form)
        orient = choose_time_orientation(emb)
        axis = np.zeros(emb.out_dim)
        axis[emb.time_axis] = float(orient.time_sign)
        profile = _arrays.classify(_arrays.project_along(emb, axis))
        cx = build_complex(emb, orient, space)

    residual = float(np.abs(cx.edge_lengths - space.d).max())
    diagnostics["edge_length_residual"] = residual
    rel = residual / max(space.diameter, 1e-300)
    if rel > 1e-9:
        diagnostics.setdefault("warnings", []).append(
            f"edge lengths deviate from input distances by relative {rel:.3e}"
        )
    return EmbeddingResult(space, emb, cx, profile, diagnostics)


def complex_to_dict(cx: SpacelikeComplex) -> dict:
    """JSON-ready representation (stable field names, versioned)."""
    return {
        "format_version": 1,
        "branch": cx.branch,
        "vertices": cx.vertices.tolist(),
        "metric_signs": list(cx.metric_signs),
        "time_axis": cx.time_axis,
        "time_sign": cx.time_sign,
        "facets": [list(f) for f in cx.facets],
        "faces": [list(f) for f in cx.faces],
        "extra_faces": [list(f) for f in cx.extra_faces],
        "edge_lengths": cx.edge_lengths.tolist(),
        "warnings": list(cx.warnings),
    }


def complex_from_dict(data: dict) -> SpacelikeComplex:
    """Parse the JSON representation emitted by :func:`complex_to_dict`."""
    if data.get("format_version") != 1:
        raise ValueError(f"unsupported complex format_version {data.get('format_version')}")
    vertices = np.array(data["vertices"], dtype=float)
    lengths = np.array(data["edge_lengths"], dtype=float)
    vertices.flags.writeable = False
    lengths.flags.writeable = False
    return SpacelikeComplex(
        vertices=vertices,
        metric_signs=tuple(int(s) for s in data["metric_signs"]),
        time_axis=data["time_axis"],
        time_sign=data["time_sign"],
        facets=tuple(tuple(int(i) for i in f) for f in data["facets"]),
        faces=tuple(tuple(int(i) for i in f) for f in data["faces"]),
        edge_lengths=lengths,
        branch=data["branch"],
        extra_faces=tuple(tuple(int(i) for i in f) for f in data.get("extra_faces", ())),
        warnings=tuple(data.get("warnings", ())),
    )
