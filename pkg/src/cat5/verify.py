"""Independent verification tooling: geodesic upper bounds on output complexes,
random metric generators, membership oracles, and a counterexample hunter.

Geodesic verification is upper-bound-only: a barycentric grid is laid over
each included facet, all co-facet node pairs become arcs weighted by the
per-simplex Euclidean length, and shortest paths from the five vertices bound
the intrinsic distances from above.  Grids at resolutions 4 | 8 | 16 are
nested, so the bounds are monotone nonincreasing along that chain.  A bound
below an edge length would expose a shortcut and fails verification.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import MetricValidationError, RejectionBudgetExceeded
from .forms import MinkowskiEmbedding, associated_form, eigendecompose
from .metric import FiniteMetricSpace, cat0_comparison_all, validate_metric
from .spacelike import BRANCH_EUCLIDEAN, EmbeddingResult, SpacelikeComplex

DEFAULT_RESOLUTION = 8


@dataclass(eq=False)
class SampledComplexGraph:
    """Barycentric sample graph over the included facets of a complex."""

    coords: np.ndarray  # (N, 4) node coordinates
    barycentrics: list[tuple[int, ...]]  # integer weights over the 5 vertices
    vertex_nodes: list[int]  # node index of each of the 5 vertices
    graph: coo_matrix  # symmetric arc weights
    resolution: int


def _cell_grid(resolution: int, parts: int):
    """Integer compositions of ``resolution`` into ``parts`` nonnegative parts."""
    if parts == 1:
        return [(resolution,)]
    out = []
    for head in range(resolution + 1):
        for tail in _cell_grid(resolution - head, parts - 1):
            out.append((head,) + tail)
    return out


def sampled_complex_graph(cx: SpacelikeComplex, resolution: int) -> SampledComplexGraph:
    """Build the arc-weighted sample graph at the given subdivision level."""
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    signs = np.asarray(cx.metric_signs, dtype=float)
    nodes: dict[tuple[int, ...], int] = {}
    facet_members: list[list[int]] = []
    for cell in cx.cells:
        members = []
        for comp in _cell_grid(resolution, len(cell)):
            key = [0] * 5
            for slot, count in zip(cell, comp):
                key[slot] = count
            key = tuple(key)
            idx = nodes.setdefault(key, len(nodes))
            members.append(idx)
        facet_members.append(members)

    keys = sorted(nodes, key=nodes.get)
    bary = np.array(keys, dtype=float) / resolution
    coords = bary @ cx.vertices

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    for members in facet_members:
        idx = np.array(members)
        pts = coords[idx]
        diff = pts[:, None, :] - pts[None, :, :]
        w2 = np.einsum("ijk,k->ij", diff * diff, signs)
        lengths = np.sqrt(np.clip(w2, 0.0, None))
        iu, ju = np.triu_indices(len(idx), k=1)
        rows.append(idx[iu])
        cols.append(idx[ju])
        vals.append(lengths[iu, ju])

    n = len(nodes)
    row = np.concatenate(rows)
    col = np.concatenate(cols)
    val = np.concatenate(vals)
    # Node pairs inside a shared face occur once per facet with identical
    # weight; deduplicate so the sparse constructor cannot sum them.
    _, first = np.unique(row * n + col, return_index=True)
    graph = coo_matrix((val[first], (row[first], col[first])), shape=(n, n))
    vertex_nodes = []
    for v in range(5):
        key = tuple(resolution if k == v else 0 for k in range(5))
        if key not in nodes:
            raise ValueError(f"vertex {v} lies in no included facet")
        vertex_nodes.append(nodes[key])
    return SampledComplexGraph(coords, keys, vertex_nodes, graph, resolution)


def geodesic_upper_bounds(cx: SpacelikeComplex, resolution: int = DEFAULT_RESOLUTION):
    """Upper bounds on intrinsic distances between the five vertices.

    The Euclidean (solid) branch returns ambient distances directly; geodesics
    there are straight segments.
    """
    if cx.branch == BRANCH_EUCLIDEAN:
        return cx.edge_lengths.copy()
    sg = sampled_complex_graph(cx, resolution)
    dist = dijkstra(sg.graph.tocsr(), directed=False, indices=sg.vertex_nodes)
    return dist[:, sg.vertex_nodes]


@dataclass
class PreservationReport:
    """Distance-preservation check of an embedding result."""

    passed: bool
    max_edge_residual: float
    max_shortcut: float
    bad_edges: list[tuple[int, int]] = field(default_factory=list)
    bounds: np.ndarray | None = None


def check_distance_preservation(
    result: EmbeddingResult,
    *,
    resolution: int = DEFAULT_RESOLUTION,
    rel_tol: float = 1e-9,
) -> PreservationReport:
    """Assert edge lengths match the input metric and no sampled path undercuts them."""
    d = result.space.d
    scale = max(result.space.diameter, 1e-300)
    cx = result.complex
    edge_res = np.abs(cx.edge_lengths - d)
    bad = [
        (i, j)
        for i, j in combinations(range(5), 2)
        if edge_res[i, j] > rel_tol * scale
    ]
    bounds = geodesic_upper_bounds(cx, resolution)
    shortcut = float((d - bounds).max())
    passed = not bad and shortcut <= rel_tol * scale
    if shortcut > rel_tol * scale:
        deficits = d - bounds
        i, j = np.unravel_index(int(deficits.argmax()), deficits.shape)
        bad.append((int(i), int(j)))
    return PreservationReport(passed, float(edge_res.max()), shortcut, bad, bounds)


def random_metric(kind: str, n: int, seed, *, delta: float = 0.05, attempts: int = 10_000):
    """Seeded random metric generators.

    ``euclidean_k``: n points uniform in the unit k-cube (k in 2..4).
    ``tree``: path metric of n nodes on a random weighted tree.
    ``perturbed_tree``: tree distances stretched by independent factors in
    [1, 1 + delta]; stretches that break a triangle are capped by taking the
    shortest-path closure before validating, so the result is always a metric.
    ``general``: rejection sampling of symmetric matrices with entries in
    [0.5, 2] against the triangle inequality.

    Deterministic per seed.

    Raises
    ------
    RejectionBudgetExceeded
        For ``general`` when no valid draw appears within ``attempts``.
    """
    rng = np.random.default_rng(seed)
    if kind.startswith("euclidean_"):
        k = int(kind.split("_", 1)[1])
        if not 1 <= k <= 4:
            raise ValueError(f"unsupported ambient dimension {k}")
        pts = rng.uniform(size=(n, k))
        d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
        return validate_metric(d)
    if kind == "tree":
        return validate_metric(_tree_distances(n, rng))
    if kind == "perturbed_tree":
        d = _tree_distances(n, rng)
        factors = rng.uniform(1.0, 1.0 + delta, size=(n, n))
        factors = np.triu(factors, 1)
        d = d * (factors + factors.T + np.eye(n))
        return validate_metric(_metric_closure(d))
    if kind == "general":
        for _ in range(attempts):
            m = rng.uniform(0.5, 2.0, size=(n, n))
            d = np.triu(m, 1)
            d = d + d.T
            try:
                return validate_metric(d)
            except MetricValidationError:
                continue
        raise RejectionBudgetExceeded(f"no valid {n}-point metric in {attempts} draws")
    raise ValueError(f"unknown generator kind {kind!r}")


def _tree_distances(n: int, rng) -> np.ndarray:
    parents = [int(rng.integers(0, i)) for i in range(1, n)]
    weights = rng.uniform(0.5, 2.0, size=n - 1)
    d = np.zeros((n, n))
    for child in range(1, n):
        p, w = parents[child - 1], weights[child - 1]
        # Distances to the new leaf go through its parent.
        for other in range(child):
            d[child, other] = d[other, child] = d[p, other] + w
    return d


def _metric_closure(d: np.ndarray) -> np.ndarray:
    out = d.copy()
    n = d.shape[0]
    for k in range(n):
        out = np.minimum(out, out[:, k : k + 1] + out[k : k + 1, :])
    np.fill_diagonal(out, 0.0)
    return out


def sample_future_directions(emb: MinkowskiEmbedding, time_sign: int, rng, count: int):
    """Timelike directions in the chosen future cone (kernel axes kept spacelike)."""
    t = emb.time_axis
    spatial = [k for k in range(emb.out_dim) if k != t]
    g = rng.normal(size=(count, len(spatial)))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    radii = rng.uniform(0.0, 0.95, size=(count, 1))
    out = np.zeros((count, emb.out_dim))
    out[:, spatial] = g * radii
    out[:, t] = float(time_sign)
    return out


def pastward_exit_test(emb: MinkowskiEmbedding, facet, v, *, tol: float = 1e-9) -> bool:
    """True iff the facet barycenter leaves the simplex for every step p + t*v, t < 0.

    Decided by a small linear program: minimize t subject to p + t*v staying a
    convex combination of the five vertices.  A strictly negative optimum
    means the past ray dips back into the body.
    """
    coords = emb.coords
    scale = max(1.0, float(np.abs(coords).max()))
    p = coords[list(facet)].mean(axis=0)
    v = np.asarray(v, dtype=float)
    # Variables: five hull weights and the step t.
    a_eq = np.zeros((5, 6))
    a_eq[:4, :5] = coords.T
    a_eq[:4, 5] = -v
    a_eq[4, :5] = 1.0
    b_eq = np.concatenate([p, [1.0]])
    bounds = [(0.0, None)] * 5 + [(-10.0 * scale, 0.0)]
    cost = np.zeros(6)
    cost[5] = 1.0
    res = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"membership program failed: {res.message}")
    return res.x[5] >= -tol * scale


@dataclass(frozen=True)
class HuntConfig:
    """Reproducible search configuration for the counterexample hunter."""

    generator: str
    n_points: int
    budget: int
    seed: int
    predicate: str
    keep: int = 10
    delta: float = 0.05

    def __post_init__(self):
        if self.budget < 0:
            raise ValueError("budget must be >= 0")


def _predicate_nneg2(space: FiniteMetricSpace):
    """Hit: the comparison passes yet the form has two or more negative eigenvalues."""
    report = cat0_comparison_all(space)
    spectrum = eigendecompose(associated_form(space))
    n_neg = spectrum.signature[2]
    hit = report.holds and n_neg >= 2
    scale = max(space.diameter**2, 1e-300)
    if report.holds:
        # Near miss when the second-lowest eigenvalue approaches zero from above.
        w = np.sort(np.asarray(spectrum.eigenvalues))
        margin = float(w[1]) / scale if len(w) > 1 else 1.0
    else:
        margin = abs(report.worst_slack) / max(space.diameter, 1e-300) + 1.0
    return hit, margin, {"signature": spectrum.signature, "comparison_holds": report.holds}


def _predicate_c5(space: FiniteMetricSpace):
    """Hit: all quadruple comparisons pass yet some 5-cycle labeling is infeasible."""
    from .gamma import cycle_implication_check

    rep = cycle_implication_check(space, max_cycle=5)
    if rep.skipped:
        return False, 1.0, {"skipped": rep.skipped}
    hit = bool(rep.infeasible)
    residuals = [r["residual"] for r in rep.infeasible + rep.undecided]
    scale = max(space.diameter**2, 1e-300)
    margin = -max(residuals) / scale if residuals else 1.0
    return hit, margin, {
        "checked": rep.checked,
        "infeasible": len(rep.infeasible),
        "undecided": len(rep.undecided),
    }


def _predicate_o3(space: FiniteMetricSpace):
    """Hit: a six-point space passes all quadruple comparisons but fails the octahedron."""
    from .gamma import INFEASIBLE, builtin_graph, gamma_feasible

    if space.n != 6:
        return False, 1.0, {"skipped": "needs six points"}
    report = cat0_comparison_all(space)
    if not report.holds:
        return False, 1.0, {"skipped": "comparison fails"}
    graph = builtin_graph("o3")
    worst = 0.0
    hit = False
    checked = 0
    # An octahedron labeling is fixed by its three antipodal pairs.
    for j in range(1, 6):
        rest = [k for k in range(1, 6) if k != j]
        for k in rest[1:]:
            pair3 = [k2 for k2 in rest if k2 != k and k2 != rest[0]]
            order = [0, rest[0], pair3[0], j, k, pair3[1]]
            d = space.d[np.ix_(order, order)]
            wit = gamma_feasible(graph, d)
            checked += 1
            worst = max(worst, wit.residual)
            if wit.status == INFEASIBLE:
                hit = True
    scale = max(space.diameter**2, 1e-300)
    return hit, -worst / scale if hit else worst / scale, {"checked": checked}


PREDICATES = {
    "comparison_passes_nneg_ge2": _predicate_nneg2,
    "c4_passes_c5_infeasible": _predicate_c5,
    "c4_passes_o3_infeasible": _predicate_o3,
}


def _hunt_one(cfg: HuntConfig, index: int) -> dict:
    predicate = PREDICATES[cfg.predicate]
    space = random_metric(cfg.generator, cfg.n_points, (cfg.seed, index), delta=cfg.delta)
    hit, margin, details = predicate(space)
    return {
        "index": index,
        "hit": bool(hit),
        "margin": float(margin),
        "details": details,
        "d": space.d.tolist() if hit else None,
    }


def _hunt_shard(args) -> list[dict]:
    cfg, indices = args
    return [_hunt_one(cfg, i) for i in indices]


def hunt_counterexamples(cfg: HuntConfig, workers: int = 1) -> dict:
    """Stream random spaces through a predicate; report hits and near misses.

    Purely numerical: a hit is reproduction data (seed, index, matrix), never
    a mathematical claim.  Identical configs give byte-identical reports; the
    per-sample seed stream makes worker sharding order-independent.
    """
    if cfg.predicate not in PREDICATES:
        raise ValueError(
            f"unknown predicate {cfg.predicate!r}; available: {sorted(PREDICATES)}"
        )
    indices = list(range(cfg.budget))
    if workers > 1 and cfg.budget > 1:
        shards = [
            (cfg, indices[s::workers]) for s in range(workers) if indices[s::workers]
        ]
        results: list[dict] = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_hunt_shard, shards):
                results.extend(part)
        results.sort(key=lambda r: r["index"])
    else:
        results = [_hunt_one(cfg, i) for i in indices]

    hits = [r for r in results if r["hit"]]
    misses = sorted(
        (r for r in results if not r["hit"]), key=lambda r: (r["margin"], r["index"])
    )[: cfg.keep]
    return {
        "schema_version": 1,
        "config": {
            "generator": cfg.generator,
            "n_points": cfg.n_points,
            "budget": cfg.budget,
            "seed": cfg.seed,
            "predicate": cfg.predicate,
            "keep": cfg.keep,
            "delta": cfg.delta,
        },
        "scanned": len(results),
        "hits": hits,
        "near_misses": [
            {"index": r["index"], "margin": r["margin"], "details": r["details"]}
            for r in misses
        ],
    }
