"""Graph-comparison feasibility over Gram matrices.

A labeled graph instance asks for model points whose pairwise distances are
contracted on edges and expanded on non-edges:

    sd(i, j) <= d(i, j)^2  if i ~ j,      sd(i, j) >= d(i, j)^2  otherwise,

where sd(i, j) = G[i][i] - 2 G[i][j] + G[j][j] reads squared distances off a
positive-semidefinite Gram matrix G.  Dimension n suffices: only the Gram
matrix constrains.  Feasibility is decided by Dykstra-style alternating
projections between the PSD cone (eigenvalue clipping) and the per-pair
halfspaces, with an honest three-way outcome: infeasibility is reported when
the residual stabilizes above a floor, and borderline instances come back
``undecided``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np
from scipy.optimize import minimize

from .errors import BadDistances, UnknownGraph
from .forms import jacobi_eigh
from .metric import COMPARE_REL_TOL, FiniteMetricSpace, cat0_comparison_all, quad_comparison

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNDECIDED = "undecided"

#: Residual thresholds relative to max d^2, and the iteration discipline.
FEAS_TOL_REL = 1e-7
INFEAS_FLOOR_REL = 1e-4
PATIENCE = 500
MAX_ITER = 50_000

#: Relative improvement below which a residual plateau counts as stabilized.
STALL_REL = 1e-3


@dataclass(frozen=True, eq=False)
class ComparisonGraph:
    """Undirected simple graph labeling a comparison instance."""

    n_vertices: int
    adjacency: np.ndarray  # boolean, symmetric, zero diagonal
    name: str = ""

    def edges(self):
        return [
            (i, j)
            for i, j in combinations(range(self.n_vertices), 2)
            if self.adjacency[i, j]
        ]

    def non_edges(self):
        return [
            (i, j)
            for i, j in combinations(range(self.n_vertices), 2)
            if not self.adjacency[i, j]
        ]


@dataclass(eq=False)
class GramWitness:
    """Solver outcome: candidate Gram matrix, residual, and a three-way status."""

    gram: np.ndarray
    residual: float
    status: str
    iterations: int
    feas_tol: float
    infeas_floor: float


def graph_from_edges(n: int, edges, name: str = "") -> ComparisonGraph:
    adj = np.zeros((n, n), dtype=bool)
    for i, j in edges:
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise UnknownGraph(f"bad edge ({i}, {j}) for {n} vertices")
        adj[i, j] = adj[j, i] = True
    adj.flags.writeable = False
    return ComparisonGraph(n, adj, name)


def builtin_graph(name: str, n: int | None = None) -> ComparisonGraph:
    """Construct a named comparison graph.

    Recognized: ``c<k>`` or ``cycle`` with n (cycles, k >= 3), ``o3`` (the
    octahedron: six vertices, each adjacent to all but its antipode),
    ``tripod``/``star3``, ``star<k>`` or ``star`` with n, ``tree4``/``star4``
    (a center adjacent to four leaves).  Other tree names must be supplied as
    explicit edge lists via :func:`graph_from_edges`.
    """
    key = name.strip().lower().replace("-", "").replace("_", "")
    if key.startswith("c") and key[1:].isdigit():
        return _cycle(int(key[1:]))
    if key in ("cn", "cycle"):
        if n is None:
            raise UnknownGraph("cycle graph requires a vertex count")
        return _cycle(n)
    if key in ("o3", "octahedron"):
        pairs = [(0, 3), (1, 4), (2, 5)]
        edges = [
            (i, j) for i, j in combinations(range(6), 2) if (i, j) not in pairs
        ]
        return graph_from_edges(6, edges, "O3")
    if key in ("tripod", "star3", "3tree"):
        return _star(3, "tripod")
    if key in ("tree4", "4tree", "star4"):
        return _star(4, "star4")
    if key.startswith("star") and key[4:].isdigit():
        return _star(int(key[4:]), key)
    if key == "star":
        if n is None:
            raise UnknownGraph("star graph requires a leaf count")
        return _star(n, f"star{n}")
    raise UnknownGraph(f"unrecognized graph name {name!r}")


def _cycle(n: int) -> ComparisonGraph:
    if n < 3:
        raise UnknownGraph(f"cycle needs at least 3 vertices, got {n}")
    return graph_from_edges(n, [(i, (i + 1) % n) for i in range(n)], f"C{n}")


def _star(k: int, name: str) -> ComparisonGraph:
    if k < 1:
        raise UnknownGraph(f"star needs at least 1 leaf, got {k}")
    return graph_from_edges(k + 1, [(0, i) for i in range(1, k + 1)], name)


def _check_dists(graph: ComparisonGraph, dists) -> np.ndarray:
    d = np.array(dists, dtype=float)
    n = graph.n_vertices
    if d.shape != (n, n):
        raise BadDistances(f"expected a {n}x{n} distance matrix, got {d.shape}")
    if not np.isfinite(d).all():
        raise BadDistances("distances contain non-finite entries")
    if np.abs(d - d.T).max() > 1e-12 * max(1.0, float(np.abs(d).max())):
        raise BadDistances("distance matrix is not symmetric")
    if n > 1 and (d + np.eye(n)).min() <= 0.0:
        raise BadDistances("off-diagonal distances must be positive")
    return 0.5 * (d + d.T)


def _psd_clip(g: np.ndarray, frame: np.ndarray | None = None):
    """Project onto the PSD cone by eigenvalue clipping.

    ``frame`` warm-starts the rotation eigensolver with the previous
    iteration's eigenvectors (a similarity pre-rotation; the solver itself is
    unchanged).  Returns (projection, min eigenvalue, new frame).
    """
    if frame is not None:
        w, v_local = jacobi_eigh(frame.T @ g @ frame)
        v = frame @ v_local
    else:
        w, v = jacobi_eigh(g)
    wmin = float(w.min())
    if wmin >= 0.0:
        return 0.5 * (g + g.T), wmin, v
    clipped = (v * np.clip(w, 0.0, None)[None, :]) @ v.T
    return 0.5 * (clipped + clipped.T), wmin, v


def witness_residual(graph: ComparisonGraph, dists, gram) -> float:
    """Max constraint violation of a candidate Gram matrix (PSD part included)."""
    d = _check_dists(graph, dists)
    g = np.asarray(gram, dtype=float)
    viol = _halfspace_violations(graph, d**2, g)
    w, _ = jacobi_eigh(g)
    return max(viol, -float(w.min()), 0.0)


def _polish_feasible(g: np.ndarray, pairs, n: int):
    """Search for an exact witness near ``g`` by factored least squares.

    Parametrizes candidate points directly (rows of X, so the Gram X X^T is
    positive semidefinite by construction) and minimizes the squared hinge
    violations.  Tangentially touching feasible sets defeat alternating
    projections, but this smooth descent reaches them; the caller must verify
    the returned witness, so an unconverged polish can never flip an outcome.
    """
    w, v = jacobi_eigh(g)
    x0 = (v * np.sqrt(np.clip(w, 0.0, None))[None, :]).reshape(-1)
    idx_i = np.array([p[0] for p in pairs])
    idx_j = np.array([p[1] for p in pairs])
    bounds = np.array([p[2] for p in pairs])
    kinds = np.array([p[3] for p in pairs], dtype=float)

    def objective(flat):
        x = flat.reshape(n, n)
        diff = x[idx_i] - x[idx_j]
        sd = (diff * diff).sum(axis=1)
        viol = np.maximum(kinds * (sd - bounds), 0.0)
        grad = np.zeros_like(x)
        coeff = 4.0 * kinds * viol
        np.add.at(grad, idx_i, coeff[:, None] * diff)
        np.add.at(grad, idx_j, -coeff[:, None] * diff)
        return float(np.dot(viol, viol)), grad.reshape(-1)

    res = minimize(
        objective,
        x0,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": 400, "ftol": 1e-24, "gtol": 1e-14},
    )
    x = res.x.reshape(n, n)
    return x @ x.T


def _halfspace_violations(graph, d2, g) -> float:
    diag = np.diag(g)
    sd = diag[:, None] + diag[None, :] - 2.0 * g
    worst = 0.0
    for i, j in graph.edges():
        worst = max(worst, sd[i, j] - d2[i, j])
    for i, j in graph.non_edges():
        worst = max(worst, d2[i, j] - sd[i, j])
    return worst


def gamma_feasible(
    graph: ComparisonGraph,
    dists,
    *,
    feas_tol: float | None = None,
    infeas_floor: float | None = None,
    patience: int = PATIENCE,
    max_iter: int = MAX_ITER,
) -> GramWitness:
    """Decide feasibility of a graph-comparison instance.

    Starts from the double-centered squared-distance matrix (exact for
    Euclidean-realizable inputs) and alternates Dykstra-corrected projections.
    ``feasible`` requires the residual to reach feas_tol; ``infeasible`` means
    the residual stabilized above infeas_floor over a patience window (a
    numerically supported verdict, not a certificate); anything else that
    stalls or hits the iteration cap inside the band is ``undecided``.
    """
    d = _check_dists(graph, dists)
    n = graph.n_vertices
    d2 = d**2
    scale = float(d2.max()) if n > 1 else 1.0
    if feas_tol is None:
        feas_tol = FEAS_TOL_REL * scale
    if infeas_floor is None:
        infeas_floor = INFEAS_FLOOR_REL * scale

    centering = np.eye(n) - 1.0 / n
    g = -0.5 * centering @ d2 @ centering

    pairs = [(i, j, d2[i, j], +1) for i, j in graph.edges()]
    pairs += [(i, j, d2[i, j], -1) for i, j in graph.non_edges()]
    # Dykstra corrections: one matrix for the cone, one multiplier per halfspace.
    u_psd = np.zeros_like(g)
    mult = [0.0] * len(pairs)
    frame = None

    def done(gram, residual, status, it):
        gg = gram.copy()
        gg.flags.writeable = False
        return GramWitness(gg, residual, status, it, feas_tol, infeas_floor)

    history: list[float] = []
    next_polish = 100  # touching feasible sets stall projections; polish early
    it = 0
    for it in range(1, max_iter + 1):
        for k, (i, j, bound, kind) in enumerate(pairs):
            p = mult[k]
            # Add back the stored correction: sd changes by 4p on this pair.
            g[i, i] += p
            g[j, j] += p
            g[i, j] -= p
            g[j, i] -= p
            excess = (g[i, i] - 2.0 * g[i, j] + g[j, j]) - bound
            p_new = max(excess, 0.0) / 4.0 if kind > 0 else min(excess, 0.0) / 4.0
            mult[k] = p_new
            g[i, i] -= p_new
            g[j, j] -= p_new
            g[i, j] += p_new
            g[j, i] += p_new

        y = g + u_psd
        g, _, frame = _psd_clip(y, frame)
        u_psd = y - g

        residual = _halfspace_violations(graph, d2, g)
        if residual <= feas_tol:
            return done(g, residual, FEASIBLE, it)
        if it >= next_polish:
            candidate = _polish_feasible(g, pairs, n)
            cand_residual = _halfspace_violations(graph, d2, candidate)
            if cand_residual <= feas_tol:
                return done(candidate, cand_residual, FEASIBLE, it)
            next_polish *= 8
        history.append(residual)
        if len(history) > patience:
            prev = history[-patience - 1]
            stalled = residual >= prev * (1.0 - STALL_REL)
            if stalled and residual > infeas_floor:
                return done(g, residual, INFEASIBLE, it)
            if stalled:
                break  # plateau inside the band: equivalent to running out the cap

    residual = _halfspace_violations(graph, d2, g)
    return done(g, residual, UNDECIDED, min(it, max_iter))


@dataclass
class C4AgreementReport:
    """Agreement between the quadruple comparison and 4-cycle feasibility."""

    n_pairings: int
    agree_hold: int
    agree_fail: int
    undecided: int
    disagreements: list[dict]

    @property
    def disagreement_count(self) -> int:
        return len(self.disagreements)


def c4_instance(space: FiniteMetricSpace, p: int, q: int, x: int, y: int):
    """4-cycle instance whose diagonals are the pairs {p, q} and {x, y}."""
    order = (p, x, q, y)
    d = space.d[np.ix_(order, order)]
    return builtin_graph("c4"), d


def c4_equivalence_check(
    space: FiniteMetricSpace,
    *,
    rel_tol: float = COMPARE_REL_TOL,
    slack_band_rel: float = 1e-7,
) -> C4AgreementReport:
    """Compare 4-cycle feasibility against the quadruple comparison, pair by pair.

    Instances whose comparison slack sits within ``slack_band_rel * diameter``
    of zero, or whose solver outcome is undecided, are excluded from the
    disagreement tally.
    """
    graph = builtin_graph("c4")
    band = slack_band_rel * space.diameter
    agree_hold = agree_fail = undecided = 0
    disagreements: list[dict] = []
    n_pairings = 0
    for quad in combinations(range(space.n), 4):
        a, b, c, e = quad
        for (p, q), (x, y) in (((a, b), (c, e)), ((a, c), (b, e)), ((a, e), (b, c))):
            n_pairings += 1
            res = quad_comparison(space, p, q, x, y, rel_tol=rel_tol)
            _, d = c4_instance(space, p, q, x, y)
            wit = gamma_feasible(graph, d)
            if wit.status == UNDECIDED or abs(res.slack) <= band:
                undecided += 1
                continue
            holds = res.slack >= 0.0
            feas = wit.status == FEASIBLE
            if holds and feas:
                agree_hold += 1
            elif not holds and not feas:
                agree_fail += 1
            else:
                disagreements.append(
                    {
                        "labeling": ((p, q), (x, y)),
                        "slack": res.slack,
                        "status": wit.status,
                        "residual": wit.residual,
                    }
                )
    return C4AgreementReport(n_pairings, agree_hold, agree_fail, undecided, disagreements)


def cycle_labelings(n: int):
    """Distinct cyclic orders of n labeled points (up to rotation and reflection)."""
    out = []
    for perm in permutations(range(1, n)):
        if perm[0] < perm[-1]:
            out.append((0,) + perm)
    return out


@dataclass
class CycleImplicationReport:
    """Cycle feasibility over all labelings of comparison-passing spaces."""

    checked: int
    feasible: int
    infeasible: list[dict]
    undecided: list[dict]
    skipped: str | None = None


def cycle_implication_check(
    space: FiniteMetricSpace, max_cycle: int = 6
) -> CycleImplicationReport:
    """Check larger-cycle feasibility on a comparison-passing space.

    Runs the 5-cycle over every vertex subset and cyclic labeling (and the
    6-cycle when the space has six or more points and max_cycle allows).
    Any infeasible instance is an anomaly.
    """
    pre = cat0_comparison_all(space)
    if not pre.holds:
        return CycleImplicationReport(
            0, 0, [], [], skipped="space fails the quadruple comparison"
        )

    report = CycleImplicationReport(0, 0, [], [])
    for k in (5, 6):
        if k > max_cycle or space.n < k:
            continue
        graph = _cycle(k)
        for subset in combinations(range(space.n), k):
            for labeling in cycle_labelings(k):
                order = [subset[i] for i in labeling]
                d = space.d[np.ix_(order, order)]
                wit = gamma_feasible(graph, d)
                report.checked += 1
                record = {
                    "cycle": k,
                    "order": tuple(order),
                    "status": wit.status,
                    "residual": wit.residual,
                }
                if wit.status == FEASIBLE:
                    report.feasible += 1
                elif wit.status == INFEASIBLE:
                    report.infeasible.append(record)
                else:
                    report.undecided.append(record)
    return report


def graph_to_dict(graph: ComparisonGraph) -> dict:
    return {"n": graph.n_vertices, "edges": [list(e) for e in graph.edges()], "name": graph.name}


def graph_from_dict(data: dict) -> ComparisonGraph:
    return graph_from_edges(
        int(data["n"]), [tuple(e) for e in data["edges"]], data.get("name", "")
    )
