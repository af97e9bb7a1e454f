"""Graph construction and graph-comparison feasibility."""

import numpy as np
import pytest

from cat5 import builtin_graph, c4_equivalence_check, cycle_implication_check, gamma_feasible
from cat5.errors import BadDistances, UnknownGraph
from cat5.gamma import (
    FEASIBLE,
    INFEASIBLE,
    _psd_clip,
    c4_instance,
    cycle_labelings,
    graph_from_edges,
    witness_residual,
)
from cat5.verify import random_metric

FAILING_QUAD = np.array(
    [
        [0.0, 1.0, 1.0, 1.0],
        [1.0, 0.0, 1.0, 2.0],
        [1.0, 1.0, 0.0, 1.0],
        [1.0, 2.0, 1.0, 0.0],
    ]
)  # cycle order (p, x, q, y); diagonals (p, q) and (x, y)


def test_builtin_c4():
    g = builtin_graph("c4")
    assert g.n_vertices == 4
    assert set(g.edges()) == {(0, 1), (1, 2), (2, 3), (0, 3)}
    assert set(g.non_edges()) == {(0, 2), (1, 3)}


def test_builtin_cycle_param():
    g = builtin_graph("cycle", n=6)
    assert g.n_vertices == 6
    assert len(g.edges()) == 6


def test_builtin_o3():
    g = builtin_graph("o3")
    assert g.n_vertices == 6
    assert len(g.edges()) == 12
    assert set(g.non_edges()) == {(0, 3), (1, 4), (2, 5)}


def test_builtin_trees():
    tripod = builtin_graph("tripod")
    assert tripod.n_vertices == 4
    assert len(tripod.edges()) == 3
    assert len(tripod.non_edges()) == 3
    star = builtin_graph("star4")
    assert star.n_vertices == 5
    assert len(star.edges()) == 4


def test_builtin_unknown():
    with pytest.raises(UnknownGraph):
        builtin_graph("tesseract")


def test_graph_from_edges_validates():
    with pytest.raises(UnknownGraph):
        graph_from_edges(3, [(0, 3)])


def test_square_feasible_with_tight_witness(unit_square):
    wit = gamma_feasible(builtin_graph("c4"), unit_square.d)
    assert wit.status == FEASIBLE
    assert wit.residual <= wit.feas_tol
    # the planar square itself is a witness with every constraint tight
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    gram = pts @ pts.T
    assert witness_residual(builtin_graph("c4"), unit_square.d, gram) < 1e-12


def test_failing_quadruple_infeasible():
    wit = gamma_feasible(builtin_graph("c4"), FAILING_QUAD)
    assert wit.status == INFEASIBLE
    assert wit.residual > wit.infeas_floor


def test_octahedron_identity_witness(octahedron):
    wit = gamma_feasible(builtin_graph("o3"), octahedron.d)
    assert wit.status == FEASIBLE
    pts = np.vstack([np.eye(3), -np.eye(3)])
    gram = pts @ pts.T
    assert witness_residual(builtin_graph("o3"), octahedron.d, gram) < 1e-12


def test_scale_equivariance():
    graph = builtin_graph("c4")
    for seed in range(20):
        space = random_metric("general", 4, (97, seed))
        base = gamma_feasible(graph, space.d)
        for s in (0.5, 2.0, 10.0):
            scaled = gamma_feasible(graph, s * space.d)
            assert scaled.status == base.status, (seed, s)
            if base.status == FEASIBLE:
                # the scaled witness certifies the scaled instance
                resid = witness_residual(graph, s * space.d, s * s * base.gram)
                assert resid <= s * s * base.feas_tol + 1e-12


def test_feasible_witness_monotone_in_nonadjacent_slack(unit_square):
    graph = builtin_graph("c4")
    # shrink the diagonals below sqrt(2): the planar square then certifies
    # the instance with strict slack on both nonadjacent pairs
    d = unit_square.d.copy()
    for i, j in graph.non_edges():
        d[i, j] = d[j, i] = 1.2
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    gram = pts @ pts.T
    feas_tol = 1e-7 * (d**2).max()
    assert witness_residual(graph, d, gram) <= feas_tol
    diag = np.diag(gram)
    sd = diag[:, None] + diag[None, :] - 2 * gram
    for i, j in graph.non_edges():
        slack = np.sqrt(sd[i, j]) - d[i, j]
        assert slack > 0.1
        # loosening the bound keeps the witness, and so does tightening it
        # by less than the slack; overshooting the slack breaks it
        for factor, fine in ((-0.5, True), (0.9, True), (2.0, False)):
            moved = d.copy()
            moved[i, j] = moved[j, i] = d[i, j] + factor * slack
            resid = witness_residual(graph, moved, gram)
            if fine:
                assert resid <= feas_tol
            else:
                assert resid > feas_tol


def test_psd_projection_clips():
    rng = np.random.default_rng(103)
    for _ in range(50):
        n = int(rng.integers(2, 7))
        m = rng.normal(size=(n, n))
        m = m + m.T
        clipped, _, _ = _psd_clip(m)
        w = np.linalg.eigvalsh(clipped)
        rho = max(np.abs(np.linalg.eigvalsh(m)).max(), 1.0)
        assert w.min() >= -1e-12 * rho


def test_c4_equivalence_random_mixed():
    # generic generators; raw tree metrics sit exactly on the comparison
    # boundary (zero slack) and land in the undecided band by design
    kinds = ("general", "euclidean_2", "perturbed_tree", "euclidean_4")
    total_undecided = 0
    total = 0
    for seed in range(50):
        space = random_metric(kinds[seed % 4], 4, (107, seed))
        rep = c4_equivalence_check(space)
        assert rep.disagreement_count == 0, rep.disagreements
        total_undecided += rep.undecided
        total += rep.n_pairings
    assert total == 150
    assert total_undecided <= 0.02 * total


def test_c4_equivalence_tree_boundary_cases_stay_undecided():
    """Tree quadruples with geodesically collinear points have zero slack and
    must be excluded from the agreement tally rather than miscounted."""
    space = random_metric("tree", 4, (108, 3))
    rep = c4_equivalence_check(space)
    assert rep.disagreement_count == 0
    assert rep.agree_hold + rep.agree_fail + rep.undecided == rep.n_pairings


def test_c4_equivalence_failing_quadruple(failing_space):
    rep = c4_equivalence_check(failing_space)
    assert rep.disagreement_count == 0
    assert rep.agree_fail >= 1


def test_c4_instance_orientation(unit_square):
    graph, d = c4_instance(unit_square, 0, 2, 1, 3)
    # diagonals of the instance are the (p, q) and (x, y) pairs
    assert d[0, 2] == pytest.approx(unit_square.d[0, 2])
    assert len(graph.non_edges()) == 2


def test_cycle_labelings_count():
    assert len(cycle_labelings(5)) == 12
    assert len(set(cycle_labelings(5))) == 12


def test_cycle_implication_trees():
    for seed in range(5):
        space = random_metric("tree", 5, (109, seed))
        rep = cycle_implication_check(space, max_cycle=5)
        assert rep.skipped is None
        assert rep.checked == 12
        assert rep.feasible == 12
        assert not rep.infeasible and not rep.undecided


def test_cycle_implication_skips_failing(failing_space):
    rep = cycle_implication_check(failing_space)
    assert rep.skipped is not None
    assert rep.checked == 0


def test_o3_stronger_than_c4(failing_space):
    """A six-point instance with an infeasible induced 4-cycle fails the octahedron."""
    d6 = np.full((6, 6), 1.2)
    np.fill_diagonal(d6, 0.0)
    # Plant the failing quadruple on vertices (0, 1, 3, 4): the O3 antipodal
    # pairs (0, 3) and (1, 4) receive its diagonals.
    quad = FAILING_QUAD
    for a, b in ((0, 1), (0, 3), (0, 4), (1, 3), (1, 4), (3, 4)):
        src = {0: 0, 1: 1, 3: 2, 4: 3}
        d6[a, b] = d6[b, a] = quad[src[a], src[b]]
    wit = gamma_feasible(builtin_graph("o3"), d6)
    assert wit.status == INFEASIBLE


def test_bad_distances():
    with pytest.raises(BadDistances):
        gamma_feasible(builtin_graph("c4"), np.zeros((3, 3)))
    with pytest.raises(BadDistances):
        gamma_feasible(builtin_graph("c4"), -np.ones((4, 4)) + np.eye(4))
