"""Metric validation, model triangles, and the quadruple comparison."""

import math
from itertools import combinations

import numpy as np
import pytest

from cat5 import cat0_comparison_all, model_triangle, quad_comparison, validate_metric
from cat5.errors import (
    AsymmetricMatrix,
    NonzeroDiagonal,
    NotRealizable,
    TriangleViolation,
    ZeroOffDiagonal,
)
from cat5.verify import random_metric

TRIPOD = [
    [0.0, 2.0, 2.0, 1.0],
    [2.0, 0.0, 2.0, 1.0],
    [2.0, 2.0, 0.0, 1.0],
    [1.0, 1.0, 1.0, 0.0],
]


def test_validate_two_point():
    space = validate_metric([[0.0, 1.0], [1.0, 0.0]])
    assert space.n == 2
    assert space.diameter == 1.0


def test_validate_rejects_asymmetric():
    with pytest.raises(AsymmetricMatrix):
        validate_metric([[0, 1.0], [2.0, 0]])


def test_validate_rejects_nonzero_diagonal():
    with pytest.raises(NonzeroDiagonal):
        validate_metric([[0.5, 1.0], [1.0, 0.0]])


def test_validate_rejects_zero_off_diagonal():
    with pytest.raises(ZeroOffDiagonal):
        validate_metric([[0, 0.0, 1], [0.0, 0, 1], [1, 1, 0]])


def test_validate_triangle_violation_indices():
    d = [[0, 1.0, 5.0], [1.0, 0, 1.0], [5.0, 1.0, 0]]
    with pytest.raises(TriangleViolation) as exc:
        validate_metric(d)
    i, j, k = exc.value.indices
    assert d[i][k] > d[i][j] + d[j][k]


def test_validate_tripod_by_enumeration():
    space = validate_metric(TRIPOD)
    d = space.d
    for i, j, k in combinations(range(4), 3):
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            assert d[a, c] <= d[a, b] + d[b, c] + 1e-15


def test_model_triangle_degenerate_collinear():
    tri = model_triangle(1.0, 1.0, 2.0)
    assert tri.a == (0.0, 0.0)
    assert tri.b == (1.0, 0.0)
    assert tri.c[1] == 0.0  # collinear, forced by the equality case
    assert math.hypot(*tri.c) == pytest.approx(1.0, rel=1e-12)
    assert math.hypot(tri.c[0] - 1.0, tri.c[1]) == pytest.approx(2.0, rel=1e-12)


def test_model_triangle_right_angle():
    tri = model_triangle(1.0, 1.0, math.sqrt(2.0))
    assert tri.c == pytest.approx((0.0, 1.0), abs=1e-12)


def test_model_triangle_3_4_6():
    tri = model_triangle(3.0, 4.0, 6.0)
    assert math.hypot(tri.c[0], tri.c[1]) == pytest.approx(4.0, rel=1e-12)
    assert math.hypot(tri.c[0] - 3.0, tri.c[1]) == pytest.approx(6.0, rel=1e-12)


def test_model_triangle_not_realizable():
    with pytest.raises(NotRealizable):
        model_triangle(1.0, 1.0, 5.0)


def test_model_triangle_random_realization():
    rng = np.random.default_rng(101)
    for _ in range(200):
        p = rng.uniform(-2, 2, size=(3, 2))
        l_ab = float(np.linalg.norm(p[0] - p[1]))
        l_ac = float(np.linalg.norm(p[0] - p[2]))
        l_bc = float(np.linalg.norm(p[1] - p[2]))
        tri = model_triangle(l_ab, l_ac, l_bc)
        scale = max(l_ab, l_ac, l_bc, 1e-9)
        assert math.hypot(*tri.c) == pytest.approx(l_ac, abs=1e-12 * scale)
        assert math.hypot(tri.c[0] - l_ab, tri.c[1]) == pytest.approx(l_bc, abs=1e-12 * scale)


def test_quad_square_slack_zero(unit_square):
    res = quad_comparison(unit_square, 0, 2, 1, 3)
    assert res.holds
    assert res.slack == pytest.approx(0.0, abs=1e-12)


def test_quad_failing_slack_minus_one(failing_space):
    # d(x, y) = 2 with four unit sides collapses both model apexes to the
    # midpoint, so the minimum is 0 against d(p, q) = 1.
    res = quad_comparison(failing_space, 0, 1, 2, 3)
    assert not res.holds
    assert res.slack == pytest.approx(-1.0, abs=1e-12)


def test_quad_euclidean_always_holds():
    rng = np.random.default_rng(7)
    for _ in range(200):
        k = int(rng.integers(2, 5))
        pts = rng.uniform(size=(4, k))
        d = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(axis=2))
        space = validate_metric(d)
        res = quad_comparison(space, 0, 1, 2, 3)
        assert res.holds, res


def test_quad_slack_symmetric_under_pair_swaps():
    for seed in range(30):
        space = random_metric("general", 4, (19, seed))
        base = quad_comparison(space, 0, 1, 2, 3).slack
        assert quad_comparison(space, 1, 0, 2, 3).slack == pytest.approx(base, abs=1e-12)
        assert quad_comparison(space, 0, 1, 3, 2).slack == pytest.approx(base, abs=1e-12)


def _brute_force_min(space, p, q, x, y, samples=100_000):
    d = space.d
    L = d[x, y]
    tp = model_triangle(L, d[x, p], d[y, p])
    tq = model_triangle(L, d[x, q], d[y, q])
    pxy = np.array(tp.c)
    qxy = np.array([tq.c[0], -tq.c[1]])
    t = np.linspace(0.0, L, samples)
    z = np.column_stack([t, np.zeros_like(t)])
    total = np.linalg.norm(z - pxy, axis=1) + np.linalg.norm(z - qxy, axis=1)
    return float(total.min())


def test_quad_closed_form_matches_brute_force():
    """Sandwich: the sampled minimum can exceed the closed form by at most one
    grid step of Lipschitz slack (the objective is 2-Lipschitz along the side)
    and can never fall below it.  Smooth instances agree to 1e-6."""
    samples = 100_000
    checked_smooth = 0
    for kind, seed0 in (("general", 23), ("tree", 29)):
        for seed in range(10):
            space = random_metric(kind, 4, (seed0, seed))
            h = space.d[2, 3] / (samples - 1)
            for (p, q), (x, y) in (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))):
                res = quad_comparison(space, p, q, x, y)
                brute = _brute_force_min(space, p, q, x, y, samples) - space.d[p, q]
                assert res.slack - 1e-9 <= brute <= res.slack + 2 * h + 1e-9
                L = space.d[x, y]
                tp = model_triangle(L, space.d[x, p], space.d[y, p])
                tq = model_triangle(L, space.d[x, q], space.d[y, q])
                if min(tp.c[1], tq.c[1]) > 0.05 * L:  # apexes well off the side
                    assert brute == pytest.approx(res.slack, abs=1e-6)
                    checked_smooth += 1
    assert checked_smooth >= 10


def test_all_quadruples_pass_on_trees():
    for seed in range(100):
        space = random_metric("tree", 5, (31, seed))
        report = cat0_comparison_all(space)
        assert report.holds, (seed, report.worst_slack)


def test_all_quadruples_failure_witness(failing_space):
    report = cat0_comparison_all(failing_space)
    assert not report.holds
    assert report.worst_slack == pytest.approx(-1.0, abs=1e-12)
    (p, q), (x, y) = report.worst_labeling
    assert {p, q} == {0, 1} and {x, y} == {2, 3}


def test_four_point_space_checks_three_labelings():
    space = validate_metric(TRIPOD)
    report = cat0_comparison_all(space)
    assert report.n_checked == 3
    assert report.holds  # trees satisfy the comparison
