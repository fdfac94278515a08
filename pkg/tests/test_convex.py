import math

import numpy as np
import pytest

import hadamard as hd
from hadamard.convex import IncompatibleSetError
from conftest import CATERPILLAR, ept, hpt_polar
import oracles


def test_contains_ball_and_segment(E2):
    ball = hd.Ball(ept(E2, 0.0, 0.0), 2.0)
    assert hd.contains(E2, ball, ept(E2, 1.0, 1.0))
    assert not hd.contains(E2, ball, ept(E2, 2.0, 1.0))
    seg = hd.Segment(ept(E2, 0.0, 0.0), ept(E2, 4.0, 0.0))
    assert hd.contains(E2, seg, ept(E2, 1.5, 0.0))
    assert not hd.contains(E2, seg, ept(E2, 1.5, 0.1))
    assert not hd.contains(E2, seg, ept(E2, 5.0, 0.0))


def test_contains_halfspace(E2):
    hs = hd.HalfSpace((0.0, 1.0), 1.0)
    assert hd.contains(E2, hs, ept(E2, 7.0, 1.5))
    assert not hd.contains(E2, hs, ept(E2, 0.0, 0.9))


def test_set_space_compatibility_enforced(E2, tree):
    with pytest.raises(IncompatibleSetError):
        hd.contains(E2, hd.Subtree(frozenset({0, 1})), ept(E2, 0.0, 0.0))
    with pytest.raises(IncompatibleSetError):
        hd.contains(tree, hd.HalfSpace((1.0,), 0.0), hd.tree_point(tree, 0, 0.5))
    with pytest.raises(IncompatibleSetError):
        # vertices 0 and 4 are not adjacent in the caterpillar
        hd.project_point(tree, hd.Subtree(frozenset({0, 4})), hd.tree_point(tree, 0, 0.5))


def test_ball_projection_euclidean_oracle(E3):
    rng = np.random.default_rng(31)
    center = ept(E3, 0.5, -1.0, 2.0)
    ball = hd.Ball(center, 1.5)
    for _ in range(50):
        x = ept(E3, *rng.normal(scale=4.0, size=3))
        u, _ = hd.project_point(E3, ball, x)
        cx, xx = np.array(center.data), np.array(x.data)
        d = np.linalg.norm(xx - cx)
        want = xx if d <= 1.5 else cx + 1.5 * (xx - cx) / d
        assert np.allclose(u.data, want, atol=1e-12)


def test_ball_projection_hyperbolic_lands_on_boundary(H2):
    center = hpt_polar(H2, 0.5, 0.0)
    ball = hd.Ball(center, 1.0)
    x = hpt_polar(H2, 4.0, 2.0)
    u, _ = hd.project_point(H2, ball, x)
    assert H2.distance(center, u) == pytest.approx(1.0, abs=1e-10)
    # geodesic optimality: u is on the center-x geodesic
    d_cx = H2.distance(center, x)
    assert H2.distance(center, u) + H2.distance(u, x) == pytest.approx(d_cx, abs=1e-9)


def test_halfspace_projection_matches_affine_formula(E2):
    hs = hd.HalfSpace((3.0, -4.0), 2.0)
    x = ept(E2, -1.0, 2.0)
    u, _ = hd.project_point(E2, hs, x)
    n = np.array([3.0, -4.0])
    xx = np.array(x.data)
    want = xx + (2.0 - n @ xx) / (n @ n) * n
    assert np.allclose(u.data, want, atol=1e-12)
    assert hd.contains(E2, hs, u, 1e-9)


def test_segment_projection_euclidean_grid_oracle(E3):
    rng = np.random.default_rng(17)
    for _ in range(30):
        a, b, x = (ept(E3, *rng.normal(scale=3.0, size=3)) for _ in range(3))
        lam, u, _ = hd.project_segment(E3, a, b, x)
        want = oracles.euclid_segment_argmin(a.data, b.data, x.data, 100001)
        assert abs(lam - want) <= 2e-5


def test_segment_projection_hyperbolic_grid_oracle(H2):
    rng = np.random.default_rng(19)
    for _ in range(30):
        a = hpt_polar(H2, rng.uniform(0, 3), rng.uniform(-3, 3))
        b = hpt_polar(H2, rng.uniform(0, 3), rng.uniform(-3, 3))
        x = hpt_polar(H2, rng.uniform(0, 3), rng.uniform(-3, 3))
        lam, u, _ = hd.project_segment(H2, a, b, x)
        want = oracles.hyper_segment_argmin(a.data, b.data, x.data, 100001)
        assert abs(lam - want) <= 2e-5


def test_segment_projection_tree_grid_oracle(tree):
    rng = np.random.default_rng(29)
    vdist = oracles.tree_vertex_distances(CATERPILLAR)
    for _ in range(30):
        pts = []
        for _ in range(3):
            e = int(rng.integers(5))
            pts.append((e, float(rng.uniform(0, CATERPILLAR.edges[e][2]))))
        (a, b, x) = pts
        pa, pb, px = (hd.tree_point(tree, *p) for p in pts)
        if tree.distance(pa, pb) < 1e-9:
            continue
        lam, u, _ = hd.project_segment(tree, pa, pb, px)
        want = oracles.tree_segment_argmin(CATERPILLAR, a, b, x, 100001, vdist)
        # compare by projected point, not lambda: the oracle grid is coarse
        d_here = tree.distance(px, u)
        d_want = tree.distance(px, tree.geodesic_point(pa, pb, want))
        assert d_here <= d_want + 1e-6


def test_subtree_projection_gate_vertex(tree):
    cset = hd.Subtree(frozenset({0, 1}))
    # a point deep on edge (3,4) must exit through vertex 1
    x = hd.tree_point(tree, 3, 1.2)
    u, _ = hd.project_point(tree, cset, x)
    assert u == tree.vertex_point(1)
    # brute force over a dense sample of the subtree
    best = min(
        tree.distance(x, hd.tree_point(tree, 0, t)) for t in np.linspace(0, 1.0, 2001)
    )
    assert tree.distance(x, u) <= best + 1e-12


def test_projection_idempotent_and_inside(E2, H2):
    cases = [
        (E2, hd.Ball(ept(E2, 1.0, 1.0), 2.0), ept(E2, 5.0, 5.0)),
        (E2, hd.Segment(ept(E2, -1.0, 0.0), ept(E2, 1.0, 2.0)), ept(E2, 3.0, -3.0)),
        (H2, hd.Segment(hpt_polar(H2, 1.0, 0.0), hpt_polar(H2, 1.0, 2.0)), hpt_polar(H2, 3.0, -1.5)),
    ]
    for space, cset, x in cases:
        u, _ = hd.project_point(space, cset, x)
        assert hd.contains(space, cset, u, 1e-9)
        u2, _ = hd.project_point(space, cset, u)
        assert space.distance(u, u2) <= 1e-9


def test_probe_points_stay_in_set(E2, tree):
    cases = [
        (E2, hd.Ball(ept(E2, 0.0, 0.0), 2.0)),
        (E2, hd.Segment(ept(E2, 0.0, 0.0), ept(E2, 3.0, 1.0))),
        (tree, hd.Subtree(frozenset({1, 3, 5}))),
    ]
    for space, cset in cases:
        u, _ = hd.project_point(space, cset, hd.random_point(space, hd.default_region(space), hd.stream(0, 9)))
        pts = hd.probe_points(space, cset, u, 64, seed=3)
        assert len(pts) >= 64
        for p in pts:
            assert hd.contains(space, cset, p, 1e-8)


def test_certificate_accepts_true_projection(E2):
    seg = hd.Segment(ept(E2, -2.0, 1.0), ept(E2, 2.0, 1.0))
    x = ept(E2, 0.5, 4.0)
    res = hd.project(E2, seg, x, probes=500)
    assert res.certificate_residual is not None
    scale = 1.0 + E2.distance(x, res.u) ** 2
    assert res.certificate_residual >= -1e-8 * scale
    assert res.u.data == pytest.approx((0.5, 1.0), abs=1e-9)


def test_certificate_rejects_displaced_candidate(E2):
    seg = hd.Segment(ept(E2, -2.0, 1.0), ept(E2, 2.0, 1.0))
    x = ept(E2, 0.5, 4.0)
    wrong = ept(E2, 1.5, 1.0)  # in the set, but not the nearest point
    res = hd.characterization_residual(E2, seg, x, wrong, probes=500)
    assert res < -1e-3


def test_certificate_requires_membership(E2):
    seg = hd.Segment(ept(E2, -2.0, 1.0), ept(E2, 2.0, 1.0))
    with pytest.raises(ValueError):
        hd.characterization_residual(E2, seg, ept(E2, 0.0, 4.0), ept(E2, 0.0, 2.0), probes=50)


def test_projection_nonexpansive_spot_check(E2):
    ball = hd.Ball(ept(E2, 0.0, 0.0), 1.0)
    rng = np.random.default_rng(41)
    for _ in range(200):
        x = ept(E2, *rng.normal(scale=3.0, size=2))
        y = ept(E2, *rng.normal(scale=3.0, size=2))
        ux, _ = hd.project_point(E2, ball, x)
        uy, _ = hd.project_point(E2, ball, y)
        assert E2.distance(ux, uy) <= E2.distance(x, y) + 1e-12


def test_whole_space_projection_is_identity(E2):
    x = ept(E2, 2.0, -3.0)
    u, _ = hd.project_point(E2, hd.WholeSpace(), x)
    assert u == x
