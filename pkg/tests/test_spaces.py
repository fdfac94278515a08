import math

import numpy as np
import pytest

import hadamard as hd
from conftest import CATERPILLAR, ept, hpt_polar
import oracles


def test_euclidean_distance_matches_numpy(E3):
    rng = np.random.default_rng(7)
    for _ in range(100):
        a, b = rng.normal(size=3), rng.normal(size=3)
        pa, pb = ept(E3, *a), ept(E3, *b)
        assert E3.distance(pa, pb) == pytest.approx(np.linalg.norm(a - b), abs=1e-14)


def test_euclidean_geodesic_is_affine(E2):
    a, b = ept(E2, 1.0, 2.0), ept(E2, -3.0, 6.0)
    z = E2.geodesic_point(a, b, 0.25)
    assert z.data == pytest.approx((0.25 * 1.0 + 0.75 * -3.0, 0.25 * 2.0 + 0.75 * 6.0))
    assert E2.geodesic_point(a, b, 1.0) == a
    assert E2.geodesic_point(a, b, 0.0) == b


def test_geodesic_distance_split_contract(E2, H2, tree):
    # d(z, x) = (1 - lam) d(x, y) and d(z, y) = lam d(x, y), all spaces
    cases = [
        (E2, ept(E2, 0.5, -2.0), ept(E2, 4.0, 1.0)),
        (H2, hpt_polar(H2, 1.2, 0.3), hpt_polar(H2, 2.1, -1.0)),
        (tree, hd.tree_point(tree, 1, 0.7), hd.tree_point(tree, 3, 1.1)),
    ]
    for space, x, y in cases:
        d = space.distance(x, y)
        for lam in (0.0, 0.17, 0.5, 0.83, 1.0):
            z = space.geodesic_point(x, y, lam)
            assert space.distance(z, x) == pytest.approx((1 - lam) * d, abs=1e-10)
            assert space.distance(z, y) == pytest.approx(lam * d, abs=1e-10)


def test_hyperbolic_distance_matches_arccosh_oracle(H2):
    rng = np.random.default_rng(3)
    for _ in range(200):
        r1, r2 = rng.uniform(0, 5, size=2)
        t1, t2 = rng.uniform(-math.pi, math.pi, size=2)
        a, b = hpt_polar(H2, r1, t1), hpt_polar(H2, r2, t2)
        expect = oracles.hyper_distance(a.data, b.data)
        assert H2.distance(a, b) == pytest.approx(expect, rel=1e-10, abs=1e-10)


def test_hyperbolic_distance_from_base_is_radius(H2):
    for r in (0.0, 0.1, 1.0, 4.5):
        p = hpt_polar(H2, r, 0.7)
        assert H2.distance(H2.base, p) == pytest.approx(r, abs=1e-12)


def test_hyperbolic_close_points_stable(H2):
    # the asinh chord form must not lose the distance of nearby points
    a = hpt_polar(H2, 1.0, 0.0)
    b = hpt_polar(H2, 1.0 + 1e-9, 0.0)
    assert H2.distance(a, b) == pytest.approx(1e-9, rel=1e-5)
    mid = H2.geodesic_point(a, b, 0.5)
    assert not H2.point_violations(mid)


def test_hyperbolic_point_validation(H2):
    off_sheet = hd.Point(H2.descriptor, (1.0, 1.0, 0.0))
    assert hd.validate_point(H2, off_sheet)
    lower = hd.Point(H2.descriptor, (-math.cosh(1.0), math.sinh(1.0), 0.0))
    assert hd.validate_point(H2, lower)
    assert hd.validate_point(H2, hpt_polar(H2, 2.0, 1.0)) is None


def test_tree_vertex_distances_match_networkx(tree):
    vdist = oracles.tree_vertex_distances(CATERPILLAR)
    for u in range(tree.n):
        for v in range(tree.n):
            ours = tree.distance(tree.vertex_point(u), tree.vertex_point(v))
            assert ours == pytest.approx(vdist[u][v], abs=1e-12)


def test_tree_point_distance_matches_oracles(tree):
    rng = np.random.default_rng(11)
    vdist = oracles.tree_vertex_distances(CATERPILLAR)
    for _ in range(100):
        e1, e2 = rng.integers(5, size=2)
        p = (int(e1), float(rng.uniform(0, CATERPILLAR.edges[e1][2])))
        q = (int(e2), float(rng.uniform(0, CATERPILLAR.edges[e2][2])))
        pp, qq = hd.tree_point(tree, *p), hd.tree_point(tree, *q)
        expect = oracles.tree_point_distance(CATERPILLAR, p, q, vdist)
        assert tree.distance(pp, qq) == pytest.approx(expect, abs=1e-12)
        coarse = oracles.tree_dijkstra_distance(CATERPILLAR, p, q, resolution=0.01)
        assert tree.distance(pp, qq) == pytest.approx(coarse, abs=0.02)


def test_tree_vertex_points_are_canonical(tree):
    # any (edge, endpoint) description of a vertex collapses to one encoding
    v3 = tree.vertex_point(3)
    via_edge2 = tree.canonical(hd.Point(tree.descriptor, (2, 0.5)))  # edge (1,3) end
    via_edge3 = tree.canonical(hd.Point(tree.descriptor, (3, 0.0)))  # edge (3,4) start
    assert via_edge2 == v3
    assert via_edge3 == v3
    assert tree.distance(via_edge2, via_edge3) == 0.0


def test_tree_star_midpoint_is_hub():
    star = hd.make_space(
        hd.WeightedTree(hd.TreeTopology(4, ((0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0))))
    )
    a = hd.tree_point(star, 0, 1.0)  # leaf 1
    b = hd.tree_point(star, 1, 1.0)  # leaf 2
    mid = star.geodesic_point(a, b, 0.5)
    assert mid == star.vertex_point(0)
    assert star.distance(mid, a) == pytest.approx(1.0)


def test_tree_rejects_bad_topologies():
    with pytest.raises(hd.InvalidSpaceError):
        hd.make_space(hd.WeightedTree(hd.TreeTopology(3, ((0, 1, 1.0),))))
    with pytest.raises(hd.InvalidSpaceError):
        hd.make_space(hd.WeightedTree(hd.TreeTopology(2, ((0, 1, -2.0),))))
    with pytest.raises(hd.InvalidSpaceError):
        # cycle: 3 vertices, 3 edges is already the wrong count; use a real cycle
        hd.make_space(
            hd.WeightedTree(hd.TreeTopology(4, ((0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0))))
        )


def test_product_metric_is_l2(prod, E2, H2):
    pa = prod.pair(ept(E2, 0.0, 0.0), hpt_polar(H2, 0.0, 0.0))
    pb = prod.pair(ept(E2, 3.0, 0.0), hpt_polar(H2, 4.0, 0.0))
    assert prod.distance(pa, pb) == pytest.approx(5.0, abs=1e-12)
    z = prod.geodesic_point(pa, pb, 0.5)
    assert prod.distance(z, pa) == pytest.approx(2.5, abs=1e-12)
    # components interpolate in their own geometry
    assert z.data[0].data == pytest.approx((1.5, 0.0))
    assert H2.distance(z.data[1], H2.base) == pytest.approx(2.0, abs=1e-12)


def test_product_depth_cap():
    desc = hd.Euclidean(1)
    for _ in range(4):
        desc = hd.Product(desc, hd.Euclidean(1))
    with pytest.raises(hd.InvalidSpaceError):
        hd.make_space(hd.Product(desc, hd.Euclidean(1)))


def test_space_mismatch_rejected(E2, E3):
    with pytest.raises(hd.SpaceMismatchError):
        E2.distance(ept(E2, 0.0, 0.0), ept(E3, 0.0, 0.0, 0.0))


def test_lambda_range_enforced(E2):
    a, b = ept(E2, 0.0, 0.0), ept(E2, 1.0, 0.0)
    with pytest.raises(ValueError):
        E2.geodesic_point(a, b, 1.5)
    with pytest.raises(ValueError):
        E2.geodesic_point(a, b, -0.1)


def test_make_space_caches_handles():
    assert hd.make_space(hd.Euclidean(2)) is hd.make_space(hd.Euclidean(2))
