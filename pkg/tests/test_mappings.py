import math

import numpy as np
import pytest

import hadamard as hd
from conftest import ept, hpt_polar


def test_identity(E2):
    x = ept(E2, 1.0, 2.0)
    assert hd.apply_mapping(E2, hd.Identity(), x) == x
    assert isinstance(hd.known_fixed_set(hd.Identity()), hd.WholeSpace)


def test_euclidean_rotation_matches_matrix(E2):
    center = ept(E2, 1.0, -1.0)
    rot = hd.Rotation(center, 0.7)
    rng = np.random.default_rng(13)
    c, s = math.cos(0.7), math.sin(0.7)
    R = np.array([[c, -s], [s, c]])
    for _ in range(50):
        p = rng.normal(scale=3.0, size=2)
        got = hd.apply_mapping(E2, rot, ept(E2, *p))
        want = np.array(center.data) + R @ (p - np.array(center.data))
        assert np.allclose(got.data, want, atol=1e-12)


def test_rotation_is_isometry_and_fixes_center(E2, H2):
    cases = [
        (E2, hd.Rotation(ept(E2, 0.5, 0.5), 1.1), lambda: ept(E2, *np.random.default_rng(1).normal(size=2))),
        (H2, hd.Rotation(hpt_polar(H2, 1.0, 0.3), 1.1), None),
    ]
    for space, rot, _ in cases:
        T = hd.compile_mapping(space, rot)
        assert space.distance(T(rot.center), rot.center) <= 1e-9
        rng = hd.stream(9, 1)
        region = hd.default_region(space)
        for _ in range(100):
            x = hd.random_point(space, region, rng)
            y = hd.random_point(space, region, rng)
            assert space.distance(T(x), T(y)) == pytest.approx(
                space.distance(x, y), rel=1e-9, abs=1e-9
            )
            if not isinstance(space.descriptor, hd.Euclidean):
                assert hd.validate_point(space, T(x)) is None


def test_full_turn_rotation_fixes_everything():
    rot = hd.Rotation(hd.euclidean_point(hd.make_space(hd.Euclidean(2)), 0.0, 0.0), 4.0 * math.pi)
    assert isinstance(hd.known_fixed_set(rot), hd.WholeSpace)
    part = hd.Rotation(rot.center, 1.0)
    assert hd.known_fixed_set(part) == [rot.center]


def test_rotation_requires_dim_two(E3):
    with pytest.raises(ValueError):
        hd.compile_mapping(E3, hd.Rotation(ept(E3, 0.0, 0.0, 0.0), 1.0))


def test_projection_mapping_fixes_target_and_is_nonexpansive(E2):
    seg = hd.Segment(ept(E2, -1.0, 0.0), ept(E2, 1.0, 0.0))
    T = hd.compile_mapping(E2, hd.ProjectionOnto(seg))
    on_seg = ept(E2, 0.3, 0.0)
    assert E2.distance(T(on_seg), on_seg) <= 1e-12
    rng = np.random.default_rng(2)
    for _ in range(100):
        x = ept(E2, *rng.normal(scale=4.0, size=2))
        y = ept(E2, *rng.normal(scale=4.0, size=2))
        assert E2.distance(T(x), T(y)) <= E2.distance(x, y) + 1e-10
    assert hd.known_fixed_set(hd.ProjectionOnto(seg)) == seg


def test_geodesic_average(E2):
    seg = hd.Segment(ept(E2, 0.0, 0.0), ept(E2, 2.0, 0.0))
    avg = hd.GeodesicAverage(0.5, hd.ProjectionOnto(seg))
    x = ept(E2, 1.0, 4.0)
    got = hd.apply_mapping(E2, avg, x)
    assert got.data == pytest.approx((1.0, 2.0))
    assert hd.known_fixed_set(avg) == seg
    assert isinstance(hd.known_fixed_set(hd.GeodesicAverage(1.0, hd.ProjectionOnto(seg))), hd.WholeSpace)


def test_composition_order_and_fixed_set(E2):
    rot = hd.Rotation(ept(E2, 0.0, 0.0), math.pi / 2)
    shift = hd.Translation((1.0, 0.0))
    comp = hd.Composition((rot, shift))  # rotate first, then shift
    got = hd.apply_mapping(E2, comp, ept(E2, 1.0, 0.0))
    assert got.data == pytest.approx((1.0, 1.0), abs=1e-12)
    seg = hd.Segment(ept(E2, 0.0, 0.0), ept(E2, 1.0, 0.0))
    comp2 = hd.Composition((hd.Identity(), hd.ProjectionOnto(seg)))
    assert hd.known_fixed_set(comp2) == seg
    assert hd.known_fixed_set(hd.Composition((rot, shift))) is None


def test_translation_negative_control(E2, H2):
    t = hd.Translation((0.5, 0.0))
    x = ept(E2, 0.0, 0.0)
    assert hd.apply_mapping(E2, t, x).data == (0.5, 0.0)
    assert hd.known_fixed_set(t) == []
    assert isinstance(hd.known_fixed_set(hd.Translation((0.0, 0.0))), hd.WholeSpace)
    with pytest.raises(ValueError):
        hd.compile_mapping(H2, t)


def test_compile_mapping_is_cached(E2):
    seg = hd.Segment(ept(E2, 0.0, 0.0), ept(E2, 1.0, 0.0))
    assert hd.compile_mapping(E2, hd.ProjectionOnto(seg)) is hd.compile_mapping(
        E2, hd.ProjectionOnto(seg)
    )
