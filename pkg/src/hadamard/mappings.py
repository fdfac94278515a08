"""Catalog of nonexpansive self-maps with known fixed-point structure.

Fixed-point iteration needs test mappings whose fixed-point sets are known in
closed form: rotations fix exactly their center, metric projections fix
exactly their target set, geodesic averages inherit the fixed points of the
averaged map.  A fixed-point-free translation is included as a negative
control for the convergence diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Union

from . import convex
from .convex import ConvexSetDescriptor, project_point
from .spaces import (
    Euclidean,
    EuclideanSpace,
    Hyperbolic,
    HyperbolicSpace,
    Point,
    Space,
)


@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class Rotation:
    """Isometric rotation about a center; Euclidean(2) or Hyperbolic(2)."""

    center: Point
    angle: float


@dataclass(frozen=True)
class ProjectionOnto:
    target: ConvexSetDescriptor


@dataclass(frozen=True)
class GeodesicAverage:
    """x -> the point at fraction (1 - weight) along the geodesic from x to
    inner(x); weight 1 is the identity."""

    weight: float
    inner: "MappingDescriptor"


@dataclass(frozen=True)
class Composition:
    parts: tuple["MappingDescriptor", ...]


@dataclass(frozen=True)
class Translation:
    """Euclidean shift by a fixed vector; fixed-point free when nonzero.
    Ships as a negative control only."""

    vector: tuple[float, ...]


MappingDescriptor = Union[
    Identity, Rotation, ProjectionOnto, GeodesicAverage, Composition, Translation
]


def _euclidean_rotation(center, angle) -> Callable[[Point], Point]:
    c, s = math.cos(angle), math.sin(angle)
    cx, cy = center.data

    def apply(p: Point) -> Point:
        x, y = p.data[0] - cx, p.data[1] - cy
        return Point(p.space, (cx + c * x - s * y, cy + s * x + c * y))

    return apply


def _boost_to(point_data) -> list[list[float]]:
    """Lorentz boost taking the sheet base point (1, 0, 0) to the given
    hyperboloid point."""
    p0, p1, p2 = point_data
    f = 1.0 / (1.0 + p0)
    return [
        [p0, p1, p2],
        [p1, 1.0 + p1 * p1 * f, p1 * p2 * f],
        [p2, p1 * p2 * f, 1.0 + p2 * p2 * f],
    ]


def _mat_mul(a, b):
    return [
        [sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)] for i in range(3)
    ]


def _hyperbolic_rotation(space: HyperbolicSpace, center: Point, angle) -> Callable:
    # conjugate a spatial rotation at the base point by the boost to center
    c, s = math.cos(angle), math.sin(angle)
    rot = [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]
    fwd = _boost_to(center.data)
    p0, p1, p2 = center.data
    back = _boost_to((p0, -p1, -p2))
    m = _mat_mul(_mat_mul(fwd, rot), back)

    def apply(p: Point) -> Point:
        x = p.data
        coords = tuple(
            m[i][0] * x[0] + m[i][1] * x[1] + m[i][2] * x[2] for i in range(3)
        )
        return space._renormalize(coords)

    return apply


@lru_cache(maxsize=None)
def _compile(space: Space, mapping: MappingDescriptor) -> Callable[[Point], Point]:
    if isinstance(mapping, Identity):
        return lambda p: p
    if isinstance(mapping, Rotation):
        desc = space.descriptor
        if isinstance(desc, Euclidean) and desc.dim == 2:
            return _euclidean_rotation(mapping.center, mapping.angle)
        if isinstance(desc, Hyperbolic) and desc.dim == 2:
            assert isinstance(space, HyperbolicSpace)
            return _hyperbolic_rotation(space, mapping.center, mapping.angle)
        raise ValueError("rotations are supported in Euclidean(2) and Hyperbolic(2) only")
    if isinstance(mapping, ProjectionOnto):
        target = mapping.target

        def apply_proj(p: Point) -> Point:
            return project_point(space, target, p)[0]

        return apply_proj
    if isinstance(mapping, GeodesicAverage):
        if not (0.0 <= mapping.weight <= 1.0):
            raise ValueError("average weight must lie in [0, 1]")
        inner = _compile(space, mapping.inner)
        w = mapping.weight

        def apply_avg(p: Point) -> Point:
            return space.geodesic_point(p, inner(p), w)

        return apply_avg
    if isinstance(mapping, Composition):
        fns = [_compile(space, part) for part in mapping.parts]

        def apply_comp(p: Point) -> Point:
            for f in fns:
                p = f(p)
            return p

        return apply_comp
    if isinstance(mapping, Translation):
        vec = mapping.vector
        if not isinstance(space, EuclideanSpace):
            raise ValueError("translations are Euclidean only")

        def apply_shift(p: Point) -> Point:
            return Point(p.space, tuple(c + v for c, v in zip(p.data, vec)))

        return apply_shift
    raise ValueError(f"unknown mapping {mapping!r}")


def compile_mapping(space: Space, mapping: MappingDescriptor) -> Callable[[Point], Point]:
    """Precompiled fast application closure for use in iteration loops."""
    return _compile(space, mapping)


def apply_mapping(space: Space, mapping: MappingDescriptor, x: Point) -> Point:
    return _compile(space, mapping)(x)


FixedSet = Union[ConvexSetDescriptor, list]


def known_fixed_set(mapping: MappingDescriptor) -> Optional[FixedSet]:
    """The mapping's fixed-point set when derivable from its construction.

    Returns a convex-set descriptor, an explicit point list (possibly empty
    for fixed-point-free maps), or None when unknown.
    """
    if isinstance(mapping, Identity):
        return convex.WholeSpace()
    if isinstance(mapping, Rotation):
        if mapping.angle % (2.0 * math.pi) == 0.0:
            return convex.WholeSpace()
        return [mapping.center]
    if isinstance(mapping, ProjectionOnto):
        return mapping.target
    if isinstance(mapping, GeodesicAverage):
        if mapping.weight == 1.0:
            return convex.WholeSpace()
        return known_fixed_set(mapping.inner)
    if isinstance(mapping, Composition):
        inner = [known_fixed_set(p) for p in mapping.parts]
        if all(isinstance(s, convex.WholeSpace) for s in inner):
            return convex.WholeSpace()
        non_trivial = [s for s in inner if not isinstance(s, convex.WholeSpace)]
        if len(non_trivial) == 1 and non_trivial[0] is not None:
            return non_trivial[0]
        return None
    if isinstance(mapping, Translation):
        if all(v == 0.0 for v in mapping.vector):
            return convex.WholeSpace()
        return []
    return None
