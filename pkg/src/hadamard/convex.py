"""Convex sets and the metric projection.

Each supported convex set knows how to test membership and how to compute the
nearest-point (metric) projection.  A projection can additionally be
*certified*: the projection of x onto C is the unique u in C with
``<xu, uy> >= 0`` for every y in C, so the minimum of that pairing over a
probe sample of C is a checkable certificate.  For true projections the
minimum is nonnegative up to rounding; for points sufficiently far from the
projection some probe goes strictly negative.

Any finite probe family only approximates the "for every y" quantifier; probe
density trades run time against the smallest detectable displacement, and the
defaults here are tuned for displacements of order 1e-2 on unit-scale sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union


from .geometry import quasilinearization
from .sampling import sample_in_ball, stream
from .spaces import (
    Euclidean,
    EuclideanSpace,
    HyperbolicSpace,
    Point,
    ProductSpace,
    Space,
    TreeSpace,
    minkowski,
)

TERNARY_MAX_ITER = 200
DEFAULT_LAMBDA_TOL = 1e-12
MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True)
class WholeSpace:
    pass


@dataclass(frozen=True)
class Ball:
    center: Point
    radius: float


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point


@dataclass(frozen=True)
class Subtree:
    vertices: frozenset[int]


@dataclass(frozen=True)
class HalfSpace:
    """Euclidean half-space {p : normal . p >= offset}."""

    normal: tuple[float, ...]
    offset: float


ConvexSetDescriptor = Union[WholeSpace, Ball, Segment, Subtree, HalfSpace]


@dataclass(frozen=True)
class ProjectionResult:
    u: Point
    certificate_residual: Optional[float]
    iterations_used: int


class IncompatibleSetError(ValueError):
    pass


def _validate_set(space: Space, cset: ConvexSetDescriptor) -> None:
    if isinstance(cset, Ball):
        if cset.radius <= 0.0:
            raise IncompatibleSetError("ball radius must be positive")
    elif isinstance(cset, Subtree):
        if not isinstance(space, TreeSpace):
            raise IncompatibleSetError("subtree sets require a tree space")
        if not cset.vertices:
            raise IncompatibleSetError("subtree vertex set is empty")
        if not all(0 <= v < space.n for v in cset.vertices):
            raise IncompatibleSetError("subtree vertex out of range")
        if not _subtree_connected(space, cset.vertices):
            raise IncompatibleSetError("subtree vertex set is not connected")
    elif isinstance(cset, HalfSpace):
        if not isinstance(space, EuclideanSpace):
            raise IncompatibleSetError("half-space sets require Euclidean space")
        if all(c == 0.0 for c in cset.normal):
            raise IncompatibleSetError("half-space normal must be nonzero")
        if len(cset.normal) != space.dim:
            raise IncompatibleSetError("half-space normal has the wrong dimension")


def _subtree_connected(space: TreeSpace, vertices: frozenset[int]) -> bool:
    start = next(iter(vertices))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w, _ in space.adj[v]:
            if w in vertices and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == vertices


def _subtree_contains_point(space: TreeSpace, cset: Subtree, p: Point, tol: float) -> bool:
    eid, off = p.data
    u, v, length = space._ends(eid)
    if u in cset.vertices and v in cset.vertices:
        return True
    if u in cset.vertices and off <= tol:
        return True
    if v in cset.vertices and off >= length - tol:
        return True
    return False


def contains(space: Space, cset: ConvexSetDescriptor, p: Point, tol: float = 0.0) -> bool:
    """Membership within additive tolerance on the defining inequality."""
    _validate_set(space, cset)
    if isinstance(cset, WholeSpace):
        return True
    if isinstance(cset, Ball):
        return space.distance(cset.center, p) <= cset.radius + tol
    if isinstance(cset, Segment):
        dab = space.distance(cset.a, cset.b)
        return space.distance(cset.a, p) + space.distance(p, cset.b) <= dab + tol
    if isinstance(cset, Subtree):
        assert isinstance(space, TreeSpace)
        return _subtree_contains_point(space, cset, p, tol)
    if isinstance(cset, HalfSpace):
        dot = sum(n * c for n, c in zip(cset.normal, p.data))
        return dot >= cset.offset - tol
    raise IncompatibleSetError(f"unknown set {cset!r}")


def project_segment(
    space: Space,
    a: Point,
    b: Point,
    x: Point,
    lam_tol: float = DEFAULT_LAMBDA_TOL,
) -> tuple[float, Point, int]:
    """Minimize d(x, .)^2 over the geodesic segment [a, b].

    Euclidean and hyperboloid spaces get exact closed forms (clamped affine
    projection, clamped atanh of the Minkowski components).  Everywhere else
    the squared distance is convex along geodesics, so derivative-free ternary
    search applies.  Returns (lam, point, iterations) where lam weights
    endpoint ``a``; for the ternary path the bracket width at exit is below
    ``lam_tol`` (or the 200-iteration cap was hit).
    """
    if lam_tol <= 0.0:
        raise ValueError("lam_tol must be positive")

    if isinstance(space, EuclideanSpace):
        w = tuple(ai - bi for ai, bi in zip(a.data, b.data))
        ww = sum(wi * wi for wi in w)
        if ww == 0.0:
            return 1.0, a, 0
        lam = sum((xi - bi) * wi for xi, bi, wi in zip(x.data, b.data, w)) / ww
        lam = min(1.0, max(0.0, lam))
        return lam, space.geodesic_point(a, b, lam), 0

    if isinstance(space, HyperbolicSpace):
        d = space.distance(a, b)
        if d == 0.0:
            return 1.0, a, 0
        sd = math.sinh(d)
        cd = math.cosh(d)
        # unit tangent at b toward a; gamma(t) = cosh(t) b + sinh(t) v
        v = tuple((ai - cd * bi) / sd for ai, bi in zip(a.data, b.data))
        A = -minkowski(x.data, b.data)
        B = -minkowski(x.data, v)
        if abs(B) >= A:  # only at rounding extremes; fall back to the endpoints
            t = 0.0 if B > 0.0 else d
        else:
            t = min(d, max(0.0, math.atanh(-B / A)))
        lam = t / d
        return lam, space.geodesic_point(a, b, lam), 0

    def g(lam: float) -> float:
        d = space.distance(x, space.geodesic_point(a, b, lam))
        return d * d

    lo, hi = 0.0, 1.0
    it = 0
    while hi - lo > lam_tol and it < TERNARY_MAX_ITER:
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if g(m1) <= g(m2):
            hi = m2
        else:
            lo = m1
        it += 1
    lam = 0.5 * (lo + hi)
    return lam, space.geodesic_point(a, b, lam), it


def _project_subtree(space: TreeSpace, cset: Subtree, x: Point) -> Point:
    if _subtree_contains_point(space, cset, x, 0.0):
        return space.canonical(x)
    # from outside, the geodesic to any subtree point enters through the
    # nearest subtree vertex
    best_v = min(cset.vertices, key=lambda v: space.distance(x, space.vertex_point(v)))
    return space.vertex_point(best_v)


def project_point(
    space: Space, cset: ConvexSetDescriptor, x: Point, lam_tol: float = DEFAULT_LAMBDA_TOL
) -> tuple[Point, int]:
    """Nearest point of the set, without certification. Returns (u, iterations)."""
    _validate_set(space, cset)
    if isinstance(cset, WholeSpace):
        return x, 0
    if isinstance(cset, Ball):
        d = space.distance(cset.center, x)
        if d <= cset.radius:
            return x, 0
        return space.geodesic_point(cset.center, x, 1.0 - cset.radius / d), 0
    if isinstance(cset, Segment):
        if contains(space, cset, x, MEMBERSHIP_TOL):
            return x, 0
        _, u, it = project_segment(space, cset.a, cset.b, x, lam_tol)
        return u, it
    if isinstance(cset, Subtree):
        assert isinstance(space, TreeSpace)
        return _project_subtree(space, cset, x), 0
    if isinstance(cset, HalfSpace):
        dot = sum(n * c for n, c in zip(cset.normal, x.data))
        if dot >= cset.offset:
            return x, 0
        nn = sum(n * n for n in cset.normal)
        t = (cset.offset - dot) / nn
        return Point(space.descriptor, tuple(c + t * n for c, n in zip(x.data, cset.normal))), 0
    raise IncompatibleSetError(f"unknown set {cset!r}")


# ---------------------------------------------------------------------------
# certificate probes


def _set_scale(space: Space, cset: ConvexSetDescriptor, anchor: Point) -> float:
    if isinstance(cset, Ball):
        return max(cset.radius, 1.0)
    if isinstance(cset, Segment):
        return max(space.distance(cset.a, cset.b), 1.0)
    return 1.0


def probe_points(
    space: Space,
    cset: ConvexSetDescriptor,
    u: Point,
    count: int,
    seed: int = 0,
) -> list[Point]:
    """Probe sample of the set for certification.

    Mixes a deterministic parametrization grid (segment lambdas, ball boundary
    plus interior shells, subtree edge grids), seeded random members, and
    geodesic blends toward ``u`` so the sample is adversarially dense near the
    candidate projection.
    """
    if count <= 0:
        raise ValueError("probe count must be positive")
    _validate_set(space, cset)
    rng = stream(seed, 0xC0)
    pts: list[Point] = []

    if isinstance(cset, Segment):
        grid = max(2, count // 2)
        for i in range(grid):
            pts.append(space.geodesic_point(cset.a, cset.b, i / (grid - 1)))
        while len(pts) < count:
            pts.append(space.geodesic_point(cset.a, cset.b, float(rng.random())))
    elif isinstance(cset, Ball):
        n_boundary = count // 2
        for _ in range(n_boundary):
            w = sample_in_ball(space, cset.center, cset.radius, rng)
            d = space.distance(cset.center, w)
            if d > 0.0:
                pts.append(
                    space.geodesic_point(cset.center, w, max(0.0, 1.0 - cset.radius / d))
                )
            else:
                pts.append(w)
        shells = (0.25, 0.5, 0.75, 0.9)
        while len(pts) < count:
            w = sample_in_ball(space, cset.center, cset.radius, rng)
            d = space.distance(cset.center, w)
            r = cset.radius * shells[len(pts) % len(shells)]
            if d > 0.0:
                pts.append(space.geodesic_point(cset.center, w, max(0.0, 1.0 - r / d)))
            else:
                pts.append(w)
    elif isinstance(cset, Subtree):
        assert isinstance(space, TreeSpace)
        verts = sorted(cset.vertices)
        edges = [
            eid
            for eid, (a, b, _) in enumerate(space.topology.edges)
            if a in cset.vertices and b in cset.vertices
        ]
        for v in verts:
            pts.append(space.vertex_point(v))
        grid = max(1, (count - len(pts)) // max(1, len(edges)) if edges else 0)
        for eid in edges:
            length = space.topology.edges[eid][2]
            for i in range(1, grid + 1):
                pts.append(
                    space.canonical(
                        Point(space.descriptor, (eid, length * i / (grid + 1)))
                    )
                )
        while len(pts) < count and edges:
            eid = int(rng.integers(len(edges)))
            length = space.topology.edges[edges[eid]][2]
            pts.append(
                space.canonical(
                    Point(space.descriptor, (edges[eid], length * float(rng.random())))
                )
            )
        pts = pts[:count]
    elif isinstance(cset, HalfSpace):
        assert isinstance(space, EuclideanSpace)
        scale = 1.0 + abs(cset.offset) + math.sqrt(sum(c * c for c in u.data))
        while len(pts) < count:
            w = Point(
                space.descriptor,
                tuple(
                    c + scale * g
                    for c, g in zip(u.data, rng.standard_normal(space.dim))
                ),
            )
            pts.append(project_point(space, cset, w)[0])
    else:  # WholeSpace
        scale = 1.0
        while len(pts) < count:
            pts.append(sample_in_ball(space, u, 2.0 * scale, rng))

    # adversarial refinement: blend a slice of the probes toward u
    n_near = max(1, count // 8)
    blend = (0.9, 0.99, 0.999)
    for i in range(min(n_near, len(pts))):
        w = pts[-1 - i]
        lam = blend[i % len(blend)]
        pts.append(space.geodesic_point(u, w, lam))
    return pts[: count + n_near]


def characterization_residual(
    space: Space,
    cset: ConvexSetDescriptor,
    x: Point,
    u: Point,
    probes: Union[int, Sequence[Point]] = 1000,
    seed: int = 0,
) -> float:
    """min over probes y of <xu, uy>.

    Nonnegative (up to rounding) exactly when u is the metric projection of x
    onto the set; strictly negative for some probe when u is displaced far
    enough from the projection relative to probe density.
    """
    scale = 1.0 + space.distance(x, u) ** 2
    if not contains(space, cset, u, 1e-6 * _set_scale(space, cset, u) * scale):
        raise ValueError("candidate u is not a member of the set")
    if isinstance(probes, int):
        pts = probe_points(space, cset, u, probes, seed)
    else:
        pts = list(probes)
        if not pts:
            raise ValueError("need at least one probe point")
    return min(quasilinearization(space, x, u, u, y) for y in pts)


def project(
    space: Space,
    cset: ConvexSetDescriptor,
    x: Point,
    probes: int = 256,
    seed: int = 0,
    lam_tol: float = DEFAULT_LAMBDA_TOL,
) -> ProjectionResult:
    """Metric projection with a certificate.

    Pass ``probes=0`` to skip certification (the solvers do, for speed).
    """
    u, it = project_point(space, cset, x, lam_tol)
    cert = None
    if probes:
        cert = characterization_residual(space, cset, x, u, probes, seed)
    return ProjectionResult(u=u, certificate_residual=cert, iterations_used=it)
