"""Hadamard (complete CAT(0)) model spaces.

Four concrete model families are provided: Euclidean space, real hyperbolic
space in the hyperboloid model, metric trees with positive edge lengths, and
binary products of the above.  A space handle built by :func:`make_space`
exposes the two primitive operations everything else is built from: the
metric ``distance`` and geodesic interpolation ``geodesic_point``.

Points are immutable values tagged with their space descriptor.  All
operations return fresh values and keep no hidden state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union


class SpaceMismatchError(ValueError):
    """Raised when points from different spaces are combined."""


class InvalidSpaceError(ValueError):
    """Raised when a space descriptor violates its invariants."""


# Nesting cap for product spaces (documented implementation limit).
MAX_PRODUCT_DEPTH = 4

# Tolerance on the hyperboloid constraint <x,x>_M = -1.
HYPERBOLOID_TOL = 1e-9


# ---------------------------------------------------------------------------
# descriptors


@dataclass(frozen=True)
class Euclidean:
    dim: int


@dataclass(frozen=True)
class Hyperbolic:
    dim: int


@dataclass(frozen=True)
class TreeTopology:
    """A finite tree: ``vertex_count`` vertices, ``vertex_count - 1`` weighted
    edges given as (u, v, length) with all lengths > 0."""

    vertex_count: int
    edges: tuple[tuple[int, int, float], ...]


@dataclass(frozen=True)
class WeightedTree:
    topology: TreeTopology


@dataclass(frozen=True)
class Product:
    left: "SpaceDescriptor"
    right: "SpaceDescriptor"


SpaceDescriptor = Union[Euclidean, Hyperbolic, WeightedTree, Product]


@dataclass(frozen=True, slots=True)
class Point:
    """A space-tagged element.

    ``data`` is a tuple of coordinates for Euclidean points, a tuple of
    ``dim + 1`` hyperboloid coordinates for hyperbolic points, an
    ``(edge_id, offset)`` pair for tree points (offset measured from the
    edge's first endpoint, in arc length), and a ``(Point, Point)`` pair for
    product points.
    """

    space: SpaceDescriptor
    data: tuple


@dataclass(frozen=True)
class Basepoint:
    """The distinguished reference element used to define norms."""

    o: Point


def product_depth(desc: SpaceDescriptor) -> int:
    if isinstance(desc, Product):
        return 1 + max(product_depth(desc.left), product_depth(desc.right))
    return 0


# ---------------------------------------------------------------------------
# space handles


class Space:
    """Validated handle for one model space."""

    descriptor: SpaceDescriptor

    def distance(self, a: Point, b: Point) -> float:
        raise NotImplementedError

    def geodesic_point(self, x: Point, y: Point, lam: float) -> Point:
        """The point ``z`` on the geodesic from ``x`` to ``y`` with
        ``d(z, x) = (1 - lam) * d(x, y)`` (weight ``lam`` on ``x``)."""
        raise NotImplementedError

    def point_violations(self, p: Point) -> list[str]:
        raise NotImplementedError

    # -- shared plumbing

    def _check(self, *pts: Point) -> None:
        for p in pts:
            if p.space is not self.descriptor and p.space != self.descriptor:
                raise SpaceMismatchError(
                    f"point tagged {p.space!r} used in space {self.descriptor!r}"
                )

    def _check_lambda(self, lam: float) -> None:
        if not (0.0 <= lam <= 1.0):
            raise ValueError(f"interpolation weight {lam} outside [0, 1]")

    def point(self, data) -> Point:
        return Point(self.descriptor, data)


class EuclideanSpace(Space):
    def __init__(self, desc: Euclidean):
        if desc.dim < 1:
            raise InvalidSpaceError("Euclidean dimension must be >= 1")
        self.descriptor = desc
        self.dim = desc.dim

    def distance(self, a: Point, b: Point) -> float:
        self._check(a, b)
        return math.dist(a.data, b.data)

    def geodesic_point(self, x: Point, y: Point, lam: float) -> Point:
        self._check(x, y)
        self._check_lambda(lam)
        xd, yd = x.data, y.data
        mu = 1.0 - lam
        return Point(self.descriptor, tuple(lam * a + mu * b for a, b in zip(xd, yd)))

    def point_violations(self, p: Point) -> list[str]:
        out = []
        if len(p.data) != self.dim:
            out.append(f"expected {self.dim} coordinates, got {len(p.data)}")
            return out
        if not all(math.isfinite(c) for c in p.data):
            out.append("non-finite coordinate")
        return out


def minkowski(a, b) -> float:
    """Minkowski bilinear form -a0*b0 + sum_i>=1 ai*bi."""
    s = -a[0] * b[0]
    for i in range(1, len(a)):
        s += a[i] * b[i]
    return s


class HyperbolicSpace(Space):
    """Hyperboloid model of curvature -1: the sheet <x,x>_M = -1, x0 > 0."""

    def __init__(self, desc: Hyperbolic):
        if desc.dim < 1:
            raise InvalidSpaceError("hyperbolic dimension must be >= 1")
        self.descriptor = desc
        self.dim = desc.dim
        self.base = Point(desc, (1.0,) + (0.0,) * desc.dim)

    def distance(self, a: Point, b: Point) -> float:
        self._check(a, b)
        # acosh(-<a,b>_M) evaluated in the cancellation-free form
        # 2*asinh(sqrt(<a-b, a-b>_M)/2); the Minkowski product is clamped so
        # the argument never leaves the domain under rounding.
        ad, bd = a.data, b.data
        m = -((ad[0] - bd[0]) ** 2)
        for i in range(1, len(ad)):
            m += (ad[i] - bd[i]) ** 2
        if m <= 0.0:
            return 0.0
        return 2.0 * math.asinh(0.5 * math.sqrt(m))

    def _renormalize(self, coords) -> Point:
        s = -minkowski(coords, coords)
        if s <= 0.0:
            raise ValueError("interpolated point left the hyperboloid")
        r = 1.0 / math.sqrt(s)
        out = tuple(c * r for c in coords)
        if out[0] < 0.0:
            out = tuple(-c for c in out)
        return Point(self.descriptor, out)

    def geodesic_point(self, x: Point, y: Point, lam: float) -> Point:
        self._check(x, y)
        self._check_lambda(lam)
        d = self.distance(x, y)
        xd, yd = x.data, y.data
        if d < 1e-7:
            # chord interpolation then renormalization; exact to O(d^3)
            mu = 1.0 - lam
            return self._renormalize(tuple(lam * a + mu * b for a, b in zip(xd, yd)))
        sd = math.sinh(d)
        wx = math.sinh(lam * d) / sd
        wy = math.sinh((1.0 - lam) * d) / sd
        return self._renormalize(tuple(wx * a + wy * b for a, b in zip(xd, yd)))

    def point_violations(self, p: Point) -> list[str]:
        out = []
        if len(p.data) != self.dim + 1:
            out.append(f"expected {self.dim + 1} coordinates, got {len(p.data)}")
            return out
        if not all(math.isfinite(c) for c in p.data):
            out.append("non-finite coordinate")
            return out
        resid = minkowski(p.data, p.data) + 1.0
        if abs(resid) > HYPERBOLOID_TOL:
            out.append(f"hyperboloid constraint residual {resid:.3e}")
        if p.data[0] <= 0.0:
            out.append("first coordinate must be positive (upper sheet)")
        return out


class TreeSpace(Space):
    """Metric tree; points live on edges as (edge_id, offset) pairs."""

    def __init__(self, desc: WeightedTree):
        topo = desc.topology
        n = topo.vertex_count
        if len(topo.edges) != n - 1:
            raise InvalidSpaceError(
                f"a tree on {n} vertices needs {n - 1} edges, got {len(topo.edges)}"
            )
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for eid, (u, v, length) in enumerate(topo.edges):
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise InvalidSpaceError(f"bad edge endpoints ({u}, {v})")
            if not (length > 0.0 and math.isfinite(length)):
                raise InvalidSpaceError(f"edge length must be positive, got {length}")
            adj[u].append((v, eid))
            adj[v].append((u, eid))

        # BFS from vertex 0: connectivity check plus parent tables for paths.
        parent = [-1] * n
        parent_edge = [-1] * n
        depth = [0] * n
        order = [0]
        seen = [False] * n
        seen[0] = True
        for v in order:
            for w, eid in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    parent[w] = v
                    parent_edge[w] = eid
                    depth[w] = depth[v] + 1
                    order.append(w)
        if not all(seen):
            raise InvalidSpaceError("tree topology is disconnected or cyclic")

        # all-pairs vertex distances (vertex counts are small by construction)
        dist = [[0.0] * n for _ in range(n)]
        for root in range(n):
            row = dist[root]
            stack = [root]
            done = [False] * n
            done[root] = True
            while stack:
                v = stack.pop()
                for w, eid in adj[v]:
                    if not done[w]:
                        done[w] = True
                        row[w] = row[v] + topo.edges[eid][2]
                        stack.append(w)

        self.descriptor = desc
        self.topology = topo
        self.n = n
        self.adj = adj
        self.parent = parent
        self.parent_edge = parent_edge
        self.depth = depth
        self.vdist = dist
        self.incident = [sorted(eid for _, eid in adj[v]) for v in range(n)]
        self.total_length = sum(e[2] for e in topo.edges)

    # -- representation helpers

    def _ends(self, eid: int) -> tuple[int, int, float]:
        u, v, length = self.topology.edges[eid]
        return u, v, length

    def vertex_point(self, v: int) -> Point:
        """Canonical representation of a vertex: offset 0 or full length on
        its lowest-indexed incident edge."""
        eid = self.incident[v][0]
        u, w, length = self._ends(eid)
        return Point(self.descriptor, (eid, 0.0 if v == u else length))

    def canonical(self, p: Point) -> Point:
        self._check(p)
        eid, off = p.data
        u, v, length = self._ends(eid)
        if off == 0.0:
            return self.vertex_point(u)
        if off == length:
            return self.vertex_point(v)
        return p

    def point_violations(self, p: Point) -> list[str]:
        out = []
        if len(p.data) != 2:
            return ["tree point must be (edge_id, offset)"]
        eid, off = p.data
        if not (isinstance(eid, int) and 0 <= eid < len(self.topology.edges)):
            return [f"edge id {eid} out of range"]
        length = self.topology.edges[eid][2]
        if not (isinstance(off, (int, float)) and math.isfinite(off)):
            out.append("offset must be a finite number")
        elif not (0.0 <= off <= length):
            out.append(f"offset {off} outside [0, {length}]")
        return out

    # -- metric

    def distance(self, a: Point, b: Point) -> float:
        self._check(a, b)
        ea, ta = a.data
        eb, tb = b.data
        if ea == eb:
            return abs(ta - tb)
        ua, va, la = self._ends(ea)
        ub, vb, lb = self._ends(eb)
        best = math.inf
        for va_, off_a in ((ua, ta), (va, la - ta)):
            for vb_, off_b in ((ub, tb), (vb, lb - tb)):
                c = off_a + self.vdist[va_][vb_] + off_b
                if c < best:
                    best = c
        return best

    def _vertex_path(self, a: int, b: int) -> list[int]:
        """Vertices on the unique a-b path, inclusive."""
        left, right = [a], [b]
        x, y = a, b
        while x != y:
            if self.depth[x] >= self.depth[y]:
                x = self.parent[x]
                left.append(x)
            else:
                y = self.parent[y]
                right.append(y)
        right.pop()
        return left + right[::-1]

    def _edge_between(self, a: int, b: int) -> int:
        for w, eid in self.adj[a]:
            if w == b:
                return eid
        raise AssertionError("consecutive path vertices must share an edge")

    def _segments(self, p: Point, q: Point) -> list[tuple[int, float, float]]:
        """The geodesic from p to q as (edge_id, start_offset, end_offset)
        pieces; degenerate pieces are dropped."""
        ep, tp = p.data
        eq, tq = q.data
        if ep == eq:
            return [(ep, tp, tq)] if tp != tq else []
        up, vp, lp = self._ends(ep)
        uq, vq, lq = self._ends(eq)
        best = None
        for va_, off_a in ((up, tp), (vp, lp - tp)):
            for vb_, off_b in ((uq, tq), (vq, lq - tq)):
                c = off_a + self.vdist[va_][vb_] + off_b
                if best is None or c < best[0]:
                    best = (c, va_, vb_)
        _, a, b = best
        segs: list[tuple[int, float, float]] = []
        a_off = 0.0 if a == up else lp
        if tp != a_off:
            segs.append((ep, tp, a_off))
        path = self._vertex_path(a, b)
        for v1, v2 in zip(path, path[1:]):
            eid = self._edge_between(v1, v2)
            u, _, length = self._ends(eid)
            if v1 == u:
                segs.append((eid, 0.0, length))
            else:
                segs.append((eid, length, 0.0))
        b_off = 0.0 if b == uq else lq
        if tq != b_off:
            segs.append((eq, b_off, tq))
        return segs

    def geodesic_point(self, x: Point, y: Point, lam: float) -> Point:
        self._check(x, y)
        self._check_lambda(lam)
        segs = self._segments(x, y)
        total = sum(abs(e - s) for _, s, e in segs)
        target = (1.0 - lam) * total
        if total == 0.0 or target <= 0.0:
            return self.canonical(x)
        acc = 0.0
        for eid, s, e in segs:
            seg_len = abs(e - s)
            if acc + seg_len >= target:
                frac = (target - acc) / seg_len
                off = s + (e - s) * frac
                return self.canonical(Point(self.descriptor, (eid, off)))
            acc += seg_len
        return self.canonical(y)


class ProductSpace(Space):
    """l2 product of two Hadamard spaces."""

    def __init__(self, desc: Product):
        if product_depth(desc) > MAX_PRODUCT_DEPTH:
            raise InvalidSpaceError(
                f"product nesting deeper than {MAX_PRODUCT_DEPTH} is not supported"
            )
        self.descriptor = desc
        self.left = make_space(desc.left)
        self.right = make_space(desc.right)

    def pair(self, a: Point, b: Point) -> Point:
        return Point(self.descriptor, (a, b))

    def distance(self, a: Point, b: Point) -> float:
        self._check(a, b)
        dl = self.left.distance(a.data[0], b.data[0])
        dr = self.right.distance(a.data[1], b.data[1])
        return math.hypot(dl, dr)

    def geodesic_point(self, x: Point, y: Point, lam: float) -> Point:
        self._check(x, y)
        self._check_lambda(lam)
        return Point(
            self.descriptor,
            (
                self.left.geodesic_point(x.data[0], y.data[0], lam),
                self.right.geodesic_point(x.data[1], y.data[1], lam),
            ),
        )

    def point_violations(self, p: Point) -> list[str]:
        if len(p.data) != 2 or not all(isinstance(c, Point) for c in p.data):
            return ["product point must be a (Point, Point) pair"]
        out = []
        lpt, rpt = p.data
        if lpt.space != self.descriptor.left:
            out.append("left component carries the wrong space tag")
        else:
            out.extend("left: " + v for v in self.left.point_violations(lpt))
        if rpt.space != self.descriptor.right:
            out.append("right component carries the wrong space tag")
        else:
            out.extend("right: " + v for v in self.right.point_violations(rpt))
        return out


@lru_cache(maxsize=None)
def make_space(desc: SpaceDescriptor) -> Space:
    """Build (and cache) the validated handle for a space descriptor."""
    if isinstance(desc, Euclidean):
        return EuclideanSpace(desc)
    if isinstance(desc, Hyperbolic):
        return HyperbolicSpace(desc)
    if isinstance(desc, WeightedTree):
        return TreeSpace(desc)
    if isinstance(desc, Product):
        return ProductSpace(desc)
    raise InvalidSpaceError(f"unknown space descriptor {desc!r}")


def validate_point(space: Space, p: Point):
    """Return None if ``p`` is a valid point of ``space``, else a description
    of the violated invariant."""
    if p.space != space.descriptor:
        return f"point tagged {p.space!r}, space is {space.descriptor!r}"
    violations = space.point_violations(p)
    return None if not violations else "; ".join(violations)


def euclidean_point(space: Space, *coords: float) -> Point:
    return Point(space.descriptor, tuple(float(c) for c in coords))


def hyperboloid_point(space: Space, *coords: float) -> Point:
    return Point(space.descriptor, tuple(float(c) for c in coords))


def tree_point(space: TreeSpace, edge: int, offset: float) -> Point:
    p = Point(space.descriptor, (edge, float(offset)))
    violations = space.point_violations(p)
    if violations:
        raise ValueError("; ".join(violations))
    return space.canonical(p)
