"""Quasilinearization form and derived scalar quantities.

The quasilinearization pairing assigns to two ordered point pairs the value

    <ab, cd> = (d(a,d)^2 + d(b,c)^2 - d(a,c)^2 - d(b,d)^2) / 2,

which behaves like an inner product of the displacement "vectors" ab and cd.
In a CAT(0) space it obeys the Cauchy-Schwarz bound <ab, cd> <= d(a,b)d(c,d);
the signed gap of that bound is exposed here so the property harness can test
it directly.
"""

from __future__ import annotations

from .spaces import Basepoint, Point, Space


def quasilinearization(space: Space, a: Point, b: Point, c: Point, d: Point) -> float:
    dad = space.distance(a, d)
    dbc = space.distance(b, c)
    dac = space.distance(a, c)
    dbd = space.distance(b, d)
    return 0.5 * (dad * dad + dbc * dbc - dac * dac - dbd * dbd)


def cauchy_schwarz_gap(space: Space, a: Point, b: Point, c: Point, d: Point) -> float:
    """d(a,b)*d(c,d) - <ab, cd>; nonnegative (up to rounding) in CAT(0)."""
    return space.distance(a, b) * space.distance(c, d) - quasilinearization(
        space, a, b, c, d
    )


def norm(space: Space, x: Point, base: Basepoint) -> float:
    """Distance to the configured base point."""
    return space.distance(x, base.o)
