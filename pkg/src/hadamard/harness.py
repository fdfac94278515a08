"""Randomized verification of the metric and geodesic inequalities.

Every inequality the solver analysis relies on is checked on seeded random
tuples: the metric axioms, the defining distance equalities of geodesic
interpolation, the Cauchy-Schwarz bound for the quasilinearization pairing,
its algebraic identities, and five interpolation inequalities (convexity of
distance and squared distance along geodesics and the pairing bounds they
imply).

Tolerances are relative: a check fails only when its slack drops below
``-eps * scale`` with scale = 1 + the sum of squared pairwise distances of
the tuple (the inequalities are homogeneous of degree two in distances).
Every report carries the worst witness observed, serialized so violations can
be replayed standalone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .geometry import cauchy_schwarz_gap, quasilinearization
from .sampling import SamplingRegion, default_region, random_point, stream
from .solvers import IterationTrace, PowerLaw
from .spaces import Basepoint, Point, Space


@dataclass
class PropertyReport:
    name: str
    trials: int
    violations: int
    worst_margin: float
    worst_witness: Optional[dict]
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


class _Collector:
    def __init__(self, name: str, eps: float):
        self.name = name
        self.eps = eps
        self.trials = 0
        self.violations = 0
        self.worst = math.inf
        self.witness = None

    def record(self, slack: float, scale: float, witness: dict) -> None:
        self.trials += 1
        if slack < self.worst:
            self.worst = slack
            self.witness = witness
        if slack < -self.eps * scale:
            self.violations += 1

    def report(self) -> PropertyReport:
        return PropertyReport(
            name=self.name,
            trials=self.trials,
            violations=self.violations,
            worst_margin=self.worst,
            worst_witness=self.witness,
            tolerance=self.eps,
        )


def _point_repr(p: Point):
    if isinstance(p.data, tuple) and p.data and isinstance(p.data[0], Point):
        return [_point_repr(p.data[0]), _point_repr(p.data[1])]
    if isinstance(p.data, tuple):
        return [x if isinstance(x, int) else float(x) for x in p.data]
    return p.data


def _witness(lam=None, **pts: Point) -> dict:
    w = {k: _point_repr(p) for k, p in pts.items()}
    if lam is not None:
        w["lam"] = lam
    return w


def _tuple_scale(space: Space, pts: list[Point]) -> float:
    s = 1.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = space.distance(pts[i], pts[j])
            s += d * d
    return s


def check_space_axioms(
    space: Space,
    trials: int,
    eps: float = 1e-8,
    seed: int = 0,
    region: Optional[SamplingRegion] = None,
) -> list[PropertyReport]:
    """Metric axioms, geodesic interpolation contract, Cauchy-Schwarz, and
    the quasilinearization pairing identities, on random tuples."""
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = stream(seed, 0xA)
    sampler = getattr(space, "inner", space)  # corrupted wrappers sample from the real space
    if region is None:
        region = default_region(sampler)
    names = [
        "metric_symmetry",
        "triangle_inequality",
        "geodesic_distance_to_start",
        "geodesic_distance_to_end",
        "cauchy_schwarz",
        "pairing_symmetry",
        "pairing_antisymmetry",
        "pairing_additivity",
    ]
    cols = {n: _Collector(n, eps) for n in names}
    # the pairing identities hold to rounding; checked at a tighter tolerance
    cols["pairing_symmetry"].eps = 1e-12

    for _ in range(trials):
        a, b, c, d, e = (random_point(sampler, region, rng) for _ in range(5))
        lam = float(rng.random())
        scale = _tuple_scale(space, [a, b, c, d])
        w = _witness(a=a, b=b, c=c, d=d)

        dab, dba = space.distance(a, b), space.distance(b, a)
        cols["metric_symmetry"].record(-abs(dab - dba), scale, w)
        dac, dbc = space.distance(a, c), space.distance(b, c)
        cols["triangle_inequality"].record(dab + dbc - dac, scale, w)

        z = space.geodesic_point(a, b, lam)
        tol_scale = 1.0 + dab
        wlam = _witness(lam=lam, a=a, b=b)
        cols["geodesic_distance_to_start"].record(
            -abs(space.distance(z, a) - (1.0 - lam) * dab), tol_scale, wlam
        )
        cols["geodesic_distance_to_end"].record(
            -abs(space.distance(z, b) - lam * dab), tol_scale, wlam
        )

        cols["cauchy_schwarz"].record(cauchy_schwarz_gap(space, a, b, c, d), scale, w)

        q_abcd = quasilinearization(space, a, b, c, d)
        cols["pairing_symmetry"].record(
            -abs(q_abcd - quasilinearization(space, c, d, a, b)), scale, w
        )
        cols["pairing_antisymmetry"].record(
            -abs(q_abcd + quasilinearization(space, b, a, c, d)), scale, w
        )
        w5 = _witness(a=a, b=b, c=c, d=d, x=e)
        scale5 = _tuple_scale(space, [a, b, c, d, e])
        cols["pairing_additivity"].record(
            -abs(
                quasilinearization(space, a, e, c, d)
                + quasilinearization(space, e, b, c, d)
                - q_abcd
            ),
            scale5,
            w5,
        )
    return [cols[n].report() for n in names]


def check_lemmas(
    space: Space,
    trials: int,
    eps: float = 1e-8,
    seed: int = 0,
    region: Optional[SamplingRegion] = None,
) -> list[PropertyReport]:
    """The five geodesic interpolation inequalities used by the solvers.

    * simultaneous interpolation is jointly nonexpansive;
    * distance to a point is convex along geodesics;
    * squared distance is strongly convex along geodesics, with modulus
      lam*(1-lam)*d(x,y)^2;
    * the pairing of an interpolation offset against any direction is bounded
      by lam times the full-chord pairing;
    * squared distance to an interpolated point is bounded by the squared
      endpoint terms plus twice the endpoint pairing cross term.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = stream(seed, 0xB)
    sampler = getattr(space, "inner", space)
    if region is None:
        region = default_region(sampler)
    names = [
        "joint_interpolation_nonexpansive",
        "distance_convex_along_geodesics",
        "squared_distance_strongly_convex",
        "interpolation_pairing_bound",
        "interpolation_cross_term_bound",
    ]
    cols = {n: _Collector(n, eps) for n in names}

    for _ in range(trials):
        p, q, r, s = (random_point(sampler, region, rng) for _ in range(4))
        lam = float(rng.random())
        scale = _tuple_scale(space, [p, q, r, s])
        w = _witness(lam=lam, p=p, q=q, r=r, s=s)

        z1 = space.geodesic_point(p, q, lam)
        z2 = space.geodesic_point(r, s, lam)
        cols["joint_interpolation_nonexpansive"].record(
            lam * space.distance(p, r)
            + (1.0 - lam) * space.distance(q, s)
            - space.distance(z1, z2),
            scale,
            w,
        )

        x, y, zp, wp = p, q, r, s
        mid = z1  # lam*x (+) (1-lam)*y
        dxz, dyz = space.distance(x, zp), space.distance(y, zp)
        dmid = space.distance(mid, zp)
        cols["distance_convex_along_geodesics"].record(
            lam * dxz + (1.0 - lam) * dyz - dmid, scale, w
        )
        dxy = space.distance(x, y)
        cols["squared_distance_strongly_convex"].record(
            lam * dxz * dxz
            + (1.0 - lam) * dyz * dyz
            - lam * (1.0 - lam) * dxy * dxy
            - dmid * dmid,
            scale,
            w,
        )
        cols["interpolation_pairing_bound"].record(
            lam * quasilinearization(space, x, y, mid, wp)
            - quasilinearization(space, mid, y, mid, wp),
            scale,
            w,
        )
        cols["interpolation_cross_term_bound"].record(
            lam * lam * dxz * dxz
            + (1.0 - lam) * (1.0 - lam) * dyz * dyz
            + 2.0 * lam * (1.0 - lam) * quasilinearization(space, x, zp, y, zp)
            - dmid * dmid,
            scale,
            w,
        )
    return [cols[n].report() for n in names]


def replay_witness(space: Space, report: PropertyReport) -> Optional[float]:
    """Worst-witness slack for reports whose witness is a plain point tuple.

    Returns None when the witness cannot be replayed generically.
    """
    # Witnesses store raw payloads; rebuilding Points suffices for flat spaces.
    from .spaces import Product

    if report.worst_witness is None or isinstance(space.descriptor, Product):
        return None

    def to_point(payload):
        return Point(space.descriptor, tuple(payload))

    w = report.worst_witness
    if report.name == "cauchy_schwarz" and all(k in w for k in "abcd"):
        return cauchy_schwarz_gap(
            space, to_point(w["a"]), to_point(w["b"]), to_point(w["c"]), to_point(w["d"])
        )
    if report.name == "triangle_inequality" and all(k in w for k in "abc"):
        a, b, c = (to_point(w[k]) for k in "abc")
        return space.distance(a, b) + space.distance(b, c) - space.distance(a, c)
    return None


# ---------------------------------------------------------------------------
# scalar recursion demonstrator


@dataclass
class RecursionResult:
    final: float
    checkpoints: list[tuple[int, float]]
    hypotheses: dict[str, bool]
    verdict: str  # "consistent" | "inconsistent"


def liu_recursion(
    a0: float,
    gamma: PowerLaw,
    delta: PowerLaw,
    sigma: PowerLaw,
    steps: int,
    threshold: float = 1e-2,
) -> RecursionResult:
    """Simulate a_{n+1} = (1 - g_n) a_n + g_n d_n + s_n with equality (the
    worst case the recursion lemma allows) for ``steps`` steps.

    Hypotheses of the lemma are decided analytically for the power-law
    specifications; the verdict compares the final value against the declared
    threshold.  This is a numeric demonstrator, not a proof.
    """
    if a0 < 0.0:
        raise ValueError("a0 must be nonnegative")
    g0 = gamma.value(0)
    if not (0.0 < g0 < 1.0) or gamma.scale <= 0.0:
        raise ValueError("gamma values must lie in (0, 1)")
    if sigma.scale < 0.0:
        raise ValueError("sigma values must be nonnegative")

    hypotheses = {
        # g_n -> 0 with divergent sum
        "gamma_vanishes_divergent": gamma.power > 0.0 and gamma.power <= 1.0,
        # limsup d_n <= 0 (power laws tend to 0; negative scale is below 0)
        "delta_limsup_nonpositive": delta.scale <= 0.0 or delta.power > 0.0,
        # summable s_n
        "sigma_summable": sigma.scale == 0.0 or sigma.power > 1.0,
    }

    a = a0
    checkpoints = [(0, a)]
    mark = max(1, steps // 10)
    for n in range(steps):
        g = gamma.value(n)
        a = (1.0 - g) * a + g * delta.value(n) + sigma.value(n)
        if (n + 1) % mark == 0:
            checkpoints.append((n + 1, a))
    verdict = "consistent" if a <= threshold else "inconsistent"
    return RecursionResult(final=a, checkpoints=checkpoints, hypotheses=hypotheses, verdict=verdict)


# ---------------------------------------------------------------------------
# trace diagnostics


@dataclass
class TraceDiagnostics:
    rows_considered: int
    max_fixed_residual: float
    max_z_residual: Optional[float]
    max_qx_inner: float
    qx_scale: float

    def within(
        self,
        fixed_tol: float,
        z_tol: Optional[float] = None,
        qx_tol: Optional[float] = None,
    ) -> bool:
        if self.max_fixed_residual > fixed_tol:
            return False
        if z_tol is not None and self.max_z_residual is not None and self.max_z_residual > z_tol:
            return False
        if qx_tol is not None and self.max_qx_inner > qx_tol * self.qx_scale:
            return False
        return True


def trace_diagnostics(
    space: Space,
    trace: IterationTrace,
    q: Point,
    base: Basepoint,
    tail_fraction: float = 0.1,
) -> TraceDiagnostics:
    """Tail statistics of a solver trace against a candidate limit q.

    Over the trailing ``tail_fraction`` of rows: the largest fixed-point
    residual, the largest set-projection residual, and the largest pairing
    <q->base, q->x_n> (nonpositive in the limit when q is the fixed point
    nearest the base point).
    """
    if not trace.rows:
        raise ValueError("trace is empty")
    if not (0.0 < tail_fraction <= 1.0):
        raise ValueError("tail fraction must lie in (0, 1]")
    k = max(1, int(math.ceil(len(trace.rows) * tail_fraction)))
    rows = trace.rows[-k:]
    points = trace.points[-k:]
    max_fixed = max(r.fixed_residual for r in rows)
    zs = [r.z_residual for r in rows if r.z_residual is not None]
    max_z = max(zs) if zs else None
    max_qx = -math.inf
    scale = 1.0
    for p in points:
        v = quasilinearization(space, q, base.o, q, p)
        if v > max_qx:
            max_qx = v
        s = 1.0 + space.distance(q, base.o) ** 2 + space.distance(q, p) ** 2
        scale = max(scale, s)
    return TraceDiagnostics(
        rows_considered=k,
        max_fixed_residual=max_fixed,
        max_z_residual=max_z,
        max_qx_inner=max_qx,
        qx_scale=scale,
    )


# ---------------------------------------------------------------------------
# negative control


class CorruptedSpace(Space):
    """Deliberately broken metric (d^1.5 of a real space): violates the
    triangle inequality and Cauchy-Schwarz, so the harness must flag it."""

    def __init__(self, inner: Space):
        self.inner = inner
        self.descriptor = inner.descriptor

    def distance(self, a: Point, b: Point) -> float:
        return self.inner.distance(a, b) ** 1.5

    def geodesic_point(self, x: Point, y: Point, lam: float) -> Point:
        return self.inner.geodesic_point(x, y, lam)

    def point_violations(self, p: Point) -> list[str]:
        return self.inner.point_violations(p)
