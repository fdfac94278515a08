"""Perturbed fixed-point iterations for nonexpansive mappings.

Two algorithms are implemented, both driven by a vanishing anchor weight and
a perturbation sequence whose distance to the base point follows a prescribed
decay law:

* the *implicit* scheme solves, at every outer step, the fixed-point equation
  ``x = P_C(anchor_weight * u (+) (1 - anchor_weight) * T x)`` by Picard
  iteration (the right-hand side is a contraction with factor
  ``1 - anchor_weight``);
* the *explicit* scheme interleaves the same anchored step with geodesic
  averaging against the previous iterate.

Both converge, under the validated schedule conditions, to the fixed point of
T nearest the base point; ``nearest_fixed_point_residual`` certifies that
limit against a probe sample of the known fixed-point set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .convex import (
    ConvexSetDescriptor,
    contains,
    probe_points,
    project_point,
)
from .geometry import quasilinearization
from .mappings import MappingDescriptor, compile_mapping
from .sampling import SamplingRegion, default_region, random_point, stream
from .spaces import Basepoint, Point, Space

STREAM_PERTURBATION = 1
STREAM_PROBES = 2


class ScheduleError(ValueError):
    pass


class InnerBudgetError(RuntimeError):
    """Inner contraction loop ran out of iterations; carries the best iterate."""

    def __init__(self, best: Point, iterations: int, gap: float):
        super().__init__(
            f"inner loop exhausted after {iterations} iterations (error bound {gap:.3e})"
        )
        self.best = best
        self.iterations = iterations
        self.gap = gap


@dataclass(frozen=True)
class PowerLaw:
    """value(n) = scale * (n + shift) ** (-power)."""

    scale: float
    power: float
    shift: float = 1.0

    def value(self, n: int) -> float:
        return self.scale * (n + self.shift) ** (-self.power)


@dataclass(frozen=True)
class Schedule:
    """Iteration schedules: anchor weight law, constant averaging weight
    (explicit scheme only), and perturbation norm law."""

    anchor: PowerLaw
    perturbation: PowerLaw
    mixing: Optional[Union[float, PowerLaw]] = None

    def anchor_at(self, n: int) -> float:
        return self.anchor.value(n)

    def mixing_at(self, n: int) -> float:
        if isinstance(self.mixing, PowerLaw):
            return self.mixing.value(n)
        if self.mixing is None:
            raise ScheduleError("schedule has no averaging weight")
        return self.mixing

    def perturbation_at(self, n: int) -> float:
        return self.perturbation.value(n)


def default_implicit_schedule() -> Schedule:
    return Schedule(
        anchor=PowerLaw(1.0, 1.0, 1.0), perturbation=PowerLaw(1.0, 2.0, 1.0)
    )


def default_explicit_schedule() -> Schedule:
    return Schedule(
        anchor=PowerLaw(1.0, 0.7, 2.0),
        perturbation=PowerLaw(1.0, 1.0, 2.0),
        mixing=0.5,
    )


@dataclass(frozen=True)
class ConditionReport:
    passed: bool
    method: str  # "analytic" or "heuristic"
    detail: str


@dataclass(frozen=True)
class ScheduleReport:
    condition_i: ConditionReport
    condition_ii: ConditionReport
    condition_iii: ConditionReport

    @property
    def all_passed(self) -> bool:
        return (
            self.condition_i.passed
            and self.condition_ii.passed
            and self.condition_iii.passed
        )


def _check_range(law: PowerLaw, name: str) -> None:
    if law.scale < 0.0 or law.power < 0.0 or law.shift <= 0.0:
        raise ScheduleError(f"{name} law must have scale >= 0, power >= 0, shift > 0")


def validate_schedules(schedule: Schedule, horizon: int = 1000) -> ScheduleReport:
    """Check the explicit scheme's convergence conditions.

    (i) the anchor weight vanishes but is not summable; (ii) the averaging
    weight stays bounded away from 0 and 1; (iii) the anchored perturbation
    series is summable.  Power laws are decided analytically; the horizon is
    used only for range checks of the first iterates.
    """
    if horizon < 1000:
        raise ScheduleError("horizon must be at least 1000")
    _check_range(schedule.anchor, "anchor")
    _check_range(schedule.perturbation, "perturbation")

    a = schedule.anchor
    first = a.value(0)
    in_range = 0.0 < first < 1.0
    vanishes = a.power > 0.0 and a.scale > 0.0
    divergent = a.power <= 1.0
    cond_i = ConditionReport(
        passed=in_range and vanishes and divergent,
        method="analytic",
        detail=(
            f"anchor(n) = {a.scale}*(n+{a.shift})^-{a.power}: "
            f"first value {first:.6g}, "
            f"{'vanishes' if vanishes else 'does not vanish'}, "
            f"sum {'diverges' if divergent else 'converges (p-series)'}"
        ),
    )

    m = schedule.mixing
    if m is None:
        cond_ii = ConditionReport(False, "analytic", "no averaging weight configured")
    elif isinstance(m, PowerLaw):
        if m.power == 0.0:
            cond_ii = ConditionReport(
                0.0 < m.scale < 1.0,
                "analytic",
                f"constant averaging weight {m.scale:.6g}",
            )
        else:
            cond_ii = ConditionReport(
                False, "analytic", "decaying averaging weight has liminf 0"
            )
    else:
        cond_ii = ConditionReport(
            0.0 < m < 1.0, "analytic", f"constant averaging weight {m:.6g}"
        )

    p_sum = schedule.anchor.power + schedule.perturbation.power
    summable = schedule.perturbation.scale == 0.0 or p_sum > 1.0
    cond_iii = ConditionReport(
        passed=summable,
        method="analytic",
        detail=(
            f"sum anchor(n)*perturbation(n) ~ n^-{p_sum:.3g}: "
            + ("converges" if summable else "diverges")
        ),
    )
    return ScheduleReport(cond_i, cond_ii, cond_iii)


# ---------------------------------------------------------------------------
# traces


@dataclass
class TraceRow:
    n: int
    fixed_residual: float
    step: Optional[float] = None
    z_residual: Optional[float] = None
    ref_distance: Optional[float] = None
    qx_inner: Optional[float] = None


@dataclass
class IterationTrace:
    rows: list[TraceRow] = field(default_factory=list)
    points: list[Point] = field(default_factory=list)
    status: str = "budget"  # "converged" | "budget"

    @property
    def final(self) -> Point:
        return self.points[-1]

    @property
    def final_fixed_residual(self) -> float:
        return self.rows[-1].fixed_residual


def _perturbation_point(
    space: Space,
    base: Basepoint,
    region: SamplingRegion,
    rng,
    target_norm: float,
) -> Point:
    """A point at distance min(target_norm, reachable) from the base point, in
    a random direction drawn from the sampling region."""
    if target_norm <= 0.0:
        return base.o
    for _ in range(8):
        w = random_point(space, region, rng)
        d = space.distance(base.o, w)
        if d > 0.0:
            lam = 1.0 - min(1.0, target_norm / d)
            return space.geodesic_point(base.o, w, lam)
    return base.o


def implicit_step(
    space: Space,
    cset: ConvexSetDescriptor,
    mapping: Callable[[Point], Point],
    anchor_weight: float,
    u: Point,
    x_start: Point,
    inner_tol: float = 1e-10,
    max_inner: int = 10**6,
) -> tuple[Point, int]:
    """Solve x = P_C(anchor_weight*u (+) (1-anchor_weight)*Tx) by Picard
    iteration.

    The update map is a contraction with factor (1 - anchor_weight), so the
    a-posteriori bound d(x_k, x*) <= d(x_{k+1}, x_k)*(1-a)/a is available;
    the loop exits once that bound drops below ``inner_tol``.
    """
    if not (0.0 < anchor_weight < 1.0):
        raise ValueError("anchor weight must lie strictly between 0 and 1")
    factor = (1.0 - anchor_weight) / anchor_weight
    x = x_start
    for it in range(1, max_inner + 1):
        nxt = project_point(space, cset, space.geodesic_point(u, mapping(x), anchor_weight))[0]
        gap = space.distance(nxt, x) * factor
        x = nxt
        if gap <= inner_tol:
            return x, it
    raise InnerBudgetError(best=x, iterations=max_inner, gap=gap)


def run_implicit(
    space: Space,
    cset: ConvexSetDescriptor,
    mapping: MappingDescriptor,
    schedule: Schedule,
    base: Basepoint,
    budget: int,
    outer_tol: float = 0.0,
    seed: int = 0,
    region: Optional[SamplingRegion] = None,
    inner_tol: float = 1e-10,
    max_inner: int = 10**6,
    reference: Optional[Point] = None,
) -> IterationTrace:
    """Outer loop of the implicit scheme, steps m = 1..budget, warm-started.

    Rejects schedules whose anchor weight or perturbation norm does not
    vanish.  Stops early once the fixed-point residual d(x, Tx) falls to
    ``outer_tol``.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    _check_range(schedule.anchor, "anchor")
    _check_range(schedule.perturbation, "perturbation")
    if not (schedule.anchor.power > 0.0 and schedule.anchor.scale > 0.0):
        raise ScheduleError("implicit scheme needs a vanishing anchor weight")
    if schedule.perturbation.scale > 0.0 and schedule.perturbation.power <= 0.0:
        raise ScheduleError("perturbation norms must vanish")

    T = compile_mapping(space, mapping)
    rng = stream(seed, STREAM_PERTURBATION)
    if region is None:
        region = default_region(space)

    trace = IterationTrace()
    x = project_point(space, cset, base.o)[0]
    prev = x
    for m in range(1, budget + 1):
        a = schedule.anchor_at(m)
        if not (0.0 < a < 1.0):
            raise ScheduleError(f"anchor weight {a} at step {m} outside (0, 1)")
        u = _perturbation_point(space, base, region, rng, schedule.perturbation_at(m))
        x, _ = implicit_step(space, cset, T, a, u, x, inner_tol, max_inner)
        residual = space.distance(x, T(x))
        row = TraceRow(n=m, fixed_residual=residual, step=space.distance(x, prev))
        if reference is not None:
            row.ref_distance = space.distance(x, reference)
            row.qx_inner = quasilinearization(space, reference, base.o, reference, x)
        trace.rows.append(row)
        trace.points.append(x)
        prev = x
        if residual <= outer_tol:
            trace.status = "converged"
            break
    return trace


def run_explicit(
    space: Space,
    cset: ConvexSetDescriptor,
    mapping: MappingDescriptor,
    schedule: Schedule,
    base: Basepoint,
    x0: Point,
    budget: int,
    outer_tol: float = 0.0,
    seed: int = 0,
    region: Optional[SamplingRegion] = None,
    reference: Optional[Point] = None,
) -> IterationTrace:
    """Explicit scheme, steps n = 0..budget-1.

    Per step: anchored point y = a*u (+) (1-a)*Tx, projected to the set, then
    geodesic averaging with the previous iterate.  The starting point must be
    a member of the set; schedules must pass :func:`validate_schedules`.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    report = validate_schedules(schedule)
    if not report.all_passed:
        failed = [
            name
            for name, cond in (
                ("(i)", report.condition_i),
                ("(ii)", report.condition_ii),
                ("(iii)", report.condition_iii),
            )
            if not cond.passed
        ]
        raise ScheduleError(
            "schedule fails condition " + ", ".join(failed) + ": "
            + "; ".join(
                c.detail
                for c in (report.condition_i, report.condition_ii, report.condition_iii)
                if not c.passed
            )
        )
    if not contains(space, cset, x0, 1e-9):
        raise ValueError("starting point must belong to the constraint set")

    T = compile_mapping(space, mapping)
    rng = stream(seed, STREAM_PERTURBATION)
    if region is None:
        region = default_region(space)

    trace = IterationTrace()
    x = x0
    for n in range(budget):
        a = schedule.anchor_at(n)
        b = schedule.mixing_at(n)
        if not (0.0 < a < 1.0 and 0.0 < b < 1.0):
            raise ScheduleError(f"schedule values at step {n} outside (0, 1)")
        tx = T(x)
        residual = space.distance(x, tx)
        u = _perturbation_point(space, base, region, rng, schedule.perturbation_at(n))
        y = space.geodesic_point(u, tx, a)
        z = project_point(space, cset, y)[0]
        nxt = space.geodesic_point(x, z, 1.0 - b)
        row = TraceRow(
            n=n,
            fixed_residual=residual,
            step=space.distance(nxt, x),
            z_residual=space.distance(z, x),
        )
        if reference is not None:
            row.ref_distance = space.distance(x, reference)
            row.qx_inner = quasilinearization(space, reference, base.o, reference, x)
        trace.rows.append(row)
        trace.points.append(x)
        if residual <= outer_tol:
            trace.status = "converged"
            return trace
        x = nxt
    trace.rows.append(
        TraceRow(n=budget, fixed_residual=space.distance(x, T(x)))
    )
    trace.points.append(x)
    if trace.rows[-1].fixed_residual <= outer_tol:
        trace.status = "converged"
    return trace


def nearest_fixed_point_residual(
    space: Space,
    q: Point,
    base: Basepoint,
    fixed_set: Union[ConvexSetDescriptor, Sequence[Point]],
    probes: int = 1000,
    seed: int = 0,
) -> float:
    """max over sampled fixed points p of <q->base, q->p>.

    A value <= tolerance certifies (at probe resolution) that q is the point
    of the fixed-point set nearest the base point.
    """
    if isinstance(fixed_set, (list, tuple)):
        pts = list(fixed_set)
        if not pts:
            raise ValueError("fixed-point set is empty")
    else:
        # anchor probe blending at a true member so every probe stays in the set
        anchor = project_point(space, fixed_set, q)[0]
        pts = probe_points(space, fixed_set, anchor, probes, seed=stream_seed(seed))
    return max(quasilinearization(space, q, base.o, q, p) for p in pts)


def stream_seed(seed: int) -> int:
    # probe streams must not collide with perturbation streams
    return (seed << 4) + STREAM_PROBES
