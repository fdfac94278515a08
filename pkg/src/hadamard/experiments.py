"""Experiment execution: config in, trace CSV + summary JSON out."""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import serialize
from .mappings import known_fixed_set
from .solvers import (
    IterationTrace,
    nearest_fixed_point_residual,
    run_explicit,
    run_implicit,
)
from .spaces import Basepoint, make_space


@dataclass
class ExperimentResult:
    config: serialize.ExperimentConfig
    trace: IterationTrace
    trace_path: Path
    summary_path: Path
    summary: dict

    @property
    def converged(self) -> bool:
        return self.trace.status == "converged"


def execute(cfg: serialize.ExperimentConfig) -> tuple[IterationTrace, dict]:
    """Run the configured solver; returns the trace and the summary document."""
    space = make_space(cfg.space)
    base = Basepoint(cfg.basepoint)
    start = time.perf_counter()
    if cfg.algorithm == "implicit":
        trace = run_implicit(
            space,
            cfg.convex_set,
            cfg.mapping,
            cfg.schedule,
            base,
            budget=cfg.budget,
            outer_tol=cfg.outer_tol,
            seed=cfg.seed,
            region=cfg.perturbation_region,
            inner_tol=cfg.inner_tol,
            max_inner=cfg.max_inner,
            reference=cfg.reference,
        )
    else:
        trace = run_explicit(
            space,
            cfg.convex_set,
            cfg.mapping,
            cfg.schedule,
            base,
            x0=cfg.x0,
            budget=cfg.budget,
            outer_tol=cfg.outer_tol,
            seed=cfg.seed,
            region=cfg.perturbation_region,
            reference=cfg.reference,
        )
    wall = time.perf_counter() - start

    certificates: dict[str, Optional[float]] = {"nearest_fixed_point_residual": None}
    fixed = known_fixed_set(cfg.mapping)
    if fixed is not None and fixed != []:
        certificates["nearest_fixed_point_residual"] = nearest_fixed_point_residual(
            space, trace.final, base, fixed, probes=1000, seed=cfg.seed
        )

    summary = {
        "name": cfg.name,
        "status": trace.status,
        "steps": trace.rows[-1].n,
        "final_point": serialize.point_to_json(trace.final),
        "final_fixed_residual": trace.final_fixed_residual,
        "certificates": certificates,
        "wall_time_s": wall,
        "config": serialize.config_to_json(cfg),
    }
    return trace, summary


def run_to_files(cfg: serialize.ExperimentConfig) -> ExperimentResult:
    """Execute and write ``<name>.trace.csv`` and ``<name>.summary.json``."""
    trace, summary = execute(cfg)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    trace_path = out_dir / f"{cfg.name}.trace.csv"
    summary_path = out_dir / f"{cfg.name}.summary.json"
    with open(trace_path, "w") as fh:
        serialize.write_trace_csv(trace, fh)
    with open(summary_path, "w") as fh:
        fh.write(serialize.dumps(summary))
    return ExperimentResult(
        config=cfg,
        trace=trace,
        trace_path=trace_path,
        summary_path=summary_path,
        summary=summary,
    )
