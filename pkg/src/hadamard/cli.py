"""Command line entry point.

Subcommands::

    hadamard run <config.json> [...]   # solver experiments (CSV + summary)
    hadamard verify --space <spec>     # property harness over one space
    hadamard schedules --check <config.json>

Exit status: 0 success/clean, 1 non-convergence or property violations,
2 invalid configuration.  HADAMARD_SEED overrides the configured seed.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import click

from . import serialize
from .harness import CorruptedSpace, check_lemmas, check_space_axioms
from .sampling import stream
from .solvers import ScheduleError, validate_schedules
from .spaces import (
    Euclidean,
    Hyperbolic,
    InvalidSpaceError,
    Product,
    TreeTopology,
    WeightedTree,
    make_space,
)
from .experiments import run_to_files

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_CONFIG = 2


def _load_config(path: str, seed, budget, output_dir):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise serialize.ConfigError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise serialize.ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    cfg = serialize.config_from_json(doc)
    env_seed = os.environ.get("HADAMARD_SEED")
    if seed is not None:
        cfg.seed = seed
    elif env_seed is not None:
        cfg.seed = int(env_seed)
    if budget is not None:
        cfg.budget = budget
    if output_dir is not None:
        cfg.output_dir = output_dir
    return cfg


def parse_space_spec(spec: str):
    """Space handle from a compact spec string.

    Accepts ``euclidean:N``, ``hyperbolic:N``, ``tree-star:RAYS:LENGTH``,
    ``tree-random:EDGES:SEED``, ``product:(A,B)``, and ``corrupted-demo``.
    """
    spec = spec.strip()
    if spec == "corrupted-demo":
        return CorruptedSpace(make_space(Euclidean(2)))
    if spec.startswith("product:"):
        body = spec[len("product:"):]
        if body.startswith("(") and body.endswith(")"):
            body = body[1:-1]
        depth = 0
        for i, ch in enumerate(body):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                left = parse_space_spec(body[:i])
                right = parse_space_spec(body[i + 1:])
                return make_space(Product(left.descriptor, right.descriptor))
        raise InvalidSpaceError(f"cannot split product spec {spec!r}")
    parts = spec.split(":")
    kind = parts[0]
    if kind == "euclidean":
        return make_space(Euclidean(int(parts[1])))
    if kind == "hyperbolic":
        return make_space(Hyperbolic(int(parts[1])))
    if kind == "tree-star":
        rays = int(parts[1])
        length = float(parts[2]) if len(parts) > 2 else 1.0
        edges = tuple((0, i + 1, length) for i in range(rays))
        return make_space(WeightedTree(TreeTopology(rays + 1, edges)))
    if kind == "tree-random":
        n_edges = int(parts[1])
        seed = int(parts[2]) if len(parts) > 2 else 0
        return make_space(WeightedTree(random_tree_topology(n_edges, seed)))
    raise InvalidSpaceError(f"unknown space spec {spec!r}")


def random_tree_topology(n_edges: int, seed: int) -> TreeTopology:
    """Seeded random tree: vertex k+1 attaches to a uniform earlier vertex
    with length uniform in [0.5, 2]."""
    rng = stream(seed, 0x7E)
    edges = []
    for k in range(n_edges):
        parent = int(rng.integers(k + 1))
        length = 0.5 + 1.5 * float(rng.random())
        edges.append((parent, k + 1, length))
    return TreeTopology(n_edges + 1, tuple(edges))


@click.group()
def main():
    """Computation toolkit for Hadamard (complete CAT(0)) spaces."""


@main.command("run")
@click.argument("configs", nargs=-1, required=True, type=click.Path())
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--budget", type=int, default=None, help="Override the iteration budget.")
@click.option("--output-dir", type=click.Path(), default=None, help="Override the output directory.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Parallel worker threads for batches.")
def run_cmd(configs, seed, budget, output_dir, jobs):
    """Run solver experiments from JSON config files."""
    try:
        cfgs = [_load_config(p, seed, budget, output_dir) for p in configs]
    except (serialize.ConfigError, ScheduleError, InvalidSpaceError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_BAD_CONFIG)

    def one(cfg):
        return run_to_files(cfg)

    try:
        if jobs > 1 and len(cfgs) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(one, cfgs))
        else:
            results = [one(cfg) for cfg in cfgs]
    except (serialize.ConfigError, ScheduleError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_BAD_CONFIG)

    status = EXIT_OK
    for res in results:
        click.echo(
            f"{res.config.name}: {res.trace.status} after {res.summary['steps']} steps, "
            f"final residual {res.summary['final_fixed_residual']:.3e} "
            f"-> {res.trace_path}"
        )
        if not res.converged:
            status = EXIT_FAILED
    sys.exit(status)


@main.command("verify")
@click.option("--space", "space_spec", required=True, help="Space spec, e.g. euclidean:2.")
@click.option("--trials", type=int, default=10000, show_default=True)
@click.option("--eps", type=float, default=1e-8, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--radius", type=float, default=5.0, show_default=True, help="Sampling region radius.")
def verify_cmd(space_spec, trials, eps, seed, radius):
    """Run the metric/geodesic property harness over one space."""
    if trials < 1 or eps <= 0.0:
        click.echo("error: trials must be >= 1 and eps > 0", err=True)
        sys.exit(EXIT_BAD_CONFIG)
    try:
        space = parse_space_spec(space_spec)
    except (InvalidSpaceError, ValueError, IndexError) as exc:
        click.echo(f"error: invalid space spec: {exc}", err=True)
        sys.exit(EXIT_BAD_CONFIG)

    from .sampling import default_region

    if isinstance(space, CorruptedSpace):
        region = default_region(space.inner, radius)
    else:
        region = default_region(space, radius)
    reports = check_space_axioms(space, trials, eps, seed, region)
    reports += check_lemmas(space, trials, eps, seed, region)

    width = max(len(r.name) for r in reports)
    click.echo(f"{'property'.ljust(width)}  trials  violations  worst_margin")
    for r in reports:
        click.echo(
            f"{r.name.ljust(width)}  {r.trials:6d}  {r.violations:10d}  {r.worst_margin: .3e}"
        )
    bad = [r for r in reports if r.violations]
    if bad:
        click.echo(f"\n{len(bad)} propert{'y' if len(bad) == 1 else 'ies'} violated; worst witnesses:")
        for r in bad:
            click.echo(f"  {r.name}: {json.dumps(r.worst_witness)}")
        sys.exit(EXIT_FAILED)
    sys.exit(EXIT_OK)


@main.command("schedules")
@click.option("--check", "config_path", required=True, type=click.Path())
def schedules_cmd(config_path):
    """Validate the schedule conditions of an experiment config."""
    try:
        cfg = _load_config(config_path, None, None, None)
    except serialize.ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_BAD_CONFIG)
    report = validate_schedules(cfg.schedule)
    for name, cond in (
        ("(i) vanishing non-summable anchor", report.condition_i),
        ("(ii) averaging weight in (0,1)", report.condition_ii),
        ("(iii) summable anchored perturbation", report.condition_iii),
    ):
        click.echo(f"{name}: {'pass' if cond.passed else 'FAIL'} [{cond.method}] {cond.detail}")
    sys.exit(EXIT_OK if report.all_passed else EXIT_FAILED)


if __name__ == "__main__":
    main()
