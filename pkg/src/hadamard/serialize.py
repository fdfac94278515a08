"""Canonical JSON encodings and trace CSV output.

One JSON document describes a full experiment (space, constraint set,
mapping, schedules, base point, budgets, seed), so an output's resolved
config re-parses to an identical experiment.  Real numbers are written with
17 significant digits, which round-trips IEEE-754 doubles losslessly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, TextIO

from . import convex, mappings, sampling, solvers, spaces
from .spaces import Point, Space, make_space


class ConfigError(ValueError):
    """Invalid configuration document; message carries a JSON-path anchor."""


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# spaces


def space_to_json(desc: spaces.SpaceDescriptor) -> dict:
    if isinstance(desc, spaces.Euclidean):
        return {"type": "euclidean", "dim": desc.dim}
    if isinstance(desc, spaces.Hyperbolic):
        return {"type": "hyperbolic", "dim": desc.dim}
    if isinstance(desc, spaces.WeightedTree):
        t = desc.topology
        return {
            "type": "tree",
            "vertices": t.vertex_count,
            "edges": [[u, v, length] for u, v, length in t.edges],
        }
    if isinstance(desc, spaces.Product):
        return {
            "type": "product",
            "left": space_to_json(desc.left),
            "right": space_to_json(desc.right),
        }
    raise ConfigError(f"unknown space descriptor {desc!r}")


def space_from_json(doc: dict, where: str = "space") -> spaces.SpaceDescriptor:
    t = _field(doc, "type", where)
    if t == "euclidean":
        return spaces.Euclidean(dim=int(_field(doc, "dim", where)))
    if t == "hyperbolic":
        return spaces.Hyperbolic(dim=int(_field(doc, "dim", where)))
    if t == "tree":
        edges = tuple(
            (int(u), int(v), float(length))
            for u, v, length in _field(doc, "edges", where)
        )
        return spaces.WeightedTree(
            spaces.TreeTopology(vertex_count=int(_field(doc, "vertices", where)), edges=edges)
        )
    if t == "product":
        return spaces.Product(
            space_from_json(_field(doc, "left", where), where + ".left"),
            space_from_json(_field(doc, "right", where), where + ".right"),
        )
    raise ConfigError(f"{where}: unknown space type {t!r}")


def point_to_json(p: Point) -> dict:
    if isinstance(p.space, spaces.Product):
        return {"left": point_to_json(p.data[0]), "right": point_to_json(p.data[1])}
    if isinstance(p.space, spaces.WeightedTree):
        return {"edge": p.data[0], "offset": p.data[1]}
    return {"coords": list(p.data)}


def point_from_json(doc: dict, desc: spaces.SpaceDescriptor, where: str = "point") -> Point:
    if isinstance(desc, spaces.Product):
        return Point(
            desc,
            (
                point_from_json(_field(doc, "left", where), desc.left, where + ".left"),
                point_from_json(_field(doc, "right", where), desc.right, where + ".right"),
            ),
        )
    if isinstance(desc, spaces.WeightedTree):
        return Point(desc, (int(_field(doc, "edge", where)), float(_field(doc, "offset", where))))
    return Point(desc, tuple(float(c) for c in _field(doc, "coords", where)))


# ---------------------------------------------------------------------------
# regions, convex sets, mappings


def region_to_json(region: sampling.SamplingRegion) -> dict:
    if isinstance(region, sampling.EuclideanBox):
        return {"type": "box", "lo": list(region.lo), "hi": list(region.hi)}
    if isinstance(region, sampling.HyperbolicBall):
        return {
            "type": "ball",
            "center": point_to_json(region.center),
            "radius": region.radius,
        }
    if isinstance(region, sampling.TreeWhole):
        return {"type": "tree"}
    if isinstance(region, sampling.ProductRegion):
        return {
            "type": "product",
            "left": region_to_json(region.left),
            "right": region_to_json(region.right),
        }
    raise ConfigError(f"unknown region {region!r}")


def region_from_json(doc: dict, desc: spaces.SpaceDescriptor, where: str = "region"):
    t = _field(doc, "type", where)
    if t == "box":
        return sampling.EuclideanBox(
            tuple(float(c) for c in _field(doc, "lo", where)),
            tuple(float(c) for c in _field(doc, "hi", where)),
        )
    if t == "ball":
        return sampling.HyperbolicBall(
            point_from_json(_field(doc, "center", where), desc, where + ".center"),
            float(_field(doc, "radius", where)),
        )
    if t == "tree":
        return sampling.TreeWhole()
    if t == "product":
        if not isinstance(desc, spaces.Product):
            raise ConfigError(f"{where}: product region for non-product space")
        return sampling.ProductRegion(
            region_from_json(_field(doc, "left", where), desc.left, where + ".left"),
            region_from_json(_field(doc, "right", where), desc.right, where + ".right"),
        )
    raise ConfigError(f"{where}: unknown region type {t!r}")


def convex_set_to_json(cset: convex.ConvexSetDescriptor) -> dict:
    if isinstance(cset, convex.WholeSpace):
        return {"type": "whole"}
    if isinstance(cset, convex.Ball):
        return {"type": "ball", "center": point_to_json(cset.center), "radius": cset.radius}
    if isinstance(cset, convex.Segment):
        return {"type": "segment", "a": point_to_json(cset.a), "b": point_to_json(cset.b)}
    if isinstance(cset, convex.Subtree):
        return {"type": "subtree", "vertices": sorted(cset.vertices)}
    if isinstance(cset, convex.HalfSpace):
        return {"type": "halfspace", "normal": list(cset.normal), "offset": cset.offset}
    raise ConfigError(f"unknown convex set {cset!r}")


def convex_set_from_json(
    doc: dict, desc: spaces.SpaceDescriptor, where: str = "convex_set"
) -> convex.ConvexSetDescriptor:
    t = _field(doc, "type", where)
    if t == "whole":
        return convex.WholeSpace()
    if t == "ball":
        return convex.Ball(
            point_from_json(_field(doc, "center", where), desc, where + ".center"),
            float(_field(doc, "radius", where)),
        )
    if t == "segment":
        return convex.Segment(
            point_from_json(_field(doc, "a", where), desc, where + ".a"),
            point_from_json(_field(doc, "b", where), desc, where + ".b"),
        )
    if t == "subtree":
        return convex.Subtree(frozenset(int(v) for v in _field(doc, "vertices", where)))
    if t == "halfspace":
        return convex.HalfSpace(
            tuple(float(c) for c in _field(doc, "normal", where)),
            float(_field(doc, "offset", where)),
        )
    raise ConfigError(f"{where}: unknown convex set type {t!r}")


def mapping_to_json(m: mappings.MappingDescriptor) -> dict:
    if isinstance(m, mappings.Identity):
        return {"type": "identity"}
    if isinstance(m, mappings.Rotation):
        return {"type": "rotation", "center": point_to_json(m.center), "angle": m.angle}
    if isinstance(m, mappings.ProjectionOnto):
        return {"type": "projection", "set": convex_set_to_json(m.target)}
    if isinstance(m, mappings.GeodesicAverage):
        return {"type": "average", "weight": m.weight, "inner": mapping_to_json(m.inner)}
    if isinstance(m, mappings.Composition):
        return {"type": "composition", "maps": [mapping_to_json(p) for p in m.parts]}
    if isinstance(m, mappings.Translation):
        return {"type": "translation", "vector": list(m.vector)}
    raise ConfigError(f"unknown mapping {m!r}")


def mapping_from_json(
    doc: dict, desc: spaces.SpaceDescriptor, where: str = "mapping"
) -> mappings.MappingDescriptor:
    t = _field(doc, "type", where)
    if t == "identity":
        return mappings.Identity()
    if t == "rotation":
        return mappings.Rotation(
            point_from_json(_field(doc, "center", where), desc, where + ".center"),
            float(_field(doc, "angle", where)),
        )
    if t == "projection":
        return mappings.ProjectionOnto(
            convex_set_from_json(_field(doc, "set", where), desc, where + ".set")
        )
    if t == "average":
        return mappings.GeodesicAverage(
            float(_field(doc, "weight", where)),
            mapping_from_json(_field(doc, "inner", where), desc, where + ".inner"),
        )
    if t == "composition":
        return mappings.Composition(
            tuple(
                mapping_from_json(p, desc, f"{where}.maps[{i}]")
                for i, p in enumerate(_field(doc, "maps", where))
            )
        )
    if t == "translation":
        return mappings.Translation(tuple(float(c) for c in _field(doc, "vector", where)))
    raise ConfigError(f"{where}: unknown mapping type {t!r}")


# ---------------------------------------------------------------------------
# schedules


def power_law_to_json(law: solvers.PowerLaw) -> dict:
    return {"scale": law.scale, "power": law.power, "shift": law.shift}


def power_law_from_json(doc: dict, where: str) -> solvers.PowerLaw:
    return solvers.PowerLaw(
        scale=float(_field(doc, "scale", where)),
        power=float(_field(doc, "power", where)),
        shift=float(doc.get("shift", 1.0)),
    )


def schedule_to_json(s: solvers.Schedule) -> dict:
    doc = {
        "anchor": power_law_to_json(s.anchor),
        "perturbation": power_law_to_json(s.perturbation),
    }
    if isinstance(s.mixing, solvers.PowerLaw):
        doc["mixing"] = power_law_to_json(s.mixing)
    elif s.mixing is not None:
        doc["mixing"] = s.mixing
    return doc


def schedule_from_json(doc: dict, where: str = "schedule") -> solvers.Schedule:
    mixing = doc.get("mixing")
    if isinstance(mixing, dict):
        mixing = power_law_from_json(mixing, where + ".mixing")
    elif mixing is not None:
        mixing = float(mixing)
    return solvers.Schedule(
        anchor=power_law_from_json(_field(doc, "anchor", where), where + ".anchor"),
        perturbation=power_law_from_json(
            _field(doc, "perturbation", where), where + ".perturbation"
        ),
        mixing=mixing,
    )


# ---------------------------------------------------------------------------
# experiment config


@dataclass
class ExperimentConfig:
    name: str
    space: spaces.SpaceDescriptor
    convex_set: convex.ConvexSetDescriptor
    mapping: mappings.MappingDescriptor
    algorithm: str  # "implicit" | "explicit"
    schedule: solvers.Schedule
    basepoint: Point
    budget: int
    seed: int
    outer_tol: float = 0.0
    inner_tol: float = 1e-10
    max_inner: int = 10**6
    x0: Optional[Point] = None
    reference: Optional[Point] = None
    perturbation_region: Optional[sampling.SamplingRegion] = None
    output_dir: str = "."


def config_to_json(cfg: ExperimentConfig) -> dict:
    doc = {
        "name": cfg.name,
        "space": space_to_json(cfg.space),
        "convex_set": convex_set_to_json(cfg.convex_set),
        "mapping": mapping_to_json(cfg.mapping),
        "algorithm": cfg.algorithm,
        "schedule": schedule_to_json(cfg.schedule),
        "basepoint": point_to_json(cfg.basepoint),
        "budget": cfg.budget,
        "seed": cfg.seed,
        "outer_tol": cfg.outer_tol,
        "inner_tol": cfg.inner_tol,
        "max_inner": cfg.max_inner,
        "output_dir": cfg.output_dir,
    }
    if cfg.x0 is not None:
        doc["x0"] = point_to_json(cfg.x0)
    if cfg.reference is not None:
        doc["reference"] = point_to_json(cfg.reference)
    if cfg.perturbation_region is not None:
        doc["perturbation_region"] = region_to_json(cfg.perturbation_region)
    return doc


def config_from_json(doc: dict) -> ExperimentConfig:
    desc = space_from_json(_field(doc, "space", "$"))
    algorithm = _field(doc, "algorithm", "$")
    if algorithm not in ("implicit", "explicit"):
        raise ConfigError(f"algorithm: expected 'implicit' or 'explicit', got {algorithm!r}")
    budget = int(_field(doc, "budget", "$"))
    if budget < 1:
        raise ConfigError("budget: must be at least 1")
    cfg = ExperimentConfig(
        name=str(doc.get("name", "experiment")),
        space=desc,
        convex_set=convex_set_from_json(_field(doc, "convex_set", "$"), desc),
        mapping=mapping_from_json(_field(doc, "mapping", "$"), desc),
        algorithm=algorithm,
        schedule=schedule_from_json(_field(doc, "schedule", "$")),
        basepoint=point_from_json(_field(doc, "basepoint", "$"), desc, "basepoint"),
        budget=budget,
        seed=int(doc.get("seed", 0)),
        outer_tol=float(doc.get("outer_tol", 0.0)),
        inner_tol=float(doc.get("inner_tol", 1e-10)),
        max_inner=int(doc.get("max_inner", 10**6)),
        output_dir=str(doc.get("output_dir", ".")),
    )
    if "x0" in doc:
        cfg.x0 = point_from_json(doc["x0"], desc, "x0")
    if "reference" in doc:
        cfg.reference = point_from_json(doc["reference"], desc, "reference")
    if "perturbation_region" in doc:
        cfg.perturbation_region = region_from_json(
            doc["perturbation_region"], desc, "perturbation_region"
        )
    if algorithm == "explicit" and cfg.x0 is None:
        raise ConfigError("x0: the explicit algorithm needs a starting point")
    return cfg


def _field(doc: dict, key: str, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise ConfigError(f"{where}: missing required field {key!r}")
    return doc[key]


# ---------------------------------------------------------------------------
# trace CSV

TRACE_HEADER = "n,fixed_residual,step,z_residual,ref_distance,qx_inner"


def write_trace_csv(trace: solvers.IterationTrace, out: TextIO) -> None:
    out.write(TRACE_HEADER + "\n")
    for row in trace.rows:
        cells = [str(row.n)]
        for v in (row.fixed_residual, row.step, row.z_residual, row.ref_distance, row.qx_inner):
            cells.append("" if v is None else fmt_float(v))
        out.write(",".join(cells) + "\n")


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
