"""Computation toolkit for Hadamard (complete CAT(0)) spaces.

Model spaces (Euclidean, hyperboloid, metric trees, products), the
quasilinearization pairing, metric projection onto convex sets with a
certificate, perturbed fixed-point iteration of nonexpansive mappings, and a
randomized property harness for the underlying inequalities.
"""

from .convex import (
    Ball,
    ConvexSetDescriptor,
    HalfSpace,
    ProjectionResult,
    Segment,
    Subtree,
    WholeSpace,
    characterization_residual,
    contains,
    probe_points,
    project,
    project_point,
    project_segment,
)
from .geometry import cauchy_schwarz_gap, norm, quasilinearization
from .harness import (
    CorruptedSpace,
    PropertyReport,
    check_lemmas,
    check_space_axioms,
    liu_recursion,
    trace_diagnostics,
)
from .mappings import (
    Composition,
    GeodesicAverage,
    Identity,
    MappingDescriptor,
    ProjectionOnto,
    Rotation,
    Translation,
    apply_mapping,
    compile_mapping,
    known_fixed_set,
)
from .sampling import (
    EuclideanBox,
    HyperbolicBall,
    ProductRegion,
    SamplingRegion,
    TreeWhole,
    default_region,
    random_point,
    sample_in_ball,
    stream,
)
from .solvers import (
    InnerBudgetError,
    IterationTrace,
    PowerLaw,
    Schedule,
    ScheduleError,
    implicit_step,
    nearest_fixed_point_residual,
    run_explicit,
    run_implicit,
    validate_schedules,
)
from .spaces import (
    Basepoint,
    Euclidean,
    Hyperbolic,
    InvalidSpaceError,
    Point,
    Product,
    SpaceDescriptor,
    SpaceMismatchError,
    TreeTopology,
    WeightedTree,
    euclidean_point,
    hyperboloid_point,
    make_space,
    tree_point,
    validate_point,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
