"""Boundary-integral Stokes flow for a closed planar curve with surface
tension, coupled to thin-layer thickness transport."""

from . import accel, diagnostics, errors, geometry, singular_ops, stokes_field, thickness
from .config import RunConfig, build_initial_state, parse_config
from .diagnostics import Diagnostics
from .evolution import (
    FlowOnCurve,
    RunResult,
    SimState,
    StepConfig,
    compute_psi,
    dL_dt,
    evaluate_flow,
    rhs,
    run,
    step,
)
from .geometry import PeriodicCurve
from .snapshots import Snapshot, SnapshotWriter, read_snapshots
from .stokes_field import FlowParams, linear_ambient
from .thickness import RunHistory, solve_h_characteristics, verify_label_period

__version__ = "0.1.0"

__all__ = [
    "Diagnostics",
    "FlowOnCurve",
    "FlowParams",
    "PeriodicCurve",
    "RunConfig",
    "RunHistory",
    "RunResult",
    "SimState",
    "Snapshot",
    "SnapshotWriter",
    "StepConfig",
    "accel",
    "build_initial_state",
    "compute_psi",
    "dL_dt",
    "diagnostics",
    "errors",
    "evaluate_flow",
    "geometry",
    "linear_ambient",
    "parse_config",
    "read_snapshots",
    "rhs",
    "run",
    "singular_ops",
    "solve_h_characteristics",
    "step",
    "stokes_field",
    "thickness",
    "verify_label_period",
]
