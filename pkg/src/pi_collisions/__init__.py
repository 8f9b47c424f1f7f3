"""Two blocks, one wall, and the digits of pi.

Counts elastic collisions by event simulation (exact rationals or float64)
and predicts the same count from the phase-space rotation angle.
"""

from .analytic import (
    CountPrediction,
    RotationModel,
    predict_count,
    rotation_angle,
    verify_rotation_equivalence,
)
from .backends import DriftReport, ExactBackend, FloatBackend, make_backend, measure_drift
from .engine import CollisionEvent, EventKind, SimulationResult, run, trace_csv
from .errors import (
    AmbiguousBoundaryError,
    BackendCutoffError,
    NumericOverflowError,
    PiCollisionsError,
    ResourceBudgetError,
    RunawayError,
)
from .kinematics import (
    Field,
    MassRatio,
    Matrix2,
    PhasePoint,
    VelocityPair,
    collide_blocks,
    from_phase,
    matrix_A,
    matrix_M,
    matrix_Mprime,
    matrix_S,
    reflect_wall,
    to_phase,
)

__version__ = "0.1.0"
