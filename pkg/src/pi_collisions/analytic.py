"""Closed-form collision count from the phase-space rotation angle.

In ``(u, V) = (v*sqrt(alpha), V)`` coordinates a collision followed by a wall
bounce is a rotation by ``theta = 2*atan(sqrt(alpha))``.  Starting from
``(0, -1)`` the point turns through at most ``pi``, two events per step, so
the count is the number of half-steps of ``theta/2`` that fit strictly
inside ``pi``: ``ceil(pi / atan(sqrt(alpha))) - 1``.

The plain floor ``floor(pi / atan(sqrt(alpha)))`` overcounts by one when the
quotient is an integer (alpha = 1 gives 4, the true count is 3).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import AmbiguousBoundaryError
from .kinematics import MassRatio, VelocityPair, collide_blocks, reflect_wall, to_phase

GUARD_REL = 1e-9
ESCALATION_DPS = (50, 100, 200)
_ULP1 = math.ulp(1.0)

# tan(pi/n)**2 is rational only for n in {3, 4, 6} (Niven); with alpha <= 1
# that leaves these two integer-boundary ratios.
_RATIONAL_BOUNDARIES = {Fraction(1): 4, Fraction(1, 3): 6}


class BoundaryFlag(enum.Enum):
    INTERIOR = "Interior"
    NEAR_INTEGER = "NearInteger"


@dataclass(frozen=True)
class RotationModel:
    theta: float
    half_theta_tan: float
    turns_to_pi: float


@dataclass(frozen=True)
class CountPrediction:
    n_exact_formula: int
    n_paper_floor: int
    n_sqrt_approx: int
    boundary_flag: BoundaryFlag
    quotient: float

    @property
    def approximation_agrees(self) -> bool:
        return self.n_sqrt_approx == self.n_exact_formula


def _require_predictor_range(ratio: MassRatio) -> None:
    if ratio.alpha > 1:
        raise ValueError(f"predictors assume alpha <= 1, got {ratio}")


def rotation_angle(ratio: MassRatio) -> RotationModel:
    """Rotation angle per collision pair, cross-checked against its cosine form."""
    _require_predictor_range(ratio)
    alpha = float(ratio)
    r = math.sqrt(alpha)
    theta = 2.0 * math.atan(r)
    cos_expected = float(Fraction(ratio.q - ratio.p, ratio.q + ratio.p))
    if abs(math.cos(theta) - cos_expected) > 4 * _ULP1:
        raise ArithmeticError(f"angle forms disagree at alpha={ratio}: cos={math.cos(theta)!r} vs {cos_expected!r}")
    return RotationModel(theta=theta, half_theta_tan=r, turns_to_pi=2.0 * math.pi / theta)


def _sqrt_approx(ratio: MassRatio) -> int:
    # pi*sqrt(q/p) is irrational, 50 digits settle the floor
    with mpmath.workdps(50):
        return int(mpmath.floor(mpmath.pi * mpmath.sqrt(mpmath.mpf(ratio.q) / ratio.p)))


def _escalated_quotient(ratio: MassRatio, dps: int):
    with mpmath.workdps(dps):
        return +(mpmath.pi / mpmath.atan(mpmath.sqrt(mpmath.mpf(ratio.p) / ratio.q)))


def predict_count(ratio: MassRatio) -> CountPrediction:
    """Collision count without simulating.

    ``n_exact_formula`` is ``ceil(x) - 1`` with ``x = pi/atan(sqrt(alpha))``;
    ``n_paper_floor`` is the literal ``floor(x)``; ``n_sqrt_approx`` is
    ``floor(pi*sqrt(M/m))``.  When ``x`` lands within a relative 1e-9 of an
    integer it is re-evaluated at 50, 100 and 200 digits.
    """
    _require_predictor_range(ratio)
    x = math.pi / math.atan(math.sqrt(float(ratio)))
    nearest = round(x)
    approx = _sqrt_approx(ratio)
    if abs(x - nearest) >= GUARD_REL * x:
        n = math.floor(x)
        return CountPrediction(n, n, approx, BoundaryFlag.INTERIOR, x)

    interval = None
    for dps in ESCALATION_DPS:
        xm = _escalated_quotient(ratio, dps)
        with mpmath.workdps(dps):
            n_int = int(mpmath.nint(xm))
            gap = abs(xm - n_int)
            resolution = mpmath.mpf(10) ** (10 - dps) * xm
            if gap > resolution:
                n = int(mpmath.floor(xm))
                return CountPrediction(n, n, approx, BoundaryFlag.NEAR_INTEGER, x)
            if _RATIONAL_BOUNDARIES.get(ratio.alpha) == n_int:
                return CountPrediction(n_int - 1, n_int, approx, BoundaryFlag.NEAR_INTEGER, x)
            interval = (mpmath.nstr(xm - resolution, dps), mpmath.nstr(xm + resolution, dps))
    raise AmbiguousBoundaryError(interval)


def verify_rotation_equivalence(ratio: MassRatio, steps: int, tol: float = 1e-9) -> bool:
    """Iterate collide-then-wall ``steps`` times from (0, -1) and compare the
    phase point with a single rotation of (0, -1) by ``steps * theta``."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if steps == 0:
        return True
    state = VelocityPair(0.0, -1.0)
    for _ in range(steps):
        state = reflect_wall(collide_blocks(state, ratio))
    point = to_phase(state, ratio)
    theta = 2.0 * math.atan(math.sqrt(float(ratio)))
    phi = steps * theta
    # rotation of (0, -1) by phi
    u_ref, V_ref = math.sin(phi), -math.cos(phi)
    return abs(point.u - u_ref) <= tol and abs(point.V - V_ref) <= tol
