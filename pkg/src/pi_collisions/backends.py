"""Number fields the event loop runs over.

``ExactBackend`` keeps both velocities as integer numerators over the shared
implicit denominator ``scale * (p+q)**k``.  Every block/block collision
divides by ``1 + alpha = (p+q)/q``, so multiplying the numerators by the
integer coefficients of ``(p+q) * S`` keeps everything integral and bumps
``k`` by one.  No gcd reduction is ever done.

``FloatBackend`` runs the same kernels in IEEE binary64 and reports, but
never corrects, the energy drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import BackendCutoffError, NumericOverflowError, ResourceBudgetError, RunawayError
from .kinematics import Field, MassRatio, VelocityPair, collide_blocks, matrix_S, reflect_wall

EXACT_CUTOFF = Fraction(1, 10**8)
AUTO_EXACT_THRESHOLD = Fraction(1, 10**4)
DEFAULT_MAX_DIGITS = 1_000_000
_LOG2_10 = math.log2(10)


@dataclass(frozen=True)
class ExactScalar:
    """numerator / (scale * base**denom_exponent), never rounded."""

    numerator: int
    denom_exponent: int
    base: int
    scale: int = 1

    @property
    def denominator(self) -> int:
        return self.scale * self.base**self.denom_exponent

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __float__(self) -> float:
        # int / int is correctly rounded even for huge operands
        return self.numerator / self.denominator

    def __abs__(self) -> ExactScalar:
        return ExactScalar(abs(self.numerator), self.denom_exponent, self.base, self.scale)

    def __neg__(self) -> ExactScalar:
        return ExactScalar(-self.numerator, self.denom_exponent, self.base, self.scale)

    def digits(self) -> int:
        """Approximate decimal digit count of the numerator (exact up to +-1)."""
        return max(1, math.ceil(abs(self.numerator).bit_length() / _LOG2_10))


@dataclass(frozen=True)
class ExactState:
    """Co-normalized velocity numerators sharing one denominator exponent."""

    v_num: int
    V_num: int
    k: int
    scale: int = 1


@dataclass(frozen=True)
class DriftReport:
    """Conservation bookkeeping for one run.

    ``energy_rel_drift`` is |E_final - E_0| / E_0 with E = alpha*v**2 + V**2.
    ``momentum_range`` is the (min, max) of alpha*v + V seen; momentum is
    only conserved across block/block collisions, so the range is wide by
    design.  ``momentum_collision_drift`` is the worst relative momentum
    change across a single block/block collision, available when the run
    recorded a trace.
    """

    energy_rel_drift: Union[Fraction, float]
    momentum_range: tuple
    momentum_collision_drift: Optional[Union[Fraction, float]] = None

    def as_dict(self) -> dict:
        return {
            "energy_rel_drift": float(self.energy_rel_drift),
            "momentum_range": [float(x) for x in self.momentum_range],
            "momentum_collision_drift": (
                None if self.momentum_collision_drift is None else float(self.momentum_collision_drift)
            ),
        }


def measure_drift(initial: VelocityPair, final: VelocityPair, ratio: MassRatio) -> DriftReport:
    e0 = initial.energy(ratio)
    e1 = final.energy(ratio)
    if e0 == 0:
        drift = abs(e1 - e0)
    else:
        drift = abs(e1 - e0) / e0
    p0 = initial.momentum(ratio)
    p1 = final.momentum(ratio)
    return DriftReport(drift, (min(p0, p1), max(p0, p1)))


class ExactBackend:
    name = "exact"
    field = Field.RATIONAL

    def __init__(self, ratio: MassRatio, allow_small_alpha: bool = False, max_digits: int = DEFAULT_MAX_DIGITS):
        if ratio.alpha < EXACT_CUTOFF and not allow_small_alpha:
            raise BackendCutoffError(
                f"exact backend refuses alpha={ratio} below {EXACT_CUTOFF}; "
                "pass allow_small_alpha=True with a max_digits budget to force it"
            )
        if max_digits < 1:
            raise ValueError("max_digits must be positive")
        self.ratio = ratio
        self.max_digits = max_digits
        self._max_bits = math.ceil(max_digits * _LOG2_10)
        p, q = ratio.p, ratio.q
        self.base = p + q
        # (p+q) * S = [[p-q, 2q], [2p, q-p]]
        self._c11, self._c12, self._c21, self._c22 = p - q, 2 * q, 2 * p, q - p

    def initial(self, speed=1) -> ExactState:
        speed = Fraction(speed)
        return ExactState(0, -speed.numerator, 0, speed.denominator)

    def collide(self, state: ExactState) -> ExactState:
        a, b = state.v_num, state.V_num
        return ExactState(self._c11 * a + self._c12 * b, self._c21 * a + self._c22 * b, state.k + 1, state.scale)

    def reflect(self, state: ExactState) -> ExactState:
        return ExactState(-state.v_num, state.V_num, state.k, state.scale)

    # the shared denominator is positive, so numerators compare like values
    def approaching(self, state: ExactState) -> bool:
        return state.V_num < state.v_num

    def toward_wall(self, state: ExactState) -> bool:
        return state.v_num < 0

    def check(self, state: ExactState, index: int) -> None:
        bits = max(abs(state.v_num).bit_length(), abs(state.V_num).bit_length())
        if bits > self._max_bits:
            raise ResourceBudgetError(index, math.ceil(bits / _LOG2_10), self.max_digits)

    def scalars(self, state: ExactState) -> tuple[ExactScalar, ExactScalar]:
        return (
            ExactScalar(state.v_num, state.k, self.base, state.scale),
            ExactScalar(state.V_num, state.k, self.base, state.scale),
        )

    def velocities(self, state: ExactState) -> VelocityPair:
        den = state.scale * self.base**state.k
        return VelocityPair(Fraction(state.v_num, den), Fraction(state.V_num, den))

    def numerator_digits(self, state: ExactState) -> int:
        bits = max(abs(state.v_num).bit_length(), abs(state.V_num).bit_length())
        return max(1, math.ceil(bits / _LOG2_10))

    def measure_drift(self, initial: ExactState, final: ExactState) -> DriftReport:
        return measure_drift(self.velocities(initial), self.velocities(final), self.ratio)

    def count(self, state: ExactState, max_events: int) -> tuple[int, ExactState]:
        """Run the event loop to termination without building intermediate objects."""
        c11, c12, c21, c22 = self._c11, self._c12, self._c21, self._c22
        max_bits = self._max_bits
        a, b, k = state.v_num, state.V_num, state.k
        n = 0
        while True:
            if b < a:
                a, b = c11 * a + c12 * b, c21 * a + c22 * b
                k += 1
                n += 1
                if a.bit_length() > max_bits or b.bit_length() > max_bits:
                    self.check(ExactState(a, b, k, state.scale), n)
            elif a < 0:
                a = -a
                n += 1
            else:
                break
            if n >= max_events and (b < a or a < 0):
                raise RunawayError(n)
        return n, ExactState(a, b, k, state.scale)


class FloatBackend:
    name = "float64"
    field = Field.FLOAT64

    def __init__(self, ratio: MassRatio):
        self.ratio = ratio
        self.alpha = float(ratio)
        self.sqrt_alpha = math.sqrt(self.alpha)

    def initial(self, speed=1) -> VelocityPair:
        V0 = -float(speed)
        if not math.isfinite(V0):
            raise NumericOverflowError(f"initial speed {speed} is not finite")
        return VelocityPair(0.0, V0)

    def collide(self, state: VelocityPair) -> VelocityPair:
        return collide_blocks(state, self.ratio)

    def reflect(self, state: VelocityPair) -> VelocityPair:
        return reflect_wall(state)

    def approaching(self, state: VelocityPair) -> bool:
        return state.V < state.v

    def toward_wall(self, state: VelocityPair) -> bool:
        return state.v < 0

    def check(self, state: VelocityPair, index: int) -> None:
        if not (math.isfinite(state.v) and math.isfinite(state.V)):
            raise NumericOverflowError(f"non-finite velocities at collision {index}")

    def scalars(self, state: VelocityPair) -> tuple[float, float]:
        return state.v, state.V

    def velocities(self, state: VelocityPair) -> VelocityPair:
        return state

    def measure_drift(self, initial: VelocityPair, final: VelocityPair) -> DriftReport:
        return measure_drift(initial, final, self.ratio)

    def count(self, state: VelocityPair, max_events: int) -> tuple[int, VelocityPair]:
        """Tight float loop; same predicate and coefficients as :func:`collide_blocks`."""
        s = matrix_S(self.ratio, Field.FLOAT64)
        c11, c12, c21, c22 = s.a11, s.a12, s.a21, s.a22
        v, V = float(state.v), float(state.V)
        n = 0
        for n in range(max_events):
            if V < v:
                v, V = c11 * v + c12 * V, c21 * v + c22 * V
            elif v < 0:
                v = -v
            else:
                break
        else:
            n = max_events
            if V < v or v < 0:
                raise RunawayError(n)
        final = VelocityPair(v, V)
        self.check(final, n)
        return n, final


Backend = Union[ExactBackend, FloatBackend]


def make_backend(name: str, ratio: MassRatio, *, allow_small_alpha: bool = False,
                 max_digits: int = DEFAULT_MAX_DIGITS) -> Backend:
    """Build a backend by name: ``exact``, ``float64`` or ``auto``.

    ``auto`` picks exact for alpha >= 1e-4 and float64 below.
    """
    if name == "auto":
        name = "exact" if ratio.alpha >= AUTO_EXACT_THRESHOLD else "float64"
    if name == "exact":
        return ExactBackend(ratio, allow_small_alpha=allow_small_alpha, max_digits=max_digits)
    if name in ("float64", "float"):
        return FloatBackend(ratio)
    raise ValueError(f"unknown backend {name!r}")
