"""State types and collision kernels for the block/block/wall system.

Sign convention: the axis points away from the wall.  The small block sits
between the wall and the big block; initially ``v = 0`` and ``V = -1``.

Every kernel is written once over a :class:`Field`.  Scalars are either
:class:`fractions.Fraction` (exact) or ``float`` (IEEE binary64) and the
field is inferred from the state being transformed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .errors import NumericOverflowError

Scalar = Union[Fraction, float]


class Field(enum.Enum):
    RATIONAL = "rational"
    FLOAT64 = "float64"

    def scalar(self, value) -> Scalar:
        if self is Field.RATIONAL:
            return Fraction(value)
        return float(value)

    def sqrt(self, value: Fraction) -> Scalar:
        """Square root of a non-negative rational, exact or rounded.

        Raises ValueError in the rational field when the root is irrational.
        """
        if value < 0:
            raise ValueError("square root of a negative number")
        if self is Field.FLOAT64:
            return math.sqrt(value)
        value = Fraction(value)
        rn, rd = math.isqrt(value.numerator), math.isqrt(value.denominator)
        if rn * rn != value.numerator or rd * rd != value.denominator:
            raise ValueError(f"sqrt({value}) is not rational")
        return Fraction(rn, rd)

    @staticmethod
    def of(x) -> Field:
        if isinstance(x, float):
            return Field.FLOAT64
        if isinstance(x, (Fraction, int)):
            return Field.RATIONAL
        raise TypeError(f"no number field for {type(x).__name__}")


@dataclass(frozen=True)
class MassRatio:
    """alpha = m/M = p/q, stored in lowest terms."""

    p: int
    q: int

    def __post_init__(self):
        if isinstance(self.p, bool) or isinstance(self.q, bool):
            raise TypeError("p and q must be integers")
        if not isinstance(self.p, int) or not isinstance(self.q, int):
            raise TypeError("p and q must be integers")
        if self.p < 1 or self.q < 1:
            raise ValueError(f"mass ratio needs p >= 1 and q >= 1, got {self.p}/{self.q}")
        g = math.gcd(self.p, self.q)
        object.__setattr__(self, "p", self.p // g)
        object.__setattr__(self, "q", self.q // g)

    @classmethod
    def from_fraction(cls, alpha) -> MassRatio:
        alpha = Fraction(alpha)
        if alpha <= 0:
            raise ValueError(f"mass ratio must be positive, got {alpha}")
        return cls(alpha.numerator, alpha.denominator)

    @classmethod
    def parse(cls, text: str) -> MassRatio:
        """Parse ``"p/q"``, ``"0.000001"`` or ``"1e-6"`` without going through binary floats.

        >>> MassRatio.parse("1e-6") == MassRatio.parse("1/1000000")
        True
        """
        try:
            alpha = Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse mass ratio {text!r}") from exc
        return cls.from_fraction(alpha)

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.p, self.q)

    def in_field(self, field: Field) -> Scalar:
        return field.scalar(self.alpha)

    def __float__(self) -> float:
        return float(self.alpha)

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


@dataclass(frozen=True)
class VelocityPair:
    """(v, V): small-block and big-block velocities."""

    v: Scalar
    V: Scalar

    @property
    def field(self) -> Field:
        return _field_of_pair(self)

    def energy(self, ratio: MassRatio) -> Scalar:
        """alpha*v**2 + V**2, i.e. kinetic energy divided by M/2."""
        alpha = ratio.in_field(self.field)
        return alpha * self.v * self.v + self.V * self.V

    def momentum(self, ratio: MassRatio) -> Scalar:
        """alpha*v + V, i.e. momentum divided by M."""
        alpha = ratio.in_field(self.field)
        return alpha * self.v + self.V


@dataclass(frozen=True)
class PhasePoint:
    """Scaled coordinates (u, V) with u = v*sqrt(alpha)."""

    u: Scalar
    V: Scalar

    def radius_squared(self) -> Scalar:
        return self.u * self.u + self.V * self.V


@dataclass(frozen=True)
class Matrix2:
    """Row-major 2x2 matrix over one number field."""

    a11: Scalar
    a12: Scalar
    a21: Scalar
    a22: Scalar

    def __matmul__(self, other: Matrix2) -> Matrix2:
        return Matrix2(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
        )

    def apply(self, x: Scalar, y: Scalar) -> tuple[Scalar, Scalar]:
        return self.a11 * x + self.a12 * y, self.a21 * x + self.a22 * y

    def det(self) -> Scalar:
        return self.a11 * self.a22 - self.a12 * self.a21

    def trace(self) -> Scalar:
        return self.a11 + self.a22

    def transpose(self) -> Matrix2:
        return Matrix2(self.a11, self.a21, self.a12, self.a22)

    def rows(self) -> tuple[tuple[Scalar, Scalar], tuple[Scalar, Scalar]]:
        return (self.a11, self.a12), (self.a21, self.a22)


@lru_cache(maxsize=256)
def _collision_coefficients(ratio: MassRatio, field: Field) -> Matrix2:
    # alpha form: v' = (a-1)/(1+a) v + 2/(1+a) V ; V' = 2a/(1+a) v + (1-a)/(1+a) V
    # with a = p/q each entry is an integer over p+q; round once into the field
    p, q = ratio.p, ratio.q
    d = p + q
    return Matrix2(
        field.scalar(Fraction(p - q, d)),
        field.scalar(Fraction(2 * q, d)),
        field.scalar(Fraction(2 * p, d)),
        field.scalar(Fraction(q - p, d)),
    )


def _field_of_pair(state: VelocityPair) -> Field:
    if isinstance(state.v, float) or isinstance(state.V, float):
        return Field.FLOAT64
    return Field.RATIONAL


def collide_blocks(state: VelocityPair, ratio: MassRatio) -> VelocityPair:
    """Elastic block/block collision.

    Conserves ``alpha*v**2 + V**2`` and ``alpha*v + V`` and reverses the
    relative velocity ``v - V``.
    """
    field = _field_of_pair(state)
    if field is Field.FLOAT64:
        v, V = float(state.v), float(state.V)
    else:
        v, V = Fraction(state.v), Fraction(state.V)
    s = _collision_coefficients(ratio, field)
    nv, nV = s.apply(v, V)
    if field is Field.FLOAT64 and not (math.isfinite(nv) and math.isfinite(nV)):
        raise NumericOverflowError(f"non-finite velocities after collision: ({nv}, {nV})")
    return VelocityPair(nv, nV)


def collide_blocks_mass_form(state: VelocityPair, m, M) -> VelocityPair:
    """Same collision written with the two masses instead of their ratio.

    The small block's own-velocity coefficient is (m - M)/(m + M); with the
    opposite sign momentum is not conserved.
    """
    v, V = state.v, state.V
    total = m + M
    return VelocityPair(
        (m - M) / total * v + 2 * M / total * V,
        2 * m / total * v + (M - m) / total * V,
    )


def reflect_wall(state: VelocityPair) -> VelocityPair:
    """Small block bounces off the immovable wall."""
    return VelocityPair(-state.v, state.V)


def matrix_S(ratio: MassRatio, field: Field = Field.RATIONAL) -> Matrix2:
    """Block/block collision matrix (det = -1)."""
    return _collision_coefficients(ratio, field)


def matrix_A(field: Field = Field.RATIONAL) -> Matrix2:
    """Wall reflection matrix diag(-1, 1)."""
    one = field.scalar(1)
    zero = field.scalar(0)
    return Matrix2(-one, zero, zero, one)


def matrix_M(ratio: MassRatio, field: Field = Field.RATIONAL) -> Matrix2:
    """One collision followed by one wall bounce: A @ S."""
    return matrix_A(field) @ matrix_S(ratio, field)


def matrix_Mprime(ratio: MassRatio, field: Field = Field.FLOAT64) -> Matrix2:
    """A @ S in (u, V) coordinates, a rotation by 2*atan(sqrt(alpha)).

    In the rational field this only exists when alpha is the square of a
    rational; otherwise ValueError.
    """
    p, q = ratio.p, ratio.q
    c = field.scalar(Fraction(q - p, p + q))
    # 2*sqrt(a)/(1+a) = sqrt(4pq)/(p+q)
    s = field.sqrt(Fraction(4 * p * q, (p + q) ** 2))
    return Matrix2(c, -s, s, c)


def to_phase(state: VelocityPair, ratio: MassRatio) -> PhasePoint:
    field = _field_of_pair(state)
    r = field.sqrt(ratio.alpha)
    return PhasePoint(state.v * r, state.V)


def from_phase(point: PhasePoint, ratio: MassRatio) -> VelocityPair:
    field = Field.FLOAT64 if isinstance(point.u, float) or isinstance(point.V, float) else Field.RATIONAL
    r = field.sqrt(ratio.alpha)
    return VelocityPair(point.u / r, point.V)
