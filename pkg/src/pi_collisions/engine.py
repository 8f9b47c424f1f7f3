"""Alternating collision event loop.

Positions are never simulated.  With the small block between the wall and
the big block, the next event is decided by velocities alone:

* ``V < v``: the big block closes on the small one, block/block collision;
* otherwise ``v < 0``: the small block hits the wall;
* otherwise both recede with ``V >= v`` and nothing else can happen.

A block/block collision reverses ``v - V`` and a wall bounce leaves ``v > 0``,
so events strictly alternate.  Grazing contact ``v == V`` is not a collision.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .backends import Backend, DriftReport, ExactScalar, make_backend
from .errors import PiCollisionsError, RunawayError
from .kinematics import MassRatio, VelocityPair

DEFAULT_MAX_EVENTS = 10**8

TRACE_COLUMNS = ("index", "kind", "v", "V", "abs_v", "abs_V", "u", "energy")


class EventKind(enum.Enum):
    BLOCK_BLOCK = "block-block"
    BLOCK_WALL = "block-wall"


class Termination(enum.Enum):
    SEPARATING = "separating"


@dataclass(frozen=True)
class CollisionEvent:
    index: int
    kind: EventKind
    post_v: Union[ExactScalar, float]
    post_V: Union[ExactScalar, float]

    @property
    def post_speed_v(self):
        return abs(self.post_v)

    @property
    def post_speed_V(self):
        return abs(self.post_V)


@dataclass(frozen=True)
class SimulationResult:
    ratio: MassRatio
    backend: str
    count: int
    initial_state: VelocityPair
    final_state: VelocityPair
    drift: DriftReport
    termination: Termination = Termination.SEPARATING
    trace: Optional[tuple] = None
    final_numerator_digits: Optional[int] = field(default=None, compare=False)


class TraceUnavailableError(PiCollisionsError, ValueError):
    pass


def run(ratio: MassRatio, backend: Union[str, Backend] = "auto", record_trace: bool = False,
        max_events: int = DEFAULT_MAX_EVENTS, initial_speed=1) -> SimulationResult:
    """Simulate from (v, V) = (0, -initial_speed) until the blocks separate.

    ``backend`` is a name accepted by :func:`make_backend` or a backend
    instance.  Without ``record_trace`` the backend's allocation-free
    counting loop is used.
    """
    if max_events < 1:
        raise ValueError("max_events must be positive")
    if isinstance(backend, str):
        backend = make_backend(backend, ratio)
    start = backend.initial(initial_speed)

    if record_trace:
        n, final, events = _traced_loop(backend, start, max_events)
    else:
        n, final = backend.count(start, max_events)
        events = None

    drift = backend.measure_drift(start, final)
    if events is not None:
        drift = _with_trace_conservation(drift, backend, start, events)
    digits = backend.numerator_digits(final) if hasattr(backend, "numerator_digits") else None
    return SimulationResult(
        ratio=ratio,
        backend=backend.name,
        count=n,
        initial_state=backend.velocities(start),
        final_state=backend.velocities(final),
        drift=drift,
        trace=events,
        final_numerator_digits=digits,
    )


def _traced_loop(backend: Backend, state, max_events: int):
    events = []
    n = 0
    while True:
        if backend.approaching(state):
            kind = EventKind.BLOCK_BLOCK
            state = backend.collide(state)
        elif backend.toward_wall(state):
            kind = EventKind.BLOCK_WALL
            state = backend.reflect(state)
        else:
            break
        n += 1
        backend.check(state, n)
        v, V = backend.scalars(state)
        events.append(CollisionEvent(n, kind, v, V))
        if n >= max_events and (backend.approaching(state) or backend.toward_wall(state)):
            raise RunawayError(n)
    return n, state, tuple(events)


def _exact_trace_conservation(drift: DriftReport, backend, start, events) -> DriftReport:
    # momentum numerators over the running denominator q*scale*base**k, kept unreduced
    p, q, base = backend.ratio.p, backend.ratio.q, backend.base
    prev_v, prev_V = start.v_num, start.V_num
    prev_num = p * prev_v + q * prev_V
    den = q * start.scale
    lo = hi = (prev_num, den)
    worst = Fraction(0)
    for ev in events:
        v, V = ev.post_v.numerator, ev.post_V.numerator
        num = p * v + q * V
        if ev.kind is EventKind.BLOCK_BLOCK:
            expected = prev_num * base
            den *= base
            if num != expected:
                # scale alpha*|v| + |V| of the pre-collision state, over the same denominator
                scale = Fraction(p * abs(prev_v) + q * abs(prev_V), den // base)
                worst = max(worst, Fraction(abs(num - expected), den) / scale)
        if num * lo[1] < lo[0] * den:
            lo = (num, den)
        if num * hi[1] > hi[0] * den:
            hi = (num, den)
        prev_v, prev_V, prev_num = v, V, num
    return DriftReport(drift.energy_rel_drift, (Fraction(*lo), Fraction(*hi)), worst)


def _with_trace_conservation(drift: DriftReport, backend: Backend, start, events) -> DriftReport:
    if backend.name == "exact":
        return _exact_trace_conservation(drift, backend, start, events)
    alpha = float(backend.ratio)
    prev_v, prev_V = start.v, start.V
    p_prev = alpha * prev_v + prev_V
    lo = hi = p_prev
    worst = 0.0
    for ev in events:
        v, V = ev.post_v, ev.post_V
        p = alpha * v + V
        if ev.kind is EventKind.BLOCK_BLOCK:
            scale = alpha * abs(prev_v) + abs(prev_V)
            if scale:
                worst = max(worst, abs(p - p_prev) / scale)
        lo, hi = min(lo, p), max(hi, p)
        prev_v, prev_V, p_prev = v, V, p
    return DriftReport(drift.energy_rel_drift, (lo, hi), worst)


@contextmanager
def _unbounded_int_str():
    # exact numerators pass CPython's default 4300-digit str() limit quickly
    getter = getattr(sys, "get_int_max_str_digits", None)
    if getter is None:
        yield
        return
    old = getter()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(old)


def _ratio_str(num: int, den: int) -> str:
    g = math.gcd(num, den)
    return f"{num // g}/{den // g}"


def _exact_rows(result: SimulationResult):
    p, q = result.ratio.p, result.ratio.q
    sqrt_alpha = math.sqrt(float(result.ratio))

    def row(index, kind, a, b, den):
        v_str, V_str = _ratio_str(a, den), _ratio_str(b, den)
        energy = _ratio_str(p * a * a + q * b * b, q * den * den)
        return (str(index), kind, v_str, V_str, v_str.lstrip("-"), V_str.lstrip("-"),
                repr(a / den * sqrt_alpha), energy)

    s0 = result.initial_state
    den0 = s0.v.denominator * s0.V.denominator
    yield row(0, "initial", s0.v.numerator * s0.V.denominator, s0.V.numerator * s0.v.denominator, den0)
    for ev in result.trace:
        yield row(ev.index, ev.kind.value, ev.post_v.numerator, ev.post_V.numerator, ev.post_v.denominator)


def _float_rows(result: SimulationResult):
    alpha = float(result.ratio)
    sqrt_alpha = math.sqrt(alpha)

    def row(index, kind, v, V):
        return (str(index), kind, repr(v), repr(V), repr(abs(v)), repr(abs(V)),
                repr(v * sqrt_alpha), repr(alpha * v * v + V * V))

    yield row(0, "initial", result.initial_state.v, result.initial_state.V)
    for ev in result.trace:
        yield row(ev.index, ev.kind.value, ev.post_v, ev.post_V)


def trace_csv(result: SimulationResult) -> list[tuple[str, ...]]:
    """Trace rows (header first) in the fixed column order.

    Row 0 is the initial state, with kind ``initial``.  Exact runs render
    numbers as ``p/q`` in lowest terms, float runs as shortest round-trip
    decimals.  ``u`` is always a float rendering.
    """
    if result.trace is None:
        raise TraceUnavailableError("run was not recorded; pass record_trace=True")
    if result.backend == "exact":
        with _unbounded_int_str():
            return [TRACE_COLUMNS, *_exact_rows(result)]
    return [TRACE_COLUMNS, *_float_rows(result)]


def write_trace_csv(result: SimulationResult, stream: io.TextIOBase) -> int:
    """Write the trace to an open text stream; returns the number of data rows."""
    rows = trace_csv(result)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerows(rows)
    return len(rows) - 1
