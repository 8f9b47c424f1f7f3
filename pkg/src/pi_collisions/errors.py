"""Exception hierarchy shared by the simulator, the predictors and the CLI."""

from __future__ import annotations


class PiCollisionsError(Exception):
    """Base class for every error raised by this package."""


class NumericOverflowError(PiCollisionsError, ArithmeticError):
    """A float64 computation produced NaN or infinity."""


class ResourceBudgetError(PiCollisionsError, MemoryError):
    """An exact numerator outgrew the configured digit budget."""

    def __init__(self, collision_index: int, digits: int, max_digits: int):
        self.collision_index = collision_index
        self.digits = digits
        self.max_digits = max_digits
        super().__init__(
            f"exact numerator reached ~{digits} digits at collision {collision_index} "
            f"(budget {max_digits})"
        )


class BackendCutoffError(PiCollisionsError, ValueError):
    """The exact backend refuses a mass ratio below its feasibility cutoff."""


class RunawayError(PiCollisionsError, RuntimeError):
    """The event loop hit ``max_events`` without reaching a terminal state."""

    def __init__(self, events: int):
        self.events = events
        super().__init__(f"no termination after {events} events")


class AmbiguousBoundaryError(PiCollisionsError, ArithmeticError):
    """Extended precision could not decide which side of an integer the count lies."""

    def __init__(self, interval: tuple[str, str]):
        self.interval = interval
        super().__init__(f"cannot resolve integer boundary within [{interval[0]}, {interval[1]}]")
