"""Exception hierarchy shared by all modules."""


class RegenSimError(Exception):
    """Base class for every error raised by this package."""


class ScheduleExhausted(RegenSimError):
    """A finite threshold schedule was queried past its last value."""


class DominanceViolation(RegenSimError):
    """A uniform fell outside the layered partition at the allowed depth.

    Raised when the minorants supplied by a kernel do not dominate the
    threshold schedule, i.e. ``sum_g a_k(g|w) < a*_k`` for some history.
    """


class Aborted(RegenSimError):
    """The backward search for a regeneration time exceeded the abort depth."""

    def __init__(self, depth, record=None):
        super().__init__(f"regeneration time deeper than abort depth {depth}")
        self.depth = depth
        self.record = record


class BoundVacuous(RegenSimError):
    """The impatience bound is useless because its tail sum is >= 1."""


class TailUnavailable(RegenSimError):
    """No closed form for the coefficient remainder r_k is available."""


class InfeasibleK0(RegenSimError):
    """No admissible switch index k0 exists within the enumeration budget."""


class Reducible(RegenSimError):
    """The transition operator has no unique stationary law."""


class ConfigError(RegenSimError):
    """A run configuration is malformed."""
