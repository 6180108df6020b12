"""Concrete specification families.

* Binary autoregressions on {-1, +1}: ``P(+1 | w) = q(theta0 + sum_k theta_k w_{-k})``
  for an increasing link ``q``.
* Finite-order tables, the Markov special case.
* The D-ary expansion bridge, which reads a digit chain as a Markov chain
  on [0, 1).
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta

from .core import SpecificationKernel, ThresholdSchedule
from .engine import DEFAULT_MAX_DEPTH, sample_window
from .errors import InfeasibleK0, TailUnavailable

__all__ = [
    "LinearLink",
    "LogisticLink",
    "CustomLink",
    "PowerTail",
    "GeometricTail",
    "CallableTail",
    "BinaryARSpec",
    "FiniteOrderSpec",
    "DaryState",
    "ar_remainder",
    "ar_minorant",
    "ar_schedule",
    "finite_order_minorant",
    "dary_step",
    "dary_trajectory",
    "dary_perfect_marginal",
]


# -- links ---------------------------------------------------------------


class LinearLink:
    """``q(x) = (1 + x) / 2``; needs ``|theta0| + sum |theta_k| < 1``."""

    name = "linear"

    def __call__(self, x):
        return (1.0 + x) / 2.0

    def derivative_extrema(self, lo, hi):
        return 0.5, 0.5


class LogisticLink:
    """``q(x) = e^x / (2 cosh x) = 1 / (1 + e^{-2x})``."""

    name = "logistic"

    def __call__(self, x):
        return 1.0 / (1.0 + math.exp(-2.0 * x))

    def derivative(self, x):
        q = self(x)
        return 2.0 * q * (1.0 - q)

    def derivative_extrema(self, lo, hi):
        # q' is even and decreasing in |x|
        nearest = min(max(0.0, lo), hi)
        farthest = lo if abs(lo) >= abs(hi) else hi
        return self.derivative(farthest), self.derivative(nearest)


class CustomLink:
    """User link: ``q`` plus a routine giving ``(min q', max q')`` on an interval."""

    name = "custom"

    def __init__(self, q, derivative_extrema):
        self._q = q
        self._extrema = derivative_extrema

    def __call__(self, x):
        return float(self._q(x))

    def derivative_extrema(self, lo, hi):
        lo_d, hi_d = self._extrema(lo, hi)
        return float(lo_d), float(hi_d)


_LINKS = {"linear": LinearLink, "logistic": LogisticLink}


# -- coefficient tails -----------------------------------------------------


@dataclass(frozen=True)
class PowerTail:
    """``theta_k = scale * k**(-exponent)`` for ``k >= start``."""

    scale: float
    exponent: float
    start: int

    def __post_init__(self):
        if self.exponent <= 1.0:
            raise ValueError("power tail needs exponent > 1 to be summable")

    def coefficient(self, k):
        return self.scale * float(k) ** (-self.exponent) if k >= self.start else 0.0

    def remainder(self, k):
        """``sum_{m > k, m >= start} |theta_m|`` (Hurwitz zeta)."""
        first = max(int(k) + 1, self.start)
        return abs(self.scale) * float(zeta(self.exponent, first))


@dataclass(frozen=True)
class GeometricTail:
    """``theta_k = scale * ratio**k`` for ``k >= start``."""

    scale: float
    ratio: float
    start: int

    def __post_init__(self):
        if not 0.0 < self.ratio < 1.0:
            raise ValueError("ratio must lie in (0, 1)")

    def coefficient(self, k):
        return self.scale * self.ratio ** k if k >= self.start else 0.0

    def remainder(self, k):
        first = max(int(k) + 1, self.start)
        return abs(self.scale) * self.ratio ** first / (1.0 - self.ratio)


@dataclass(frozen=True)
class CallableTail:
    """Coefficients from a function; ``remainder`` may be missing."""

    coefficient_fn: object
    start: int
    remainder_fn: object = None

    def coefficient(self, k):
        return float(self.coefficient_fn(k)) if k >= self.start else 0.0

    def remainder(self, k):
        if self.remainder_fn is None:
            raise TailUnavailable("tail has no closed-form remainder")
        return float(self.remainder_fn(max(int(k), self.start - 1)))


# -- binary autoregression -------------------------------------------------


class BinaryARSpec(SpecificationKernel):
    """Binary autoregression with minorants in closed form.

    Parameters
    ----------
    theta0 : float
    theta : sequence of float
        Explicit coefficients ``theta_1 .. theta_L``.
    tail : PowerTail, GeometricTail or CallableTail, optional
        Coefficients from index ``start > L`` on.
    link : {"linear", "logistic"} or link object
    k0 : int, optional
        Depth at which the schedule switches to ``1 - 2 C+ r_k``; by default
        the smallest admissible one.
    k_enum : int
        Largest depth at which ``a_k`` is computed by enumerating histories.
    """

    def __init__(self, theta0=0.0, theta=(), tail=None, link="linear", k0=None, k_enum=16):
        super().__init__((-1, 1))
        self.theta0 = float(theta0)
        self.theta = tuple(float(x) for x in theta)
        self.tail = tail
        self.link = _LINKS[link]() if isinstance(link, str) else link
        self.k0 = k0
        self.k_enum = int(k_enum)
        if tail is not None and tail.start <= len(self.theta):
            raise ValueError("tail must start after the explicit coefficients")
        r0 = self.remainder(0)
        if not math.isfinite(r0):
            raise ValueError("coefficients must be summable")
        if isinstance(self.link, LinearLink) and abs(self.theta0) + r0 >= 1.0:
            raise ValueError("linear link needs |theta0| + sum |theta_k| < 1")

    def __repr__(self):
        return (f"BinaryARSpec(theta0={self.theta0}, theta={self.theta}, "
                f"tail={self.tail}, link={self.link.name})")

    def coefficient(self, k):
        """``theta_k`` for ``k >= 1``."""
        if k <= len(self.theta):
            return self.theta[k - 1]
        if self.tail is not None:
            return self.tail.coefficient(k)
        return 0.0

    def remainder(self, k):
        """``r_k = sum_{m > k} |theta_m|``."""
        k = int(k)
        if k < 0:
            raise ValueError("k must be >= 0")
        explicit = math.fsum(abs(x) for x in self.theta[k:])
        if self.tail is None:
            return explicit
        return explicit + self.tail.remainder(max(k, len(self.theta)))

    def _drift(self, k, w):
        s = self.theta0
        for m in range(1, k + 1):
            s += self.coefficient(m) * w[m - 1]
        return s

    def minorant(self, k, g, w):
        drift = self._drift(k, w)
        r = self.remainder(k)
        if g == 1:
            return self.link(drift - r)
        if g == -1:
            return 1.0 - self.link(drift + r)
        raise ValueError(f"symbol {g!r} not in {{-1, 1}}")

    def bracket_constants(self):
        """``(C-, C+)``: extrema of ``q'`` over ``[theta0 - r_0, theta0 + r_0]``."""
        r0 = self.remainder(0)
        return self.link.derivative_extrema(self.theta0 - r0, self.theta0 + r0)

    def exact_threshold(self, k):
        """``a_k = min_w sum_g a_k(g|w)`` by enumerating all ``2**k`` histories."""
        if k > self.k_enum:
            raise ValueError(f"depth {k} exceeds k_enum={self.k_enum}")
        return min(
            self.level_mass(k, w) for w in itertools.product((-1, 1), repeat=k)
        )

    def schedule(self):
        return ar_schedule(self)


def ar_remainder(spec, k):
    return spec.remainder(k)


def ar_minorant(spec, k, g, w):
    return spec.minorant(k, g, tuple(w))


def ar_schedule(spec):
    """Threshold schedule for a binary autoregression.

    Linear link: ``a*_k = 1 - r_k`` exactly. Otherwise, with ``C+`` the
    largest slope of the link on ``[theta0 - r_0, theta0 + r_0]``:
    ``a*_k = min(a_k, 1 - 2 C+ r_{k0})`` for ``k < k0`` (``a_k`` enumerated)
    and ``a*_k = 1 - 2 C+ r_k`` from ``k0`` on.
    """
    if isinstance(spec.link, LinearLink):
        def tail(ks):
            return np.array([1.0 - spec.remainder(int(k)) for k in ks])

        return ThresholdSchedule(tail=tail, name="binary-ar(linear)")

    _, c_plus = spec.bracket_constants()
    k0 = spec.k0
    if k0 is None:
        k0 = next(
            (k for k in range(spec.k_enum + 1) if 2.0 * c_plus * spec.remainder(k) < 1.0),
            None,
        )
        if k0 is None:
            raise InfeasibleK0(f"2 C+ r_k >= 1 for every k <= k_enum={spec.k_enum}")
    elif k0 > spec.k_enum or 2.0 * c_plus * spec.remainder(k0) >= 1.0:
        raise InfeasibleK0(f"k0={k0} is not admissible")
    cut = 1.0 - 2.0 * c_plus * spec.remainder(k0)
    prefix = [min(spec.exact_threshold(k), cut) for k in range(k0)]

    def tail(ks):
        return np.array([1.0 - 2.0 * c_plus * spec.remainder(int(k)) for k in ks])

    return ThresholdSchedule(prefix, tail=tail, name=f"binary-ar({spec.link.name}, k0={k0})")


# -- finite order ------------------------------------------------------------


class FiniteOrderSpec(SpecificationKernel):
    """Specification whose kernel depends on the last ``order`` symbols only.

    Parameters
    ----------
    alphabet : sequence
    order : int
    table : array_like, shape (len(alphabet)**order, len(alphabet))
        Row ``c`` is the law of the next symbol given context ``c``. Context
        indices read the history most recent first, in base ``|G|``: the
        context ``(w_{-1}, ..., w_{-m})`` has index
        ``sum_j idx(w_{-j}) * |G|**(m - j)``.
    """

    def __init__(self, alphabet, order, table):
        super().__init__(alphabet)
        self.order = int(order)
        n = len(self.alphabet)
        table = np.asarray(table, dtype=np.float64)
        if table.shape != (n**self.order, n):
            raise ValueError(f"table must have shape {(n**self.order, n)}")
        if np.any(table < 0) or not np.allclose(table.sum(axis=1), 1.0, atol=1e-12):
            raise ValueError("every table row must be a probability vector")
        self.table = table
        shaped = table.reshape((n,) * self.order + (n,))
        # _mins[k] has shape (n**k, n): minimum over the m - k oldest symbols
        self._mins = [
            shaped.min(axis=tuple(range(k, self.order))).reshape(n**k, n)
            if k < self.order else table
            for k in range(self.order + 1)
        ]

    @classmethod
    def from_dict(cls, alphabet, order, rows):
        """Build from ``{context_tuple: {symbol: prob}}`` (context most recent first)."""
        alphabet = tuple(alphabet)
        n = len(alphabet)
        table = np.zeros((n**order, n))
        for ctx in itertools.product(alphabet, repeat=order):
            row = rows[tuple(ctx)]
            table[cls._context_index(alphabet, ctx)] = [row.get(g, 0.0) for g in alphabet]
        return cls(alphabet, order, table)

    @staticmethod
    def _context_index(alphabet, ctx):
        n = len(alphabet)
        idx = 0
        for g in ctx:
            idx = idx * n + alphabet.index(g)
        return idx

    def context_index(self, ctx):
        idx = 0
        n = len(self.alphabet)
        for g in ctx:
            idx = idx * n + self._index[g]
        return idx

    def probability(self, g, ctx):
        """``P(g | ctx)`` for a context of length ``order``."""
        return float(self.table[self.context_index(ctx[: self.order]), self._index[g]])

    def minorant(self, k, g, w):
        k = min(int(k), self.order)
        return float(self._mins[k][self.context_index(tuple(w)[:k]), self._index[g]])

    def _masses(self, k, w):
        k = min(int(k), self.order)
        return tuple(float(x) for x in self._mins[k][self.context_index(tuple(w)[:k])])

    def schedule(self):
        """``a*_k = min_w sum_g a_k(g|w)`` for ``k < order``, then 1."""
        values = []
        for k in range(self.order):
            n = len(self.alphabet)
            a_k = min(math.fsum(self._mins[k][c]) for c in range(n**k))
            if a_k >= 1.0:
                break
            values.append(a_k)
        return ThresholdSchedule.degenerate(values)


def finite_order_minorant(spec, k, g, w):
    return spec.minorant(k, g, w)


# -- D-ary bridge ------------------------------------------------------------


@dataclass(frozen=True)
class DaryState:
    """Point of [0, 1) known to resolution ``base**-resolution``.

    ``digits`` holds the most recent digits, most recent first; the point is
    ``sum_j digits[j-1] * base**-j`` and the state stands for the interval
    ``[left, left + base**-resolution)``.
    """

    base: int
    resolution: int
    digits: tuple

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        if len(self.digits) != self.resolution:
            raise ValueError("need exactly `resolution` digits")
        if any(not 0 <= d < self.base for d in self.digits):
            raise ValueError("digits must lie in 0..base-1")

    @classmethod
    def zero(cls, base, resolution):
        return cls(base, resolution, (0,) * resolution)

    @property
    def cell(self):
        """Integer ``left * base**resolution``."""
        idx = 0
        for d in self.digits:
            idx = idx * self.base + d
        return idx

    @property
    def width(self):
        return float(self.base) ** -self.resolution

    @property
    def left(self):
        return self.cell * self.width

    @property
    def interval(self):
        left = self.left
        return left, left + self.width


def dary_step(state, g):
    """Append digit ``g``: the point moves from ``x`` to ``(g + x) / base``.

    The oldest digit drops out, so the new point is exact at the state's
    resolution.
    """
    if not 0 <= g < state.base:
        raise ValueError("digit out of range")
    digits = (int(g),) + state.digits[:-1] if state.resolution else ()
    return DaryState(state.base, state.resolution, digits)


def dary_trajectory(digits, base, resolution, initial=None):
    """States after feeding ``digits`` (oldest first) one at a time."""
    state = initial or DaryState.zero(base, resolution)
    out = []
    for g in digits:
        state = dary_step(state, g)
        out.append(state)
    return out


def dary_perfect_marginal(kernel, schedule, resolution, field, base=None,
                          max_depth=DEFAULT_MAX_DEPTH):
    """Perfect sample of the D-ary chain at resolution ``resolution``.

    Samples the digit process on ``[-resolution, -1]`` and maps it to the
    interval ``[X, X + base**-resolution)`` with ``X = sum_j x_{-j} base**-j``.
    The kernel's alphabet must be ``0..base-1``.
    """
    base = len(kernel.alphabet) if base is None else base
    if tuple(kernel.alphabet) != tuple(range(base)):
        raise ValueError("digit alphabet must be 0..base-1 in order")
    if resolution == 0:
        return DaryState(base, 0, ())
    sample = sample_window(-resolution, -1, field, kernel, schedule, max_depth)
    return DaryState(base, resolution, tuple(reversed(sample.symbols)))
