"""Specification kernels, threshold schedules and the indexed uniform field.

Histories are always passed most-recent-first: ``w[0]`` is the symbol one
step in the past, ``w[1]`` two steps in the past, and so on.
"""

import math
from functools import lru_cache

import numpy as np

from .errors import ScheduleExhausted

__all__ = [
    "UNBOUNDED",
    "UniformField",
    "ArrayField",
    "ThresholdSchedule",
    "SpecificationKernel",
    "FunctionKernel",
    "schedule_level",
    "uniform_at",
]

#: Level returned when a uniform lies above every queryable threshold.
#: Large enough that ``n - UNBOUNDED`` is below any reachable time index.
UNBOUNDED = 1 << 62

_MASK64 = (1 << 64) - 1
_MASK256 = (1 << 256) - 1
_COUNTER_OFFSET = 1 << 255
_TWO_M53 = 2.0**-53


class UniformField:
    """Deterministic map from signed time index to a uniform in [0, 1).

    The value at index ``i`` is lane ``i & 3`` of the Philox4x64-10 block
    with counter ``(i >> 2) + 2**255`` under key ``seed``; the top 53 bits
    of the 64-bit word give the mantissa. Lookups are stateless, so any set
    of indices can be read in any order and always yields the same values.

    Parameters
    ----------
    seed : int
        Key of the field, reduced modulo 2**64.
    """

    lowest_index = None

    def __init__(self, seed):
        self.seed = int(seed) & _MASK64

    def __repr__(self):
        return f"UniformField(seed={self.seed})"

    def __eq__(self, other):
        return isinstance(other, UniformField) and other.seed == self.seed

    def __hash__(self):
        return hash(("UniformField", self.seed))

    def raw(self, lo, hi):
        """64-bit words for indices ``lo..hi`` inclusive."""
        lo, hi = int(lo), int(hi)
        if hi < lo:
            return np.empty(0, dtype=np.uint64)
        first, last = lo >> 2, hi >> 2
        counter = (first + _COUNTER_OFFSET - 1) & _MASK256
        gen = np.random.Philox(key=self.seed, counter=counter)
        words = gen.random_raw(4 * (last - first + 1))
        start = lo - 4 * first
        return words[start : start + hi - lo + 1]

    def uniforms(self, lo, hi):
        """Uniforms for indices ``lo..hi`` inclusive, as a float64 array."""
        return (self.raw(lo, hi) >> np.uint64(11)).astype(np.float64) * _TWO_M53

    def at(self, i):
        return float(self.uniforms(i, i)[0])


class ArrayField:
    """A uniform field backed by an explicit finite array.

    Index ``start + j`` maps to ``values[j]``. Reading outside the stored
    range raises ``IndexError``; samplers read ``lowest_index`` to avoid
    prefetching below it.
    """

    def __init__(self, values, start=0):
        self.values = np.asarray(values, dtype=np.float64)
        if self.values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if np.any((self.values < 0) | (self.values >= 1)):
            raise ValueError("uniforms must lie in [0, 1)")
        self.start = int(start)
        self.lowest_index = self.start
        self.highest_index = self.start + len(self.values) - 1

    def uniforms(self, lo, hi):
        lo, hi = int(lo), int(hi)
        if hi < lo:
            return np.empty(0)
        if lo < self.start or hi > self.highest_index:
            raise IndexError(
                f"indices [{lo}, {hi}] outside stored range "
                f"[{self.start}, {self.highest_index}]"
            )
        return self.values[lo - self.start : hi - self.start + 1].copy()

    def at(self, i):
        return float(self.uniforms(i, i)[0])


def uniform_at(field, i):
    """The uniform ``U_i`` of ``field``."""
    return field.at(i)


class ThresholdSchedule:
    """Non-decreasing sequence of thresholds ``a*_0, a*_1, ...`` in (0, 1].

    The schedule is an explicit ``prefix`` followed by an optional ``tail``:
    a constant, or a vectorised callable mapping an integer array of depths
    to threshold values. Without a tail the schedule is finite. A value of
    exactly 1.0 marks the start of a degenerate tail: every later value is
    1.0 and conditions at those depths hold for every uniform.

    Values are materialised lazily and cached; the cache never changes
    observable results.

    Parameters
    ----------
    prefix : sequence of float
        Leading values ``a*_0 .. a*_{n-1}``.
    tail : float or callable, optional
        Continuation for depths ``k >= len(prefix)``.
    limit : float
        Declared supremum of the schedule (1.0 for a valid sampling schedule).
    max_depth : int, optional
        Largest queryable depth; ``None`` means unbounded.
    name : str, optional
        Label used in reports.
    """

    #: Depth past which an unresolved scan reports ``UNBOUNDED``.
    scan_limit = 1 << 22

    def __init__(self, prefix=(), tail=None, *, limit=1.0, max_depth=None, name=None):
        prefix = np.asarray(prefix, dtype=np.float64).reshape(-1)
        if tail is None and len(prefix) == 0:
            raise ValueError("schedule needs a prefix or a tail")
        if tail is not None and not callable(tail):
            tail = float(tail)
            if not 0.0 < tail <= 1.0:
                raise ValueError("constant tail must lie in (0, 1]")
        self._tail = tail
        self.limit = float(limit)
        self.max_depth = None if max_depth is None else int(max_depth)
        self.name = name
        self._table = np.empty(0)
        self.degenerate_from = None
        self._append(prefix, 0)
        self._prefix_len = len(prefix)
        if len(self._table) == 0:
            self._grow(1)
        if not self._table[0] > 0.0:
            raise ValueError("a*_0 must be positive")

    def __repr__(self):
        label = self.name or "custom"
        first = repr(self._table[0]) if len(self._table) else "?"
        return f"ThresholdSchedule({label}, a*_0={first})"

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, value):
        """``a*_k = value`` for every k; supremum is ``value``."""
        return cls(tail=float(value), limit=float(value), name=f"constant({value})")

    @classmethod
    def geometric(cls, ratio=0.5, scale=1.0):
        """``a*_k = 1 - scale * ratio**(k+1)``."""
        if not 0.0 < ratio < 1.0:
            raise ValueError("ratio must lie in (0, 1)")

        def tail(k):
            return 1.0 - scale * ratio ** (k + 1.0)

        return cls(tail=tail, name=f"geometric(ratio={ratio}, scale={scale})")

    @classmethod
    def power(cls, exponent=2.0, scale=0.5):
        """``a*_k = 1 - scale * (k+1)**(-exponent)``."""
        if exponent <= 0:
            raise ValueError("exponent must be positive")

        def tail(k):
            return 1.0 - scale * (k + 1.0) ** (-exponent)

        return cls(tail=tail, name=f"power(exponent={exponent}, scale={scale})")

    @classmethod
    def degenerate(cls, prefix=()):
        """``prefix`` followed by the degenerate tail 1.0."""
        return cls(prefix, tail=1.0, name=f"degenerate({list(prefix)})")

    @classmethod
    def explicit(cls, values):
        """A finite schedule; queries past the end raise ``ScheduleExhausted``."""
        return cls(values, name="explicit")

    @classmethod
    def from_function(cls, func, name=None):
        """Schedule given by a vectorised ``func(k_array) -> values``."""
        return cls(tail=func, name=name or getattr(func, "__name__", "function"))

    def lowered(self, factor):
        """Schedule with gaps to one multiplied by ``factor >= 1``.

        Gives ``1 - factor * (1 - a*_k)``, a pointwise lower bound that keeps
        the degenerate tail where this schedule has one.
        """
        if factor < 1.0:
            raise ValueError("factor must be >= 1")

        def tail(k):
            return 1.0 - factor * (1.0 - self.values_at(k))

        return ThresholdSchedule(
            tail=tail, limit=self.limit, max_depth=self.max_depth,
            name=f"lowered({self.name}, {factor})",
        )

    # -- materialisation ------------------------------------------------

    @property
    def is_finite(self):
        return self._tail is None

    @property
    def queryable_length(self):
        """Number of queryable values, or ``None`` when unbounded."""
        if self._tail is None:
            return self._prefix_len
        if self.max_depth is not None:
            return self.max_depth + 1
        return None

    def _append(self, values, start):
        if len(values) == 0:
            return
        if np.any(~np.isfinite(values)) or np.any(values <= 0.0) or np.any(values > 1.0):
            raise ValueError(f"schedule values from depth {start} leave (0, 1]")
        prev = np.concatenate([self._table[-1:] if len(self._table) else values[:1], values[:-1]])
        if np.any(values < prev):
            bad = start + int(np.argmax(values < prev))
            raise ValueError(f"schedule decreases at depth {bad}")
        ones = np.flatnonzero(values == 1.0)
        if ones.size:
            first = int(ones[0])
            values = np.concatenate([values[:first], np.ones(len(values) - first)])
            if self.degenerate_from is None:
                self.degenerate_from = start + first
        self._table = np.concatenate([self._table, values])

    def _grow(self, n):
        """Make sure at least ``n`` values are materialised (if queryable)."""
        have = len(self._table)
        if n <= have:
            return
        limit = self.queryable_length
        if limit is not None:
            n = min(n, limit)
        if n <= have:
            return
        if self.degenerate_from is not None:
            self._table = np.concatenate([self._table, np.ones(n - have)])
            return
        if self._tail is None:
            return
        if isinstance(self._tail, float):
            self._append(np.full(n - have, self._tail), have)
            return
        ks = np.arange(have, n, dtype=np.float64)
        vals = np.asarray(self._tail(ks), dtype=np.float64).reshape(-1)
        if vals.shape != ks.shape:
            raise ValueError("schedule tail must return one value per depth")
        self._append(vals, have)

    def values(self, n):
        """The first ``n`` values ``a*_0 .. a*_{n-1}``."""
        self._grow(n)
        if len(self._table) < n:
            raise ScheduleExhausted(f"schedule has only {len(self._table)} values")
        return self._table[:n].copy()

    def value(self, k):
        """``a*_k``, with the convention ``a*_{-1} = 0``."""
        k = int(k)
        if k == -1:
            return 0.0
        if k < -1:
            raise ValueError("depth must be >= -1")
        return float(self.values(k + 1)[k])

    def values_at(self, ks):
        """Vectorised ``a*_k`` for an integer array of depths ``k >= 0``."""
        ks = np.asarray(ks)
        if ks.size == 0:
            return np.empty(ks.shape)
        idx = ks.astype(np.int64)
        self._grow(int(idx.max()) + 1)
        if len(self._table) <= idx.max():
            raise ScheduleExhausted(f"schedule has only {len(self._table)} values")
        return self._table[idx]

    def beta(self, n):
        """Products ``beta_m = a*_0 * ... * a*_m`` for ``m = 0 .. n``."""
        return np.cumprod(self.values(n + 1))

    # -- level lookup ---------------------------------------------------

    def levels(self, u, cap=None):
        """Vectorised version of ``schedule_level``.

        Returns an int64 array; entries above every queryable threshold,
        or above ``cap``, are ``UNBOUNDED``.
        """
        u = np.asarray(u, dtype=np.float64)
        if np.any((u < 0) | (u >= 1)):
            raise ValueError("uniforms must lie in [0, 1)")
        bound = self.max_depth if cap is None else (
            cap if self.max_depth is None else min(cap, self.max_depth))
        out = np.full(u.shape, UNBOUNDED, dtype=np.int64)
        pending = np.ones(u.shape, dtype=bool)
        n = max(len(self._table), 8)
        while True:
            self._grow(n)
            table = self._table
            idx = np.searchsorted(table, u[pending], side="right")
            resolved = idx < len(table)
            where = np.flatnonzero(pending)
            out[where[resolved]] = idx[resolved]
            pending[where[resolved]] = False
            if not pending.any():
                break
            have = len(table)
            if self._tail is None:
                raise ScheduleExhausted(
                    f"uniform {u[pending].max()!r} exceeds the last threshold "
                    f"{table[-1]!r} of a finite schedule"
                )
            if isinstance(self._tail, float) and have >= self._prefix_len:
                break  # constant tail below these uniforms: never resolved
            if (bound is not None and have > bound) or have >= self.scan_limit:
                break
            if self.queryable_length is not None and have >= self.queryable_length:
                break
            n = 2 * have
            if bound is not None:
                n = min(n, bound + 1)
            n = max(n, have + 1)
        if bound is not None:
            out[out > bound] = UNBOUNDED
        return out

    def level(self, u, cap=None):
        return int(self.levels(np.array([u]), cap)[0])


def schedule_level(u, schedule, cap=None):
    """Depth ``K`` with ``a*_{K-1} <= u < a*_K`` (``a*_{-1} = 0``).

    Returns ``UNBOUNDED`` when ``u`` is at least every queryable threshold
    (or every threshold up to ``cap``). Raises ``ScheduleExhausted`` for a
    finite schedule without continuation whose last value is ``<= u``.
    """
    return schedule.level(u, cap)


class SpecificationKernel:
    """Minorants ``a_k(g | w)`` of a specification over a finite alphabet.

    Subclasses implement :meth:`minorant`; :meth:`masses` returns the
    minorants of every symbol at once, in alphabet order, and is memoised.
    """

    #: Largest history depth the kernel can be queried at (None: unbounded).
    max_depth = None

    def __init__(self, alphabet):
        alphabet = tuple(alphabet)
        if not alphabet:
            raise ValueError("alphabet must be non-empty")
        if len(set(alphabet)) != len(alphabet):
            raise ValueError("alphabet symbols must be distinct")
        self.alphabet = alphabet
        self._index = {g: i for i, g in enumerate(alphabet)}
        self.masses = lru_cache(maxsize=1 << 16)(self._masses)

    def symbol_index(self, g):
        return self._index[g]

    def minorant(self, k, g, w):
        raise NotImplementedError

    def _masses(self, k, w):
        return tuple(float(self.minorant(k, g, w)) for g in self.alphabet)

    def level_mass(self, k, w):
        """``sum_g a_k(g|w)``, correctly rounded."""
        return math.fsum(self.masses(k, tuple(w)))


class FunctionKernel(SpecificationKernel):
    """Kernel wrapping a user function ``minorant(k, g, w)``."""

    def __init__(self, alphabet, minorant, max_depth=None):
        super().__init__(alphabet)
        self._minorant = minorant
        self.max_depth = max_depth

    def minorant(self, k, g, w):
        return self._minorant(k, g, tuple(w))

