"""Regeneration times, reconstruction of the coding map and window samples.

For a window ``[s, t]`` the regeneration time is the latest ``m <= s`` such
that ``U_k < a*_{k-m}`` for every ``k`` in ``[m, t]``. It is found by the
backward recursion ``Y_{-1} = t + 1``, ``Y_0 = s``,
``Y_n = Y_{n-1} - Z[Y_{n-1}, Y_{n-2} - 1]`` with
``Z[a, b] = max(K_n - n + a : n in [a, b])``, stopping at the first fixed
point. Symbols are then rebuilt forward from the regeneration time, site
``j`` reading its uniform against partition levels ``0..K_j``.
"""

from dataclasses import dataclass, field as dc_field

import numpy as np

from .core import UNBOUNDED
from .errors import Aborted
from .partition import locate

__all__ = [
    "RegenerationRecord",
    "WindowSample",
    "RenewalReport",
    "tau_window",
    "tau_direct",
    "reconstruct",
    "sample_window",
    "renewal_scan",
]

DEFAULT_MAX_DEPTH = 100_000

# Uniforms are fetched in blocks of this size, aligned downwards.
_CHUNK = 64


@dataclass(frozen=True)
class RegenerationRecord:
    """Outcome of the backward search for a window ``[s, t]``.

    ``levels[j - tau]`` is ``K_j`` for ``j`` in ``[tau, t]`` and
    ``uniforms`` holds ``U_tau .. U_t``. When ``aborted`` is set, ``tau``
    is the last recursion value reached and ``abort_depth`` the bound that
    was exceeded.
    """

    s: int
    t: int
    tau: int
    levels: np.ndarray = dc_field(repr=False)
    uniforms: np.ndarray = dc_field(repr=False)
    aborted: bool = False
    abort_depth: int = None

    @property
    def uniforms_consumed(self):
        return self.t - self.tau + 1

    @property
    def depth(self):
        """``s - tau``."""
        return self.s - self.tau

    def level(self, j):
        return int(self.levels[j - self.tau])


@dataclass(frozen=True)
class WindowSample:
    """Symbols on ``[s, t]`` together with their provenance."""

    s: int
    t: int
    symbols: tuple
    record: RegenerationRecord = dc_field(repr=False)
    seed: int = None

    @property
    def tau(self):
        return self.record.tau

    def __getitem__(self, j):
        if not self.s <= j <= self.t:
            raise IndexError(j)
        return self.symbols[j - self.s]


@dataclass(frozen=True)
class RenewalReport:
    """Regeneration times found inside ``[s, t]``.

    A time ``j`` is listed when ``U_{j+l} < a*_l`` for every ``l`` in
    ``[0, t - j]``. The true renewal condition runs to infinity, so a time
    is ``censored`` unless the schedule is identically 1 beyond ``t - j``.
    ``blocks`` are the half-open index ranges between consecutive times;
    ``block_symbols`` holds the corresponding symbols when a kernel was
    supplied.
    """

    s: int
    t: int
    times: np.ndarray
    censored: np.ndarray
    blocks: tuple
    block_symbols: tuple = None

    @property
    def gaps(self):
        return np.diff(self.times)


class _Draws:
    """Uniforms and levels over a growing range ``[lo, t]``."""

    def __init__(self, field, schedule, t, cap):
        self.field = field
        self.schedule = schedule
        self.t = t
        self.cap = cap
        self.lo = t + 1
        self.u = np.empty(0)
        self.k = np.empty(0, dtype=np.int64)
        self.floor = getattr(field, "lowest_index", None)

    def extend(self, lo):
        if lo >= self.lo:
            return
        new_lo = min(lo, ((self.lo - _CHUNK) // _CHUNK) * _CHUNK)
        if self.floor is not None:
            new_lo = max(new_lo, self.floor)
        if new_lo > lo:
            raise IndexError(f"field has no uniforms below index {self.floor}")
        u = self.field.uniforms(new_lo, self.lo - 1)
        k = self.schedule.levels(u, self.cap)
        self.u = np.concatenate([u, self.u])
        self.k = np.concatenate([k, self.k])
        self.lo = new_lo

    def levels(self, a, b):
        return self.k[a - self.lo : b - self.lo + 1]

    def uniforms(self, a, b):
        return self.u[a - self.lo : b - self.lo + 1]


def _check_window(s, t, max_depth):
    s, t = int(s), int(t)
    if t < s:
        raise ValueError("window needs s <= t")
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    return s, t


def tau_window(s, t, field, schedule, max_depth=DEFAULT_MAX_DEPTH, debug=False):
    """Regeneration time of the window ``[s, t]`` by the backward recursion.

    Parameters
    ----------
    s, t : int
        Window ends, ``s <= t``.
    field : UniformField or ArrayField
    schedule : ThresholdSchedule
    max_depth : int
        Abort when the search goes more than ``max_depth`` sites left of ``s``.
    debug : bool
        Also evaluate the defining backward scan and check both agree.

    Returns
    -------
    RegenerationRecord

    Raises
    ------
    Aborted
        If ``s - tau > max_depth``; the exception carries a partial record.
    """
    s, t = _check_window(s, t, max_depth)
    draws = _Draws(field, schedule, t, cap=max_depth + (t - s) + 1)
    draws.extend(s)
    prev2, prev = t + 1, s
    while True:
        ks = draws.levels(prev, prev2 - 1)
        reach = int(np.min(np.arange(prev, prev2) - ks))
        y = min(prev, reach)
        if y == prev:
            break
        if s - y > max_depth or (draws.floor is not None and y < draws.floor):
            record = RegenerationRecord(
                s, t, max(y, s - max_depth - 1), np.empty(0, np.int64), np.empty(0),
                aborted=True, abort_depth=max_depth,
            )
            raise Aborted(max_depth, record)
        draws.extend(y)
        prev2, prev = prev, y
    tau = prev
    record = RegenerationRecord(
        s, t, tau, draws.levels(tau, t).copy(), draws.uniforms(tau, t).copy()
    )
    if debug:
        direct = tau_direct(s, t, field, schedule, max_depth)
        if direct != tau:
            raise AssertionError(
                f"recursion gives tau={tau} but the direct scan gives {direct}"
            )
    return record


def tau_direct(s, t, field, schedule, max_depth=DEFAULT_MAX_DEPTH):
    """Regeneration time by scanning ``m = s, s-1, ...`` against the definition.

    Quadratic in the depth; meant for cross-checking :func:`tau_window`.
    Returns ``None`` when no ``m >= s - max_depth`` qualifies.
    """
    s, t = _check_window(s, t, max_depth)
    floor = s - max_depth
    field_floor = getattr(field, "lowest_index", None)
    if field_floor is not None:
        floor = max(floor, field_floor)
    lo = s
    u = field.uniforms(s, t)
    for m in range(s, floor - 1, -1):
        if m < lo:
            new_lo = max(floor, lo - max(len(u), _CHUNK))
            u = np.concatenate([field.uniforms(new_lo, lo - 1), u])
            lo = new_lo
        seg = u[m - lo :]
        if np.all(seg < schedule.values_at(np.arange(len(seg)))):
            return m
    return None


def reconstruct(record, field, kernel):
    """Symbols on ``[tau, t]`` rebuilt forward from the regeneration time.

    Site ``j`` is located with partition levels capped at ``K_j``; every
    level it reads stays inside ``[tau, j - 1]``.
    """
    if record.aborted:
        raise ValueError("cannot reconstruct an aborted record")
    tau, t = record.tau, record.t
    u = field.uniforms(tau, t)
    xs = []
    for offset in range(t - tau + 1):
        k = int(record.levels[offset])
        if k > offset:
            raise ValueError(f"level {k} at site {tau + offset} reaches left of tau")
        _, g = locate(float(u[offset]), lambda d, o=offset: xs[o - d], kernel, k)
        xs.append(g)
    return tuple(xs)


def sample_window(s, t, field, kernel, schedule, max_depth=DEFAULT_MAX_DEPTH, debug=False):
    """Perfect sample of the process on ``[s, t]``.

    Composes :func:`tau_window` and :func:`reconstruct` and keeps the sites
    of the window. The result depends only on ``U_tau .. U_t``.

    Raises
    ------
    Aborted
        If the regeneration time lies more than ``max_depth`` left of ``s``.
    """
    record = tau_window(s, t, field, schedule, max_depth, debug=debug)
    xs = reconstruct(record, field, kernel)
    return WindowSample(
        record.s, record.t, xs[record.s - record.tau :], record, getattr(field, "seed", None)
    )


def renewal_scan(s, t, field, schedule, kernel=None):
    """Times ``j`` in ``[s, t]`` with ``U_{j+l} < a*_l`` for ``l = 0..t-j``.

    Parameters
    ----------
    s, t : int
    field : UniformField or ArrayField
    schedule : ThresholdSchedule
    kernel : SpecificationKernel, optional
        When given, the symbols of every block between consecutive times are
        reconstructed (each listed time regenerates the rest of the window).

    Returns
    -------
    RenewalReport
    """
    s, t = int(s), int(t)
    if t < s:
        raise ValueError("window needs s <= t")
    u = field.uniforms(s, t)
    ks = schedule.levels(u, cap=t - s)
    idx = np.arange(s, t + 1)
    reach = idx - np.where(ks == UNBOUNDED, t - s + 1, ks)
    suffix_min = np.minimum.accumulate(reach[::-1])[::-1]
    times = idx[suffix_min >= idx]
    degenerate = schedule.degenerate_from
    if degenerate is None:
        censored = np.ones(len(times), dtype=bool)
    else:
        censored = (t - times + 1) < degenerate
    bounds = list(times) + [t + 1]
    blocks = tuple((int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]))
    block_symbols = None
    if kernel is not None and len(times):
        first = int(times[0])
        record = RegenerationRecord(
            first, t, first, ks[first - s :].copy(), u[first - s :].copy()
        )
        xs = reconstruct(record, field, kernel)
        block_symbols = tuple(xs[a - first : b - first] for a, b in blocks)
    return RenewalReport(s, t, times, censored, blocks, block_symbols)
