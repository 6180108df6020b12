"""Layered interval partition of [0, 1) and point location within it.

Level ``l`` of the partition, for a history ``w`` (most recent first),
occupies ``[c_{l-1}, c_l)`` with ``c_l = sum_g a_l(g | w[:l])`` and
``c_{-1} = 0``. Inside a level the symbols follow alphabet order, symbol
``g`` receiving an interval of length ``a_l(g|w[:l]) - a_{l-1}(g|w[:l-1])``.
Intervals are closed on the left and open on the right.
"""

import math
from dataclasses import dataclass

from .errors import DominanceViolation

__all__ = ["LayerLayout", "layout", "locate"]

# Tolerated rounding: negative b_l = a_l - a_{l-1}, and c_K short of a*_K.
_MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class LayerLayout:
    """Materialised partition levels ``0..K`` for one history.

    Attributes
    ----------
    alphabet : tuple
    lengths : tuple of tuple of float
        ``lengths[l][i]`` is the length of ``B_l(alphabet[i] | w)``.
    lefts : tuple of tuple of float
        Left endpoints in the same layout.
    boundaries : tuple of float
        ``boundaries[l] = c_l``, the right end of level ``l``.
    """

    alphabet: tuple
    lengths: tuple
    lefts: tuple
    boundaries: tuple

    def interval(self, level, g):
        i = self.alphabet.index(g)
        left = self.lefts[level][i]
        return left, left + self.lengths[level][i]

    def symbol_mass(self, g):
        """Total length of the intervals of ``g`` across levels."""
        i = self.alphabet.index(g)
        return math.fsum(row[i] for row in self.lengths)


def _level_lengths(masses, previous, level):
    lengths = []
    for a, a_prev in zip(masses, previous):
        b = a - a_prev
        if b < 0:
            if b < -_MONOTONE_SLACK:
                raise DominanceViolation(
                    f"minorant decreases with depth at level {level}: {a!r} < {a_prev!r}"
                )
            b = 0.0
        lengths.append(b)
    return lengths


def layout(history, kernel, depth):
    """Materialise levels ``0..depth`` for the history ``history``.

    ``history`` is a sequence, most recent first, of length ``>= depth``.
    """
    history = tuple(history)
    if len(history) < depth:
        raise ValueError("history shorter than requested depth")
    previous = (0.0,) * len(kernel.alphabet)
    lower = 0.0
    all_lengths, all_lefts, bounds = [], [], []
    for level in range(depth + 1):
        masses = kernel.masses(level, history[:level])
        lengths = _level_lengths(masses, previous, level)
        lefts, left = [], lower
        for b in lengths:
            lefts.append(left)
            left += b
        all_lengths.append(tuple(lengths))
        all_lefts.append(tuple(lefts))
        lower = math.fsum(masses)
        bounds.append(lower)
        previous = masses
    return LayerLayout(kernel.alphabet, tuple(all_lengths), tuple(all_lefts), tuple(bounds))


def locate(u, history, kernel, cap):
    """Find the level and symbol whose interval contains ``u``.

    Levels are built lazily and the scan stops at the first level whose
    right boundary exceeds ``u``, so the history is read only to the depth
    of the returned level.

    Parameters
    ----------
    u : float
        Point in [0, 1).
    history : callable
        ``history(d)`` returns the symbol ``d`` steps in the past (``d >= 1``).
    kernel : SpecificationKernel
    cap : int
        Deepest level that may be built.

    Returns
    -------
    (level, symbol)

    Raises
    ------
    DominanceViolation
        If ``u`` is not covered by levels ``0..cap``.
    """
    if kernel.max_depth is not None and cap > kernel.max_depth:
        cap = kernel.max_depth
    alphabet = kernel.alphabet
    previous = (0.0,) * len(alphabet)
    lower = 0.0
    w = ()
    top = None  # (level, symbol) of the last non-empty interval so far
    for level in range(cap + 1):
        if level:
            w = w + (history(level),)
        masses = kernel.masses(level, w)
        upper = math.fsum(masses)
        lengths = _level_lengths(masses, previous, level)
        # callers guarantee u < a*_cap <= c_cap, so a miss by rounding at the
        # cap level belongs to that level
        if u < upper or (level == cap and u < upper + _MONOTONE_SLACK):
            left = lower
            for g, b in zip(alphabet, lengths):
                if b > 0.0:
                    top = (level, g)
                    left += b
                    if u < left:
                        return level, g
            # u sits in the rounding gap just below c_l: it goes to the
            # interval ending there
            if top is None:
                raise DominanceViolation(f"no interval below {u!r}")
            return top
        for g, b in zip(alphabet, lengths):
            if b > 0.0:
                top = (level, g)
        lower = upper
        previous = masses
    raise DominanceViolation(
        f"u={u!r} not covered by levels 0..{cap}: level boundary is {lower!r}"
    )
