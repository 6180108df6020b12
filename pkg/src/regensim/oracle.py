"""Reference computations that the sampler is tested against.

Nothing here calls the partition or regeneration code of the sampler; the
brute-force coding map below scans thresholds and intervals literally.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import Reducible

__all__ = [
    "StationaryLaw",
    "Comparison",
    "exact_stationary",
    "brute_force_phi",
    "compare_distributions",
    "random_finite_order_spec",
]


@dataclass(frozen=True)
class StationaryLaw:
    """Stationary law of the context chain of an order-``m`` specification.

    ``probabilities[c]`` is the stationary probability of the context with
    index ``c`` (most recent symbol most significant, as in
    ``FiniteOrderSpec``).
    """

    spec: object
    order: int
    probabilities: np.ndarray
    residual: float

    def window(self, length):
        """Law of ``length`` consecutive symbols, oldest first.

        Returns a dict mapping symbol tuples to probabilities.
        """
        spec = self.spec
        alphabet = spec.alphabet
        m = self.order
        out = {}
        for ctx in itertools.product(alphabet, repeat=m):
            p_ctx = self.probabilities[spec.context_index(ctx)]
            if p_ctx == 0:
                continue
            # ctx is most recent first; its time order is reversed
            start = tuple(reversed(ctx))
            for tail in itertools.product(alphabet, repeat=max(0, length - m)):
                seq = start + tail
                p = p_ctx
                for i in range(m, len(seq)):
                    p *= spec.probability(seq[i], tuple(reversed(seq[i - m : i])))
                key = seq[len(seq) - length :] if length <= len(seq) else seq
                out[key] = out.get(key, 0.0) + p
        if length < m:
            folded = {}
            for seq, p in out.items():
                key = seq[m - length :]
                folded[key] = folded.get(key, 0.0) + p
            out = folded
        return out


def _transition_matrix(spec):
    alphabet = spec.alphabet
    m = spec.order
    n = len(alphabet) ** m
    T = np.zeros((n, n))
    for ctx in itertools.product(alphabet, repeat=m):
        i = spec.context_index(ctx)
        for g in alphabet:
            nxt = ((g,) + ctx)[:m]
            T[i, spec.context_index(nxt)] += spec.probability(g, ctx)
    return T


def exact_stationary(spec):
    """Solve ``pi T = pi`` for the context chain of a finite-order spec.

    Raises
    ------
    Reducible
        If the stationary law is not unique.
    """
    T = _transition_matrix(spec)
    n = T.shape[0]
    A = T.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    if np.linalg.matrix_rank(A) < n:
        raise Reducible("transition operator has no unique stationary law")
    pi = np.linalg.solve(A, b)
    pi = np.where(np.abs(pi) < 1e-15, 0.0, pi)
    if np.any(pi < 0):
        raise Reducible("stationary solve produced negative mass")
    pi = pi / pi.sum()
    residual = float(np.max(np.abs(pi @ T - pi)))
    return StationaryLaw(spec, spec.order, pi, residual)


def _threshold(schedule, k):
    return schedule.value(k)


def brute_force_phi(u, start, spec, schedule, s, t):
    """Literal coding map on an explicit finite sequence of uniforms.

    Parameters
    ----------
    u : sequence of float
        ``u[i]`` is the uniform at time ``start + i``; must cover ``t``.
    start : int
    spec : SpecificationKernel
    schedule : ThresholdSchedule
    s, t : int

    Returns
    -------
    tuple or None
        Symbols on ``[s, t]``, or ``None`` when no regeneration time lies
        within the stored uniforms.
    """
    u = [float(x) for x in u]
    if t > start + len(u) - 1 or s < start:
        raise ValueError("uniforms must cover [s, t]")

    def U(i):
        return u[i - start]

    # latest m <= s with U_k < a*_{k-m} for all k in [m, t]
    tau = None
    for m in range(s, start - 1, -1):
        if all(U(k) < _threshold(schedule, k - m) for k in range(m, t + 1)):
            tau = m
            break
    if tau is None:
        return None

    xs = {}
    for n in range(tau, t + 1):
        depth = n - tau  # U_n < a*_{n - tau}, so levels beyond depth are empty
        value = U(n)
        found = None
        last = None  # symbol of the last non-empty interval scanned
        prev_level_total = 0.0
        for level in range(depth + 1):
            w = tuple(xs[n - d] for d in range(1, level + 1))
            total = math.fsum(spec.minorant(level, g, w) for g in spec.alphabet)
            left = prev_level_total
            for g in spec.alphabet:
                a_now = spec.minorant(level, g, w)
                a_before = spec.minorant(level - 1, g, w[:-1]) if level else 0.0
                length = max(0.0, a_now - a_before)
                if length > 0.0:
                    last = g
                    if left <= value < left + length:
                        found = g
                        break
                left += length
            if found is not None:
                break
            below = value < _threshold(schedule, level) and value < total + 1e-12
            if value < total or below:
                # rounding gap just under the level boundary, or a sliver
                # under a*_level that the float sum of minorants fell short
                # of: the interval ending at the boundary
                found = last
                break
            prev_level_total = total
        if found is None:
            raise ValueError(f"uniform at {n} not covered within depth {depth}")
        xs[n] = found
    return tuple(xs[j] for j in range(s, t + 1))


@dataclass(frozen=True)
class Comparison:
    """Total-variation distance between an empirical and a reference law."""

    distance: float
    stderr: float
    tolerance: float
    count: int

    @property
    def passed(self):
        return self.distance <= self.tolerance


def compare_distributions(samples, reference, tolerance):
    """Empirical total-variation distance to ``reference``.

    Parameters
    ----------
    samples : iterable of hashable
        Observed outcomes (for windows, tuples of symbols).
    reference : dict
        Outcome -> probability.
    tolerance : float
        Pass threshold on the distance.

    Returns
    -------
    Comparison
        ``stderr`` is ``0.5 * sum_x sqrt(p_x (1 - p_x) / n)``, an upper
        bound on the expected distance when the samples come from
        ``reference``.
    """
    counts = {}
    n = 0
    for x in samples:
        key = tuple(x) if isinstance(x, (list, np.ndarray)) else x
        counts[key] = counts.get(key, 0) + 1
        n += 1
    if n < 1000:
        raise ValueError("need at least 1000 samples")
    keys = set(counts) | set(reference)
    dist = 0.5 * sum(abs(counts.get(k, 0) / n - reference.get(k, 0.0)) for k in keys)
    stderr = 0.5 * sum(math.sqrt(p * (1.0 - p) / n) for p in reference.values())
    return Comparison(float(dist), float(stderr), float(tolerance), n)


def random_finite_order_spec(rng, max_alphabet=4, max_order=3, alphabet=None, order=None):
    """Random finite-order specification with strictly positive rows.

    ``rng`` is a ``numpy.random.Generator``; it is kept apart from the
    uniform fields used by samplers.
    """
    from .models import FiniteOrderSpec

    size = len(alphabet) if alphabet is not None else int(rng.integers(1, max_alphabet + 1))
    alphabet = tuple(alphabet) if alphabet is not None else tuple(range(size))
    order = int(rng.integers(0, max_order + 1)) if order is None else int(order)
    rows = rng.dirichlet(np.ones(size), size=size**order)
    rows = np.maximum(rows, 1e-3)
    rows /= rows.sum(axis=1, keepdims=True)
    return FiniteOrderSpec(alphabet, order, rows)
