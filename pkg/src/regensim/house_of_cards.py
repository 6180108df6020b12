"""The house-of-cards chain and the bounds built from its return probabilities.

The chain starts at height 0; at height ``x`` it climbs to ``x + 1`` when
the next uniform is below ``a*_x`` and falls back to 0 otherwise. Its
return probabilities ``rho_m = P(W_m = 0)`` control how deep the
regeneration search goes.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BoundVacuous

__all__ = [
    "RhoTable",
    "RegimeReport",
    "rho_table",
    "simulate_W",
    "house_of_cards_paths",
    "return_frequencies",
    "tau_tail_bound",
    "impatience_bound",
    "loss_of_memory_bound",
    "regime_report",
]


@dataclass(frozen=True)
class RhoTable:
    """Products, first-return weights and return probabilities up to ``horizon``.

    ``beta[m]`` for ``m = 0..N``; ``first_return[j]`` for ``j = 0..N`` with
    ``first_return[0] = 0``; ``rho[m]`` for ``m = 0..N`` with ``rho[0] = 1``.
    """

    horizon: int
    beta: np.ndarray
    first_return: np.ndarray
    rho: np.ndarray

    def tail_sum(self, start, count):
        """``rho[start] + ... + rho[start + count - 1]``."""
        if start + count - 1 > self.horizon:
            raise ValueError("table horizon too short for the requested sum")
        return float(np.sum(self.rho[start : start + count]))


def rho_table(schedule, horizon):
    """Return probabilities of the house-of-cards chain by first-return renewal.

    The first return to 0 happens at step ``j`` when the chain climbs
    ``j - 1`` times and then falls: ``f_1 = 1 - a*_0`` and
    ``f_j = beta_{j-2} (1 - a*_{j-1})``. Then
    ``rho_m = sum_{j=1}^m f_j rho_{m-j}``, evaluated exactly in O(N^2).
    """
    n = int(horizon)
    if n < 1:
        raise ValueError("horizon must be >= 1")
    a = schedule.values(n + 1)
    beta = np.cumprod(a)
    f = np.zeros(n + 1)
    f[1] = 1.0 - a[0]
    f[2:] = beta[: n - 1] * (1.0 - a[1:n])
    rho = np.zeros(n + 1)
    rho[0] = 1.0
    for m in range(1, n + 1):
        rho[m] = np.dot(f[1 : m + 1], rho[m - 1 :: -1])
    np.clip(rho, 0.0, 1.0, out=rho)
    return RhoTable(n, beta, f, rho)


def simulate_W(m, n, field, schedule):
    """Heights ``W^m_m .. W^m_n`` of the chain started at time ``m``.

    ``W^m_m = 0`` and ``W^m_j = (W^m_{j-1} + 1) * [U_j < a*_{W^m_{j-1}}]``.
    """
    m, n = int(m), int(n)
    if n < m:
        raise ValueError("need m <= n")
    u = field.uniforms(m + 1, n)
    a = schedule.values(n - m + 1)
    out = np.zeros(n - m + 1, dtype=np.int64)
    w = 0
    for i, x in enumerate(u, start=1):
        w = w + 1 if x < a[w] else 0
        out[i] = w
    return out


def house_of_cards_paths(uniforms, schedule):
    """Run many chains at once.

    ``uniforms`` has shape ``(runs, length)``; row ``r`` drives one chain
    started at height 0 and the result has shape ``(runs, length + 1)``
    with column 0 equal to 0.
    """
    uniforms = np.atleast_2d(uniforms)
    runs, length = uniforms.shape
    a = schedule.values(length + 1)
    out = np.zeros((runs, length + 1), dtype=np.int64)
    w = np.zeros(runs, dtype=np.int64)
    for j in range(length):
        w = np.where(uniforms[:, j] < a[w], w + 1, 0)
        out[:, j + 1] = w
    return out


def return_frequencies(field, schedule, runs, horizon, chunk=100_000):
    """Monte-Carlo estimate of ``rho_1 .. rho_horizon``.

    Run ``r`` uses the uniforms at indices ``r * (horizon + 1) + 1`` onwards,
    so runs are driven by disjoint parts of ``field``. Returns the counts of
    zeros per step (length ``horizon + 1``, entry 0 equal to ``runs``).
    """
    stride = horizon + 1
    counts = np.zeros(horizon + 1, dtype=np.int64)
    for first in range(0, runs, chunk):
        size = min(chunk, runs - first)
        u = field.uniforms(first * stride, (first + size) * stride - 1).reshape(size, stride)
        paths = house_of_cards_paths(u[:, 1:], schedule)
        counts += np.sum(paths == 0, axis=0)
    return counts


def tau_tail_bound(schedule, s, t, m, table=None):
    """Upper bound ``sum_{i=0}^{t-s} rho_{m+i}`` on ``P(s - tau[s, t] > m)``."""
    if t < s or m < 0:
        raise ValueError("need s <= t and m >= 0")
    width = t - s + 1
    if table is None or table.horizon < m + width - 1:
        table = rho_table(schedule, max(1, m + width - 1))
    return min(1.0, table.tail_sum(m, width))


def impatience_bound(schedule, s, t, depth, table=None):
    """Total-variation bias from discarding runs deeper than ``depth``.

    Returns ``S / (1 - S)`` with ``S = sum_{i=0}^{t-s} rho_{depth+i}``.

    Raises
    ------
    BoundVacuous
        If ``S >= 1``.
    """
    if t < s or depth < 0:
        raise ValueError("need s <= t and depth >= 0")
    width = t - s + 1
    if table is None or table.horizon < depth + width - 1:
        table = rho_table(schedule, max(1, depth + width - 1))
    total = table.tail_sum(depth, width)
    if total >= 1.0:
        raise BoundVacuous(f"tail sum {total:.6g} >= 1; increase the abort depth")
    return total / (1.0 - total)


def loss_of_memory_bound(schedule, i, s, t, sup_norm=1.0, table=None):
    """Bound ``2 |f| sum_{j=0}^{t-s} rho_{s+j-i}`` on conditioning dependence.

    Applies to a function of the sites ``[s, t]`` conditioned on two
    different pasts before time ``i <= s``.
    """
    if not i <= s <= t:
        raise ValueError("need i <= s <= t")
    if sup_norm == 0:
        return 0.0
    width = t - s + 1
    start = s - i
    if table is None or table.horizon < start + width - 1:
        table = rho_table(schedule, max(1, start + width - 1))
    return 2.0 * abs(sup_norm) * table.tail_sum(start, width)


@dataclass(frozen=True)
class RegimeReport:
    """Advisory summary of the products ``beta_m``.

    ``classification`` is one of ``"beta-positive"`` (the products seem to
    converge to a positive limit), ``"sum-beta-diverges"`` (they decay no
    faster than ``1/k``), ``"neither"`` (clearly summable) or
    ``"inconclusive"``. ``declared`` echoes the user's regime assertion,
    which is what governs sampling.
    """

    kmax: int
    partial_sums: np.ndarray
    beta_kmax: float
    classification: str
    declared: str

    @property
    def sum_beta(self):
        return float(self.partial_sums[-1])


def regime_report(schedule, kmax, declared="unasserted"):
    """Partial sums of ``beta_m`` up to ``kmax`` and an advisory regime label.

    Whether ``sum beta_m`` diverges or ``lim beta_m > 0`` is a statement
    about the infinite tail; the label here is a heuristic read of a finite
    prefix and never overrides ``declared``.
    """
    kmax = int(kmax)
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    beta = schedule.beta(kmax)
    sums = np.cumsum(beta)
    half = kmax // 2
    last = float(beta[-1])
    if schedule.degenerate_from is not None and schedule.degenerate_from <= kmax:
        label = "beta-positive"
    elif last > 1e-6 and last / beta[half] > 1.0 - 1e-3:
        label = "beta-positive"
    elif kmax * last >= 0.1:
        label = "sum-beta-diverges"
    elif float(sums[-1] - sums[half]) <= 1e-9 * float(sums[-1]):
        label = "neither"
    else:
        label = "inconclusive"
    return RegimeReport(kmax, sums, last, label, declared)
