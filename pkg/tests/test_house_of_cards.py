import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from regensim import (
    BoundVacuous,
    ThresholdSchedule,
    UniformField,
    house_of_cards_paths,
    impatience_bound,
    loss_of_memory_bound,
    regime_report,
    return_frequencies,
    rho_table,
    simulate_W,
    tau_tail_bound,
)

CONST = ThresholdSchedule.constant(0.8)
HALVES = ThresholdSchedule.geometric(0.5)
DEGEN = ThresholdSchedule.degenerate()


def brute_rho(a, n):
    """Distribution of the chain height by forward propagation."""
    p = np.zeros(n + 2)
    p[0] = 1.0
    out = [1.0]
    for _ in range(n):
        q = np.zeros_like(p)
        q[1:] += p[:-1] * a[: len(p) - 1]
        q[0] = np.sum(p[:-1] * (1 - a[: len(p) - 1]))
        p = q
        out.append(p[0])
    return np.array(out)


class TestRho:
    def test_constant(self):
        t = rho_table(CONST, 20)
        np.testing.assert_allclose(t.rho[1:], 0.2)

    def test_degenerate(self):
        t = rho_table(DEGEN, 10)
        assert t.rho[0] == 1 and np.all(t.rho[1:] == 0)

    @pytest.mark.parametrize(
        "sched", [CONST, HALVES, ThresholdSchedule.power(1.0, 0.5), ThresholdSchedule.degenerate([0.3, 0.7])]
    )
    def test_matches_forward_propagation(self, sched):
        n = 60
        t = rho_table(sched, n)
        np.testing.assert_allclose(t.rho, brute_rho(sched.values(n + 2), n), atol=1e-13)

    def test_table_invariants(self):
        t = rho_table(ThresholdSchedule.power(1.5, 0.5), 200)
        assert np.all(np.diff(t.beta) <= 0)
        assert np.all((t.beta > 0) & (t.beta <= 1))
        assert t.first_return.sum() <= 1 + 1e-12
        assert np.all((t.rho >= 0) & (t.rho <= 1))

    @given(st.floats(1.0, 1.95))
    @settings(max_examples=20, deadline=None)
    def test_lowering_raises_rho(self, factor):
        hi = rho_table(HALVES, 40).rho
        lo = rho_table(HALVES.lowered(factor), 40).rho
        assert np.all(lo >= hi - 1e-12)

    def test_monte_carlo_quick(self):
        runs, n = 20_000, 15
        counts = return_frequencies(UniformField(99), HALVES, runs, n)
        p = counts / runs
        rho = rho_table(HALVES, n).rho
        se = np.sqrt(rho * (1 - rho) / runs)
        assert np.all(np.abs(p - rho) <= 4 * se + 1e-12)


class TestChain:
    def test_climbs(self):
        sched = ThresholdSchedule.constant(0.99)
        paths = house_of_cards_paths(np.zeros((1, 5)), sched)
        assert paths.tolist() == [[0, 1, 2, 3, 4, 5]]

    def test_reset(self):
        paths = house_of_cards_paths(np.array([[0.1, 0.9, 0.1]]), HALVES)
        assert paths.tolist() == [[0, 1, 0, 1]]

    def test_simulate_matches_paths(self):
        f = UniformField(3)
        w = simulate_W(10, 40, f, HALVES)
        p = house_of_cards_paths(f.uniforms(11, 40)[None, :], HALVES)[0]
        assert w.tolist() == p.tolist()

    @given(st.integers(0, 2**63), st.integers(0, 30), st.integers(1, 30))
    @settings(max_examples=100, deadline=None)
    def test_coalescence(self, seed, m, lag):
        f = UniformField(seed)
        k, n = m + lag, m + lag + 60
        wm = simulate_W(m, n, f, HALVES)[lag:]
        wk = simulate_W(k, n, f, HALVES)
        assert np.all(wm >= wk)
        zeros = np.flatnonzero(wm == 0)
        if len(zeros):
            z = zeros[0]
            assert np.array_equal(wm[z:], wk[z:])


class TestBounds:
    def test_tail(self):
        assert tau_tail_bound(CONST, 0, 0, 2) == pytest.approx(0.2)
        assert tau_tail_bound(DEGEN, 0, 4, 1) == 0
        assert tau_tail_bound(CONST, 0, 2, 1) == pytest.approx(0.6)
        assert tau_tail_bound(ThresholdSchedule.constant(0.1), 0, 5, 1) == 1.0

    def test_impatience(self):
        for M in (1, 3, 10):
            assert impatience_bound(CONST, 0, 0, M) == pytest.approx(0.25)
        assert impatience_bound(DEGEN, 0, 0, 2) == 0

    def test_impatience_from_table(self):
        rho = rho_table(HALVES, 20).rho[20]
        assert impatience_bound(HALVES, 0, 0, 20) == pytest.approx(rho / (1 - rho))

    def test_vacuous(self):
        with pytest.raises(BoundVacuous):
            impatience_bound(CONST, 0, 5, 1)

    def test_loss_of_memory(self):
        assert loss_of_memory_bound(CONST, -2, 0, 0) == pytest.approx(0.4)
        assert loss_of_memory_bound(CONST, -2, 0, 0, sup_norm=0) == 0
        sched = ThresholdSchedule.power(3.0, 0.5)
        vals = [loss_of_memory_bound(sched, -d, 0, 2) for d in range(1, 200, 10)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))


class TestRegime:
    def test_degenerate(self):
        r = regime_report(DEGEN, 50, "beta-positive")
        assert r.classification == "beta-positive" and r.declared == "beta-positive"
        assert r.beta_kmax == 1.0

    def test_constant(self):
        r = regime_report(CONST, 200)
        assert r.classification != "beta-positive"
        assert r.sum_beta == pytest.approx(0.8 / 0.2, rel=1e-9)

    def test_geometric(self):
        r = regime_report(HALVES, 500)
        assert r.classification == "beta-positive"
        assert r.beta_kmax == pytest.approx(0.288788, abs=1e-6)

    def test_harmonic(self):
        assert regime_report(ThresholdSchedule.power(1.0, 0.5), 2000).classification == "sum-beta-diverges"
