import numpy as np
import pytest

from regensim import (
    Aborted,
    ArrayField,
    FiniteOrderSpec,
    FunctionKernel,
    Reducible,
    ThresholdSchedule,
    brute_force_phi,
    compare_distributions,
    exact_stationary,
    random_finite_order_spec,
    sample_window,
)


class TestStationary:
    def test_two_state(self):
        spec = FiniteOrderSpec((1, -1), 1, [[0.75, 0.25], [0.45, 0.55]])
        law = exact_stationary(spec)
        assert law.probabilities[0] == pytest.approx(9 / 14, abs=1e-14)
        assert law.residual <= 1e-12

    def test_symmetric(self):
        spec = FiniteOrderSpec((0, 1), 1, [[0.7, 0.3], [0.3, 0.7]])
        np.testing.assert_allclose(exact_stationary(spec).probabilities, [0.5, 0.5])

    def test_iid(self):
        spec = FiniteOrderSpec((0, 1, 2), 1, [[0.2, 0.3, 0.5]] * 3)
        np.testing.assert_allclose(exact_stationary(spec).probabilities, [0.2, 0.3, 0.5])

    def test_order_zero(self):
        spec = FiniteOrderSpec((0, 1), 0, [[0.4, 0.6]])
        law = exact_stationary(spec)
        assert law.window(2) == pytest.approx({(0, 0): 0.16, (0, 1): 0.24, (1, 0): 0.24, (1, 1): 0.36})

    def test_reducible(self):
        spec = FiniteOrderSpec((0, 1), 1, [[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(Reducible):
            exact_stationary(spec)

    def test_fixed_point_random(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            law = exact_stationary(random_finite_order_spec(rng))
            assert law.residual <= 1e-12
            assert law.probabilities.min() >= 0
            assert law.probabilities.sum() == pytest.approx(1.0)

    def test_window_marginals_consistent(self):
        rng = np.random.default_rng(6)
        spec = random_finite_order_spec(rng, order=2)
        law = exact_stationary(spec)
        w3, w2, w1 = law.window(3), law.window(2), law.window(1)
        for pair, p in w2.items():
            assert sum(v for k, v in w3.items() if k[1:] == pair) == pytest.approx(p)
            assert sum(v for k, v in w3.items() if k[:2] == pair) == pytest.approx(p)
        assert sum(w1.values()) == pytest.approx(1.0)


class TestBruteForce:
    def test_matches_engine(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            spec = random_finite_order_spec(rng)
            sched = spec.schedule()
            L = int(rng.integers(1, 9))
            u = rng.random(60 + L)
            field = ArrayField(u, start=-60)
            expected = brute_force_phi(u, -60, spec, sched, 0, L - 1)
            try:
                got = sample_window(0, L - 1, field, spec, sched).symbols
            except Aborted:
                got = None
            assert got == expected

    def test_one_symbol(self):
        kern = FunctionKernel(("a",), lambda k, g, w: 1.0)
        out = brute_force_phi([0.3, 0.9], 0, kern, ThresholdSchedule.degenerate(), 0, 1)
        assert out == ("a", "a")

    def test_too_short(self):
        spec = FiniteOrderSpec((0, 1), 1, [[0.6, 0.4], [0.3, 0.7]])
        sched = spec.schedule()
        u = [0.99, 0.99, 0.99]
        assert brute_force_phi(u, -2, spec, sched, 0, 0) is None
        with pytest.raises(Aborted):
            sample_window(0, 0, ArrayField(u, start=-2), spec, sched)

    def test_requires_cover(self):
        with pytest.raises(ValueError):
            brute_force_phi([0.1], 0, FunctionKernel(("a",), lambda k, g, w: 1.0),
                            ThresholdSchedule.degenerate(), 0, 2)


class TestCompare:
    def test_self(self):
        rng = np.random.default_rng(0)
        ref = {0: 0.2, 1: 0.3, 2: 0.5}
        res = compare_distributions(rng.choice(3, size=20_000, p=[0.2, 0.3, 0.5]), ref, 0.02)
        assert res.distance <= 3 * res.stderr
        assert res.passed

    def test_degenerate(self):
        res = compare_distributions([1] * 5000, {-1: 0.5, 1: 0.5}, 0.01)
        assert res.distance == pytest.approx(0.5)
        assert not res.passed

    def test_windows_as_tuples(self):
        res = compare_distributions([np.array([1, 0])] * 1000, {(1, 0): 1.0}, 0.0)
        assert res.distance == 0 and res.passed

    def test_needs_samples(self):
        with pytest.raises(ValueError):
            compare_distributions([0] * 10, {0: 1.0}, 0.1)
