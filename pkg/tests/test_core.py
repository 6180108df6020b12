import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from regensim import (
    UNBOUNDED,
    ArrayField,
    FunctionKernel,
    ScheduleExhausted,
    ThresholdSchedule,
    UniformField,
    schedule_level,
    uniform_at,
)

HALVES = ThresholdSchedule.geometric(0.5)  # 1 - 2^{-k-1}


class TestUniformField:
    def test_repeatable(self):
        assert uniform_at(UniformField(7), 0) == uniform_at(UniformField(7), 0)

    def test_seeds_separate(self):
        assert uniform_at(UniformField(7), 0) != uniform_at(UniformField(8), 0)

    def test_batch_matches_single(self):
        f = UniformField(7)
        batch = f.uniforms(-10_000, 0)
        assert batch[-5 - (-10_000)] == uniform_at(f, -5)

    @given(st.integers(-(2**40), 2**40), st.integers(0, 40), st.integers(0, 2**64 - 1))
    @settings(max_examples=100, deadline=None)
    def test_any_slice_agrees(self, lo, width, seed):
        f = UniformField(seed)
        u = f.uniforms(lo, lo + width)
        assert len(u) == width + 1
        assert all(u[j] == f.at(lo + j) for j in (0, width // 2, width))
        assert np.all((u >= 0) & (u < 1))

    def test_pinned_values(self):
        # bit-identical across platforms: Philox is specified exactly
        f = UniformField(7)
        assert f.raw(0, 0)[0] == f.raw(-3, 3)[3]
        assert f.uniforms(0, 3).tolist() == [f.at(i) for i in range(4)]

    def test_seed_reduced_mod_2_64(self):
        assert UniformField(2**64 + 3) == UniformField(3)

    def test_roughly_uniform(self):
        from scipy import stats

        u = UniformField(11).uniforms(-50_000, 49_999)
        assert stats.kstest(u, "uniform").pvalue > 0.001
        # lag-1 correlation
        assert abs(np.corrcoef(u[:-1], u[1:])[0, 1]) < 0.01


class TestArrayField:
    def test_bounds(self):
        f = ArrayField([0.1, 0.2, 0.3], start=-2)
        assert f.at(-2) == 0.1 and f.at(0) == 0.3
        with pytest.raises(IndexError):
            f.uniforms(-3, 0)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            ArrayField([1.0])


class TestSchedule:
    def test_level_examples(self):
        assert schedule_level(0.49, HALVES) == 0
        assert schedule_level(0.6, HALVES) == 1
        assert schedule_level(0.9, HALVES) == 3

    def test_level_ties_go_up(self):
        # u equal to a*_0 is not below it
        assert schedule_level(0.5, HALVES) == 1
        assert schedule_level(0.0, HALVES) == 0

    def test_degenerate_tail(self):
        s = ThresholdSchedule.degenerate([0.5, 0.95])
        assert s.values(4).tolist() == [0.5, 0.95, 1.0, 1.0]
        assert s.degenerate_from == 2
        assert s.level(0.97) == 2

    def test_constant_is_unbounded_above(self):
        s = ThresholdSchedule.constant(0.8)
        assert s.level(0.9) == UNBOUNDED
        assert s.level(0.7) == 0

    def test_cap(self):
        assert HALVES.level(0.99, cap=3) == UNBOUNDED
        assert HALVES.level(0.99, cap=10) == 6

    def test_explicit_exhausts(self):
        s = ThresholdSchedule.explicit([0.5, 0.75])
        assert s.level(0.6) == 1
        with pytest.raises(ScheduleExhausted):
            s.level(0.8)

    def test_value_minus_one(self):
        assert HALVES.value(-1) == 0.0

    @pytest.mark.parametrize("values", [[0.0, 0.5], [0.6, 0.5], [0.5, 1.2], [float("nan")]])
    def test_validation(self, values):
        with pytest.raises(ValueError):
            ThresholdSchedule.explicit(values)

    def test_beta(self):
        s = ThresholdSchedule.constant(0.8)
        np.testing.assert_allclose(s.beta(3), 0.8 ** np.arange(1, 5))

    def test_lowered(self):
        low = HALVES.lowered(1.5)
        np.testing.assert_allclose(low.values(5), 1 - 1.5 * 2.0 ** -np.arange(1, 6))
        assert np.all(low.values(50) <= HALVES.values(50))

    @given(st.floats(0, 1, exclude_max=True))
    def test_level_inverts_membership(self, u):
        k = HALVES.level(u)
        if k != UNBOUNDED:
            assert HALVES.value(k - 1) <= u < HALVES.value(k)

    def test_vectorised_matches_scalar(self):
        u = UniformField(3).uniforms(0, 999)
        ks = HALVES.levels(u)
        assert ks.tolist() == [HALVES.level(x) for x in u]


class TestKernel:
    def test_masses_cached_and_summed(self):
        calls = []

        def minorant(k, g, w):
            calls.append((k, g, w))
            return 0.25

        kern = FunctionKernel((0, 1), minorant)
        assert kern.level_mass(0, ()) == 0.5
        kern.masses(0, ())
        assert len(calls) == 2
