import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from regensim import (
    Aborted,
    ArrayField,
    BinaryARSpec,
    FunctionKernel,
    ThresholdSchedule,
    UniformField,
    reconstruct,
    renewal_scan,
    sample_window,
    tau_direct,
    tau_window,
)
from regensim.oracle import random_finite_order_spec

HALVES = ThresholdSchedule.geometric(0.5)
AR = BinaryARSpec(0.0, [0.3, 0.1])


def field_from(values_by_index):
    lo = min(values_by_index)
    hi = max(values_by_index)
    return ArrayField([values_by_index[i] for i in range(lo, hi + 1)], start=lo)


class TestTau:
    def test_single_point(self):
        rec = tau_window(0, 0, field_from({0: 0.3}), HALVES)
        assert rec.tau == 0 and rec.uniforms_consumed == 1

    def test_one_step_back(self):
        sched = ThresholdSchedule.degenerate([0.5, 0.95])
        rec = tau_window(0, 0, field_from({-1: 0.3, 0: 0.9}), sched)
        assert rec.tau == -1
        assert rec.levels.tolist() == [0, 1]

    def test_degenerate_one(self):
        sched = ThresholdSchedule.degenerate()
        rec = tau_window(3, 9, UniformField(1), sched)
        assert rec.tau == 3

    def test_no_arrow_crosses_tau(self):
        f = UniformField(4)
        for s in range(0, 200, 7):
            rec = tau_window(s, s + 5, f, HALVES)
            j = np.arange(rec.tau, rec.t + 1)
            assert np.all(j - rec.levels >= rec.tau)

    @given(st.integers(0, 2**63), st.integers(-50, 50), st.integers(0, 6))
    @settings(max_examples=200, deadline=None)
    def test_recursion_equals_scan(self, seed, s, width):
        f = UniformField(seed)
        for sched in (HALVES, ThresholdSchedule.power(1.5, 0.5), ThresholdSchedule.degenerate([0.3, 0.6])):
            rec = tau_window(s, s + width, f, sched, debug=True)
            assert rec.tau == tau_direct(s, s + width, f, sched)

    def test_aborts(self):
        sched = ThresholdSchedule.constant(0.05)
        with pytest.raises(Aborted) as info:
            tau_window(0, 5, UniformField(2), sched, max_depth=3)
        assert info.value.depth == 3
        assert info.value.record.aborted

    def test_short_array_aborts(self):
        f = ArrayField([0.9, 0.9, 0.9], start=-2)
        with pytest.raises(Aborted):
            tau_window(0, 0, f, HALVES)


class TestReconstruct:
    def test_level_zero_lookup(self):
        rec = tau_window(0, 0, field_from({0: 0.1}), AR.schedule())
        assert reconstruct(rec, field_from({0: 0.1}), AR) == (-1,)

    def test_one_symbol(self):
        kern = FunctionKernel(("z",), lambda k, g, w: 1.0)
        s = sample_window(0, 9, UniformField(5), kern, ThresholdSchedule.degenerate())
        assert s.symbols == ("z",) * 10 and s.tau == 0

    def test_pure(self):
        f = UniformField(9)
        rec = tau_window(0, 10, f, AR.schedule())
        assert reconstruct(rec, f, AR) == reconstruct(rec, f, AR)


class TestSampleWindow:
    def test_deterministic(self):
        a = sample_window(-3, 4, UniformField(12), AR, AR.schedule())
        b = sample_window(-3, 4, UniformField(12), AR, AR.schedule())
        assert a.symbols == b.symbols and a.tau == b.tau

    def test_getitem(self):
        s = sample_window(5, 8, UniformField(1), AR, AR.schedule())
        assert s[5] == s.symbols[0]
        with pytest.raises(IndexError):
            s[9]

    @given(st.integers(0, 2**63), st.integers(0, 10), st.data())
    @settings(max_examples=100, deadline=None)
    def test_restriction(self, seed, width, data):
        f = UniformField(seed)
        sched = ThresholdSchedule.geometric(0.5)
        spec = BinaryARSpec(0.1, [], tail=_halves_tail(), link="linear")
        big = sample_window(0, width, f, spec, sched)
        a = data.draw(st.integers(0, width))
        b = data.draw(st.integers(a, width))
        small = sample_window(a, b, f, spec, sched)
        assert small.symbols == big.symbols[a : b + 1]

    def test_locality(self):
        # uniforms left of tau or right of t do not matter
        f = UniformField(21)
        sched = AR.schedule()
        base = sample_window(0, 4, f, AR, sched)
        lo = base.tau - 10
        u = f.uniforms(lo, 15)
        u[: base.tau - lo] = 0.999
        u[4 - lo + 1 :] = 0.0
        other = sample_window(0, 4, ArrayField(u, start=lo), AR, sched)
        assert other.symbols == base.symbols and other.tau == base.tau

    def test_monotone_schedules(self):
        spec = BinaryARSpec(0.2, [], tail=_halves_tail())
        hi = spec.schedule()
        lo = hi.lowered(1.5)
        for seed in range(100):
            f = UniformField(seed)
            a = sample_window(0, 3, f, spec, hi)
            b = sample_window(0, 3, f, spec, lo)
            assert b.tau <= a.tau
            assert a.symbols == b.symbols


def _halves_tail():
    from regensim import GeometricTail

    return GeometricTail(0.5, 0.5, 1)


class TestRenewal:
    def test_degenerate_after_one(self):
        sched = ThresholdSchedule.degenerate([0.5])
        f = UniformField(3)
        rep = renewal_scan(0, 99, f, sched)
        u = f.uniforms(0, 99)
        assert rep.times.tolist() == np.flatnonzero(u < 0.5).tolist()
        assert not rep.censored.any()

    def test_single_site(self):
        rep = renewal_scan(0, 0, field_from({0: 0.2}), HALVES)
        assert rep.times.tolist() == [0]
        assert rep.censored.tolist() == [True]

    def test_brute_force(self):
        f = UniformField(8)
        u = f.uniforms(0, 59)
        a = HALVES.values(60)
        expected = [j for j in range(60) if all(u[j + l] < a[l] for l in range(60 - j))]
        rep = renewal_scan(0, 59, f, HALVES)
        assert rep.times.tolist() == expected
        assert [b[0] for b in rep.blocks] == expected

    def test_block_symbols_match_window(self):
        spec = BinaryARSpec(0.2, [0.3])
        f = UniformField(8)
        rep = renewal_scan(0, 40, f, spec.schedule(), kernel=spec)
        first = int(rep.times[0])
        whole = sample_window(first, 40, f, spec, spec.schedule()).symbols
        assert sum(rep.block_symbols, ()) == whole


def test_oracle_instances_run():
    rng = np.random.default_rng(0)
    for _ in range(20):
        spec = random_finite_order_spec(rng)
        s = sample_window(0, 5, UniformField(int(rng.integers(2**63))), spec, spec.schedule())
        assert set(s.symbols) <= set(spec.alphabet)
